#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ssd {

// Demapper cost in candidate points, real multiplications, real sums
// (additions or subtractions), real comparisons and real inversions.
// Counters add up across pipeline stages.
struct OpCounters {
    std::uint64_t cp = 0;
    std::uint64_t rm = 0;
    std::uint64_t rs = 0;
    std::uint64_t rc = 0;
    std::uint64_t ri = 0;

    OpCounters& operator+=(const OpCounters& o) {
        cp += o.cp;
        rm += o.rm;
        rs += o.rs;
        rc += o.rc;
        ri += o.ri;
        return *this;
    }
    friend OpCounters operator+(OpCounters a, const OpCounters& b) { return a += b; }
    friend bool operator==(const OpCounters&, const OpCounters&) = default;
};

enum class CostModel {
    sphere,        // windowed lattice demapper, closed-form for any square M
    maxlog_full,   // exhaustive max-log, closed-form for any square M
    mmse_ref,      // published reference constants, M = 256 only
    subregion_ref, // published reference constants, M = 256 only
    pddem_ref,     // published reference constants, M = 256 only
};

std::string_view cost_model_name(CostModel);
CostModel cost_model_from_name(std::string_view);

// Closed-form operation counts per demapped symbol.
OpCounters analytic_cost(int m, CostModel);

struct ReductionEntry {
    std::string field;     // "cp", "rm", "rs", "rc", "ri"
    double percent = 0.0;  // 100 * (1 - a/b)
    int nearest = 0;
    int truncated = 0;
};

// Per-field cost reduction of a relative to b. Fields where b is zero are
// omitted. Both nearest-integer and truncated percentages are reported since
// published summaries round inconsistently.
std::vector<ReductionEntry> reduction_report(const OpCounters& a, const OpCounters& b);

}  // namespace ssd
