#include "ssd/complexity.hpp"

#include <cmath>
#include <stdexcept>

namespace ssd {

std::string_view cost_model_name(CostModel c) {
    switch (c) {
        case CostModel::sphere: return "sphere";
        case CostModel::maxlog_full: return "maxlog";
        case CostModel::mmse_ref: return "mmse";
        case CostModel::subregion_ref: return "subregion";
        case CostModel::pddem_ref: return "pddem";
    }
    return "?";
}

CostModel cost_model_from_name(std::string_view name) {
    if (name == "sphere") return CostModel::sphere;
    if (name == "maxlog" || name == "maxlog_full") return CostModel::maxlog_full;
    if (name == "mmse") return CostModel::mmse_ref;
    if (name == "subregion") return CostModel::subregion_ref;
    if (name == "pddem") return CostModel::pddem_ref;
    throw std::invalid_argument("unknown cost model: " + std::string(name));
}

OpCounters analytic_cost(int m, CostModel model) {
    const int u = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
    if (u * u != m || (m != 4 && m != 16 && m != 64 && m != 256))
        throw std::invalid_argument("analytic_cost: unsupported modulation order");
    const std::uint64_t U = static_cast<std::uint64_t>(u);
    const std::uint64_t M = static_cast<std::uint64_t>(m);
    std::uint64_t L = 0;
    while ((1ULL << L) < M) ++L;  // log2(M)

    switch (model) {
        case CostModel::sphere:
            // equalization (2 RS, 2 RM, 2 RI) + window selection (4 RC) and
            // candidate generation (2u RS) + 2u distances at 4 RM + 3 RS each
            // + global minimum (2u-1 RC) + one complementary minimum per bit
            // ((2u-2) RC each) + final scaling/subtraction per bit.
            return {
                .cp = 2 * U,
                .rm = 8 * U + 2 + L,
                .rs = 8 * U + 2 + L,
                .rc = 5 + (2 * U - 2) * (1 + L),
                .ri = 2,
            };
        case CostModel::maxlog_full:
            // M distances at 4 RM + 3 RS each; per bit, one comparison per
            // constellation point to track both coset minima; final scaling
            // and subtraction per bit.
            return {
                .cp = M,
                .rm = 4 * M + L,
                .rs = 3 * M + L,
                .rc = M * L,
                .ri = 0,
            };
        case CostModel::mmse_ref:
            if (m != 256) throw std::invalid_argument("mmse reference cost is published for M=256 only");
            return {.cp = 16, .rm = 64, .rs = 48, .rc = 128, .ri = 6};
        case CostModel::subregion_ref:
            if (m != 256) throw std::invalid_argument("subregion reference cost is published for M=256 only");
            return {.cp = 81, .rm = 332, .rs = 251, .rc = 648, .ri = 0};
        case CostModel::pddem_ref:
            if (m != 256) throw std::invalid_argument("pddem reference cost is published for M=256 only");
            return {.cp = 80, .rm = 390, .rs = 279, .rc = 231, .ri = 0};
    }
    throw std::invalid_argument("analytic_cost: unknown cost model");
}

std::vector<ReductionEntry> reduction_report(const OpCounters& a, const OpCounters& b) {
    std::vector<ReductionEntry> out;
    const auto add = [&out](const char* field, std::uint64_t av, std::uint64_t bv) {
        if (bv == 0) return;  // undefined ratio, field omitted
        const double pct = 100.0 * (1.0 - static_cast<double>(av) / static_cast<double>(bv));
        out.push_back({field, pct, static_cast<int>(std::lround(pct)),
                       static_cast<int>(std::trunc(pct))});
    };
    add("cp", a.cp, b.cp);
    add("rm", a.rm, b.rm);
    add("rs", a.rs, b.rs);
    add("rc", a.rc, b.rc);
    add("ri", a.ri, b.ri);
    return out;
}

}  // namespace ssd
