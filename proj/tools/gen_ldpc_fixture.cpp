// Generates the staircase LDPC fixture shipped under data/. Deterministic:
// rerunning reproduces the committed file byte for byte.
//
// Structure: H = [A | T] with T the m x m dual-diagonal parity part and A a
// column-weight-3 info part. Column pairs share at most one row (girth >= 6),
// which also forbids adjacent row pairs inside one info column since those
// would 4-cycle with a parity column.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <vector>

#include "ssd/fec.hpp"
#include "ssd/rng.hpp"

namespace {

ssd::ParityCheckMatrix make_staircase(int n, int m, std::uint64_t seed) {
    const int k = n - m;
    const int col_weight = 3;
    ssd::Rng rng(seed);

    std::vector<std::vector<int>> col_rows(static_cast<std::size_t>(k));
    std::vector<std::vector<int>> row_cols(static_cast<std::size_t>(m));
    std::vector<int> row_deg(static_cast<std::size_t>(m), 0);

    const auto creates_short_cycle = [&](int col, int r) {
        const auto& rows = col_rows[static_cast<std::size_t>(col)];
        for (int r2 : rows)
            if (std::abs(r2 - r) <= 1) return true;  // duplicate or parity 4-cycle
        for (int other : row_cols[static_cast<std::size_t>(r)]) {
            const auto& orows = col_rows[static_cast<std::size_t>(other)];
            for (int r2 : rows)
                if (std::binary_search(orows.begin(), orows.end(), r2)) return true;
        }
        return false;
    };

    for (int j = 0; j < k; ++j) {
        int placed = 0;
        int stuck = 0;
        while (placed < col_weight) {
            // a few random candidates, keep the least loaded valid one
            int best = -1;
            for (int t = 0; t < 8; ++t) {
                const int r = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(m));
                if (creates_short_cycle(j, r)) continue;
                if (best < 0 || row_deg[static_cast<std::size_t>(r)] <
                                    row_deg[static_cast<std::size_t>(best)])
                    best = r;
            }
            if (best < 0) {
                if (++stuck > 1000) {
                    std::cerr << "placement stuck at column " << j << "\n";
                    std::exit(1);
                }
                continue;
            }
            auto& rows = col_rows[static_cast<std::size_t>(j)];
            rows.insert(std::lower_bound(rows.begin(), rows.end(), best), best);
            row_cols[static_cast<std::size_t>(best)].push_back(j);
            ++row_deg[static_cast<std::size_t>(best)];
            ++placed;
        }
    }

    ssd::ParityCheckMatrix h;
    h.n = n;
    h.m = m;
    h.check_vars.assign(static_cast<std::size_t>(m), {});
    h.var_checks.assign(static_cast<std::size_t>(n), {});
    for (int j = 0; j < k; ++j)
        for (int r : col_rows[static_cast<std::size_t>(j)]) {
            h.check_vars[static_cast<std::size_t>(r)].push_back(j);
            h.var_checks[static_cast<std::size_t>(j)].push_back(r);
        }
    for (int i = 0; i < m; ++i) {
        h.check_vars[static_cast<std::size_t>(i)].push_back(k + i);
        h.var_checks[static_cast<std::size_t>(k + i)].push_back(i);
        if (i + 1 < m) {
            h.check_vars[static_cast<std::size_t>(i + 1)].push_back(k + i);
            h.var_checks[static_cast<std::size_t>(k + i)].push_back(i + 1);
        }
    }
    for (auto& row : h.check_vars) std::sort(row.begin(), row.end());
    for (auto& col : h.var_checks) std::sort(col.begin(), col.end());
    h.staircase = true;
    return h;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string path = argc > 1 ? argv[1] : "data/ldpc_n1008_r12.alist";
    const ssd::ParityCheckMatrix h = make_staircase(1008, 504, 0x55d1c3a2u);

    const std::string text = ssd::to_alist(h);
    const ssd::ParityCheckMatrix back = ssd::parse_alist(text);  // self check
    if (!back.staircase || back.n != h.n || back.m != h.m) {
        std::cerr << "round-trip validation failed\n";
        return 1;
    }
    ssd::Rng rng(7);
    std::vector<std::uint8_t> info(static_cast<std::size_t>(h.info_bits()));
    for (auto& b : info) b = rng.bernoulli(0.5) ? 1 : 0;
    if (!ssd::syndrome_ok(back, ssd::encode(back, info))) {
        std::cerr << "encode validation failed\n";
        return 1;
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write " << path << "\n";
        return 1;
    }
    out << text;
    out.close();
    std::cerr << "wrote " << path << ": n=" << h.n << " m=" << h.m << " edges=" << h.edge_count()
              << "\n";
    return 0;
}
