#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ssd/channel.hpp"
#include "ssd/complexity.hpp"
#include "ssd/constellation.hpp"
#include "ssd/demap.hpp"
#include "ssd/rng.hpp"

using namespace ssd;

TEST_CASE("closed-form costs") {
    CHECK(analytic_cost(256, CostModel::sphere) == OpCounters{32, 138, 138, 275, 2});
    CHECK(analytic_cost(256, CostModel::maxlog_full) == OpCounters{256, 1032, 776, 2048, 0});
    CHECK(analytic_cost(16, CostModel::sphere) == OpCounters{8, 38, 38, 35, 2});

    CHECK(analytic_cost(256, CostModel::mmse_ref) == OpCounters{16, 64, 48, 128, 6});
    CHECK(analytic_cost(256, CostModel::subregion_ref) == OpCounters{81, 332, 251, 648, 0});
    CHECK(analytic_cost(256, CostModel::pddem_ref) == OpCounters{80, 390, 279, 231, 0});

    // reference rows exist only for M = 256
    CHECK_THROWS_AS(analytic_cost(64, CostModel::mmse_ref), std::invalid_argument);
    CHECK_THROWS_AS(analytic_cost(16, CostModel::pddem_ref), std::invalid_argument);
    CHECK_THROWS_AS(analytic_cost(10, CostModel::sphere), std::invalid_argument);

    // the two published comparison-count expressions are the same accounting
    for (int m : {4, 16, 64, 256}) {
        const std::uint64_t u = static_cast<std::uint64_t>(std::lround(std::sqrt(double(m))));
        std::uint64_t L = 0;
        while ((1ULL << L) < static_cast<std::uint64_t>(m)) ++L;
        const std::uint64_t itemized = 4 + (2 * u - 1) + (2 * u - 2) * L;
        const std::uint64_t closed = 5 + (2 * u - 2) * (1 + L);
        CHECK(itemized == closed);
        CHECK(analytic_cost(m, CostModel::sphere).rc == closed);
    }
}

TEST_CASE("counters are additive") {
    const OpCounters a{1, 2, 3, 4, 5};
    const OpCounters b{10, 20, 30, 40, 50};
    CHECK(a + b == OpCounters{11, 22, 33, 44, 55});
    OpCounters c = a;
    c += b;
    c += b;
    CHECK(c == OpCounters{21, 42, 63, 84, 105});
}

TEST_CASE("reduction report") {
    const auto rep = reduction_report(analytic_cost(256, CostModel::sphere),
                                      analytic_cost(256, CostModel::maxlog_full));
    REQUIRE(rep.size() == 4);  // RI omitted: the reference spends none
    CHECK(rep[0].field == "cp");
    CHECK(rep[0].nearest == 88);  // 87.5 rounds up
    CHECK(rep[1].field == "rm");
    CHECK(rep[1].nearest == 87);
    CHECK(rep[2].field == "rs");
    CHECK(rep[2].nearest == 82);
    CHECK(rep[3].field == "rc");
    CHECK(rep[3].nearest == 87);

    const auto vs_pddem = reduction_report(analytic_cost(256, CostModel::sphere),
                                           analytic_cost(256, CostModel::pddem_ref));
    CHECK(vs_pddem[0].field == "cp");
    CHECK(vs_pddem[0].nearest == 60);
    CHECK(vs_pddem[0].percent == doctest::Approx(60.0).epsilon(1e-12));
    CHECK(vs_pddem[1].field == "rm");
    CHECK(vs_pddem[1].truncated == 64);  // 64.6% truncates to the published 64
    CHECK(vs_pddem[1].percent == doctest::Approx(100.0 * (1.0 - 138.0 / 390.0)).epsilon(1e-12));
}

namespace {

Observation random_obs(const ConstellationSpec& spec, Rng& rng, double esn0_db) {
    const int k = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(spec.m));
    Observation o;
    o.h_i = rng.rayleigh();
    o.h_q = rng.rayleigh();
    if (o.h_i < 1e-3) o.h_i = 1e-3;  // keep off the erasure fallback path
    if (o.h_q < 1e-3) o.h_q = 1e-3;
    o.sigma2 = sigma_from_esn0(esn0_db);
    const double ns = std::sqrt(o.sigma2 / 2.0);
    o.y_i = o.h_i * spec.pt_z_i[k] + rng.normal(ns);
    o.y_q = o.h_q * spec.pt_z_q[k] + rng.normal(ns);
    return o;
}

}  // namespace

TEST_CASE("measured counters match the closed forms on every input") {
    Rng rng(31337);
    for (int m : {4, 16, 64, 256}) {
        const auto spec = build_spec(m, angle_for(m));
        const auto expected_sphere = analytic_cost(m, CostModel::sphere);
        const auto expected_full = analytic_cost(m, CostModel::maxlog_full);
        OpCounters total;
        const int reps = 200;
        for (int r = 0; r < reps; ++r) {
            // low SNR pushes equalized values outside [0, M) often enough to
            // exercise both clamp branches of the window rule
            const Observation o = random_obs(spec, rng, r % 2 ? 15.0 : -5.0);
            const SphereResult res = sphere_demap(o, spec);
            CHECK(res.ops == expected_sphere);
            total += res.ops;

            OpCounters full;
            (void)llr_maxlog_full(o, spec, {}, &full);
            CHECK(full == expected_full);
        }
        // N calls cost exactly N times one call
        OpCounters n_times;
        for (int r = 0; r < reps; ++r) n_times += expected_sphere;
        CHECK(total == n_times);
    }
}
