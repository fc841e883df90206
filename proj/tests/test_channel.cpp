#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ssd/channel.hpp"
#include "ssd/rng.hpp"

using namespace ssd;

TEST_CASE("noise variance from Es/N0") {
    CHECK(sigma_from_esn0(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sigma_from_esn0(10.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(sigma_from_esn0(3.0103) == doctest::Approx(0.5).epsilon(1e-5));
    CHECK_THROWS_AS(sigma_from_esn0(std::nan("")), std::invalid_argument);
}

TEST_CASE("fading gains: normalization and erasure rate") {
    ChannelConfig cfg;
    cfg.erasure_prob = 0.0;
    Rng rng(42);
    const std::size_t n = 1'000'000;
    auto gains = sample_channel(cfg, n, rng);
    double sum_h2 = 0.0;
    bool any_zero = false;
    for (const auto& g : gains) {
        sum_h2 += g.h * g.h;
        any_zero |= (g.h == 0.0);
    }
    CHECK(sum_h2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK_FALSE(any_zero);

    cfg.erasure_prob = 0.15;
    Rng rng2(43);
    gains = sample_channel(cfg, n, rng2);
    std::size_t erased = 0;
    for (const auto& g : gains) {
        if (g.erased) {
            CHECK(g.h == 0.0);
            ++erased;
        }
    }
    const double frac = static_cast<double>(erased) / n;
    CHECK(frac > 0.145);
    CHECK(frac < 0.155);

    ChannelConfig bad;
    bad.erasure_prob = 1.0;
    Rng rng3(1);
    CHECK_THROWS_AS(sample_channel(bad, 10, rng3), std::invalid_argument);
}

TEST_CASE("fixed seed reproduces the channel") {
    ChannelConfig cfg;
    cfg.erasure_prob = 0.15;
    Rng a(777), b(777);
    const auto ga = sample_channel(cfg, 10000, a);
    const auto gb = sample_channel(cfg, 10000, b);
    for (std::size_t i = 0; i < ga.size(); ++i) {
        CHECK(ga[i].h == gb[i].h);
        CHECK(ga[i].erased == gb[i].erased);
    }
}

TEST_CASE("transmit: identity, erasure, and re-association") {
    // distinct component values show that obs[k] collects both parts of symbol k
    std::vector<RotatedPoint> block;
    for (int k = 0; k < 5; ++k) block.push_back({static_cast<double>(k), 100.0 + k});
    const auto cells = q_delay(block);
    std::vector<CellGain> gains(cells.size(), {1.0, false});
    Rng rng(5);
    const auto obs = transmit(cells, gains, 0.0, rng);
    for (std::size_t k = 0; k < obs.size(); ++k) {
        CHECK(obs[k].y_i == doctest::Approx(static_cast<double>(k)));
        CHECK(obs[k].y_q == doctest::Approx(100.0 + k));
        CHECK(obs[k].h_i == 1.0);
        CHECK(obs[k].h_q == 1.0);
    }

    // an erased cell zeroes the I part of one symbol and the Q part of another
    gains[2].h = 0.0;
    gains[2].erased = true;
    Rng rng2(6);
    const auto obs2 = transmit(cells, gains, 0.0, rng2);
    CHECK(obs2[2].y_i == 0.0);
    CHECK(obs2[2].h_i == 0.0);
    CHECK(obs2[1].y_q == 0.0);  // symbol 1's Q rode cell 2
    CHECK(obs2[1].h_q == 0.0);

    std::vector<CellGain> wrong(3);
    CHECK_THROWS_AS(transmit(cells, wrong, 0.1, rng2), std::invalid_argument);
}

TEST_CASE("noise variance per received component") {
    const double sigma2 = 0.25;
    const std::size_t n = 1'000'000;
    std::vector<RotatedPoint> block(n, {0.7, -0.3});
    const auto cells = q_delay(block);
    ChannelConfig cfg;
    Rng rng(99);
    const auto gains = sample_channel(cfg, n, rng);
    const auto obs = transmit(cells, gains, sigma2, rng);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double e = obs[k].y_i - obs[k].h_i * 0.7;
        acc += e * e;
    }
    CHECK(acc / n == doctest::Approx(sigma2 / 2.0).epsilon(0.01));
}

TEST_CASE("the two components of a symbol fade independently") {
    ChannelConfig cfg;
    cfg.erasure_prob = 0.15;
    const std::size_t n = 1'000'000;
    std::vector<RotatedPoint> block(n, {1.0, 1.0});
    const auto cells = q_delay(block);
    Rng rng(2024);
    const auto gains = sample_channel(cfg, n, rng);
    const auto obs = transmit(cells, gains, 0.01, rng);

    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    std::size_t both = 0;
    for (const auto& o : obs) {
        sx += o.h_i;
        sy += o.h_q;
        sxx += o.h_i * o.h_i;
        syy += o.h_q * o.h_q;
        sxy += o.h_i * o.h_q;
        both += (o.h_i == 0.0 && o.h_q == 0.0);
    }
    const double mx = sx / n, my = sy / n;
    const double cov = sxy / n - mx * my;
    const double rho = cov / std::sqrt((sxx / n - mx * mx) * (syy / n - my * my));
    CHECK(std::fabs(rho) < 0.01);

    const double p_both = static_cast<double>(both) / n;
    CHECK(p_both == doctest::Approx(0.15 * 0.15).epsilon(0.10));
}
