#include "ssd/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "ssd/rng.hpp"

namespace ssd {

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

double Rng::rayleigh(double mean_square) {
    // h = sqrt(E), E ~ Exp(mean_square)
    return std::sqrt(-mean_square * std::log(uniform_pos()));
}

double sigma_from_esn0(double esn0_db) {
    if (!std::isfinite(esn0_db)) throw std::invalid_argument("sigma_from_esn0: non-finite Es/N0");
    return std::pow(10.0, -esn0_db / 10.0);
}

namespace {

void validate(const ChannelConfig& cfg) {
    if (!(cfg.erasure_prob >= 0.0 && cfg.erasure_prob < 1.0))
        throw std::invalid_argument("channel: erasure_prob must be in [0, 1)");
    if (!std::isfinite(cfg.esn0_db)) throw std::invalid_argument("channel: non-finite Es/N0");
}

std::vector<CellGain> draw_gains(const ChannelConfig& cfg, std::size_t n_cells, Rng& rng,
                                 bool rayleigh) {
    validate(cfg);
    if (n_cells == 0) throw std::invalid_argument("channel: n_cells must be >= 1");
    std::vector<CellGain> gains(n_cells);
    for (auto& g : gains) {
        g.h = rayleigh ? rng.rayleigh() : 1.0;
        g.erased = cfg.erasure_prob > 0.0 && rng.bernoulli(cfg.erasure_prob);
        if (g.erased) g.h = 0.0;
    }
    return gains;
}

}  // namespace

std::vector<CellGain> sample_channel(const ChannelConfig& cfg, std::size_t n_cells, Rng& rng) {
    return draw_gains(cfg, n_cells, rng, true);
}

std::vector<CellGain> unit_gains(const ChannelConfig& cfg, std::size_t n_cells, Rng& rng) {
    return draw_gains(cfg, n_cells, rng, false);
}

std::vector<Observation> transmit(std::span<const CellPair> cells,
                                  std::span<const CellGain> gains, double sigma2, Rng& rng) {
    if (cells.size() != gains.size())
        throw std::invalid_argument("transmit: cells and gains length mismatch");
    const std::size_t n = cells.size();
    const double noise_std = std::sqrt(sigma2 / 2.0);

    // Received cells first (fixed draw order), then re-associate: symbol k's
    // I part rode cell k, its Q part rode cell k+1 (cyclic).
    std::vector<double> r_i(n), r_q(n);
    for (std::size_t k = 0; k < n; ++k) {
        r_i[k] = gains[k].h * cells[k].x_i + rng.normal(noise_std);
        r_q[k] = gains[k].h * cells[k].x_q + rng.normal(noise_std);
    }
    std::vector<Observation> obs(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t next = (k + 1 == n) ? 0 : k + 1;
        obs[k] = {r_i[k], r_q[next], gains[k].h, gains[next].h, sigma2};
    }
    return obs;
}

}  // namespace ssd
