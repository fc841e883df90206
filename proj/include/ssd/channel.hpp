#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ssd/constellation.hpp"
#include "ssd/rng.hpp"

namespace ssd {

struct ChannelConfig {
    double esn0_db = 0.0;      // Es/N0 with Es = 1 per cell
    double erasure_prob = 0.0; // per-cell erasure probability, < 1
    std::uint64_t seed = 0;
};

// Fading state of one channel cell. An erased cell has h = 0 exactly and the
// receiver knows it (perfect CSI).
struct CellGain {
    double h = 1.0;
    bool erased = false;
};

// What the demapper sees for one rotated symbol after the Q delay has been
// undone: both received components with the gains that faded them and the
// noise variance. The two components rode different cells, so h_i and h_q are
// independent.
struct Observation {
    double y_i = 0.0;
    double y_q = 0.0;
    double h_i = 0.0;
    double h_q = 0.0;
    double sigma2 = 0.0;  // total complex-noise variance
};

// Total complex-noise variance for Es = 1: sigma^2 = 10^(-esn0_db/10).
// Each noise component carries sigma^2/2.
double sigma_from_esn0(double esn0_db);

// Per-cell i.i.d. Rayleigh gains with E[h^2] = 1, then independent erasures
// forcing h = 0 with probability erasure_prob.
std::vector<CellGain> sample_channel(const ChannelConfig&, std::size_t n_cells, Rng&);

// Unit gains (h = 1) with the same erasure process; the AWGN-like profile.
std::vector<CellGain> unit_gains(const ChannelConfig&, std::size_t n_cells, Rng&);

// Fades cells, adds white Gaussian noise, and re-associates components across
// the cyclic Q delay: obs[k] carries both components of rotated symbol k.
std::vector<Observation> transmit(std::span<const CellPair> cells,
                                  std::span<const CellGain> gains, double sigma2, Rng&);

}  // namespace ssd
