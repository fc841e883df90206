#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ssd {

// Per-axis Gray labeling shared by the mapper and every demapper.
//
// A symbol carries log2(M) bits b_0..b_{log2(M)-1}. Even bit indices label the
// I axis, odd indices the Q axis, MSB first within each axis. Each axis maps
// its bit group to a level index p in {0..sqrt(M)-1} through a binary
// reflected Gray code, so adjacent amplitude levels differ in exactly one bit.
struct BitLabeling {
    int bits_per_axis = 0;
    std::vector<std::uint8_t> code_of_level;  // level p -> Gray pattern (MSB-first value)
    std::vector<std::uint8_t> level_of_code;  // Gray pattern -> level p

    static BitLabeling gray(int levels);
};

// Level pair identifying one point of the square alphabet.
struct SymbolIndex {
    int p_i = 0;
    int p_q = 0;
    friend bool operator==(const SymbolIndex&, const SymbolIndex&) = default;
};

struct RotatedPoint {
    double z_i = 0.0;
    double z_q = 0.0;
};

// Integer coordinates of a rotated point in the projection lattice. Only
// defined for the arctan(1/sqrt(M)) rotation, where every point is uniquely
// identified by either coordinate.
struct LatticeCoord {
    int t_i = 0;
    int t_q = 0;
    double d1d_min = 0.0;  // minimum projected spacing, 2*beta_s*sin(theta)
};

// One transmitted channel use: the I part of one rotated symbol paired with
// the (delayed) Q part of another.
struct CellPair {
    double x_i = 0.0;
    double x_q = 0.0;
};

// Static geometry of a (possibly rotated) square QAM alphabet plus the
// per-point lookup tables the demappers iterate over. Immutable after
// build_spec(); safe to share across threads.
struct ConstellationSpec {
    int m = 0;                // modulation order, square
    int u = 0;                // sqrt(M)
    int shift = 0;            // log2(u); lattice digit splits are shifts/masks
    int bits_per_symbol = 0;  // log2(M)
    double beta_s = 0.0;      // unit-average-energy normalization
    double theta = 0.0;       // rotation angle, radians; 0 means conventional QAM
    double cos_theta = 1.0;
    double sin_theta = 0.0;
    bool proposed_angle = false;  // theta == arctan(1/u) exactly
    double d1d_min = 0.0;         // meaningful when proposed_angle
    BitLabeling labeling;

    // Per-point tables indexed by k = p_i*u + p_q.
    std::vector<double> pt_z_i, pt_z_q;
    std::vector<std::uint16_t> pt_bits;  // bit b_i of the label stored at position i
    std::vector<int> pt_t_i, pt_t_q;     // proposed angle only, else empty
    std::vector<int> point_of_t_i, point_of_t_q;

    int point_index(SymbolIndex s) const { return s.p_i * u + s.p_q; }
    SymbolIndex symbol_at(int k) const { return {k / u, k % u}; }

    // Unrotated axis amplitude of level p: beta_s * (-u + 1 + 2p).
    double level(int p) const { return beta_s * static_cast<double>(-u + 1 + 2 * p); }
};

// Rotation angle arctan(1/sqrt(M)) that turns the projections into a uniform
// integer lattice. M must be one of 4, 16, 64, 256.
double angle_for(int m);

// DVB-T2 standard rotation angle for the same constellation; the comparison
// baseline. For M = 256 the standard angle coincides with angle_for(256).
double dvbt2_angle(int m);

// Builds the alphabet. theta in [0, pi/4]; theta == 0 yields the conventional
// (unrotated) constellation used as a baseline.
ConstellationSpec build_spec(int m, double theta);

RotatedPoint map_symbol(const ConstellationSpec&, SymbolIndex);
SymbolIndex symbol_of_bits(const ConstellationSpec&, std::span<const std::uint8_t> bits);
RotatedPoint map_bits(const ConstellationSpec&, std::span<const std::uint8_t> bits);
void bits_of_symbol(const ConstellationSpec&, SymbolIndex, std::span<std::uint8_t> out);

// Integer lattice coordinates of one point; requires the proposed angle.
LatticeCoord lattice_coords(const ConstellationSpec&, SymbolIndex);

// Inverse transforms: either lattice coordinate determines the full symbol.
SymbolIndex coords_from_ti(const ConstellationSpec&, int t_i);
SymbolIndex coords_from_tq(const ConstellationSpec&, int t_q);

// Cyclic Q delay over one block: x_k = Re(z_k) + j*Im(z_{k-1}), the first
// cell taking the last cell's Q part.
std::vector<CellPair> q_delay(std::span<const RotatedPoint> block);
std::vector<RotatedPoint> q_undelay(std::span<const CellPair> cells);

}  // namespace ssd
