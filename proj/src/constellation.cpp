#include "ssd/constellation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ssd/errors.hpp"

namespace ssd {

namespace {

bool supported_order(int m) { return m == 4 || m == 16 || m == 64 || m == 256; }

int int_sqrt(int m) {
    int u = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
    return (u * u == m) ? u : -1;
}

int int_log2(int v) {
    int n = 0;
    while ((1 << n) < v) ++n;
    return n;
}

}  // namespace

BitLabeling BitLabeling::gray(int levels) {
    BitLabeling lab;
    lab.bits_per_axis = int_log2(levels);
    lab.code_of_level.resize(levels);
    lab.level_of_code.resize(levels);
    for (int p = 0; p < levels; ++p) {
        const auto code = static_cast<std::uint8_t>(p ^ (p >> 1));
        lab.code_of_level[p] = code;
        lab.level_of_code[code] = static_cast<std::uint8_t>(p);
    }
    return lab;
}

double angle_for(int m) {
    if (!supported_order(m))
        throw std::invalid_argument("angle_for: unsupported modulation order " + std::to_string(m));
    return std::atan(1.0 / int_sqrt(m));
}

double dvbt2_angle(int m) {
    switch (m) {
        case 4: return 29.0 * M_PI / 180.0;
        case 16: return 16.8 * M_PI / 180.0;
        case 64: return 8.6 * M_PI / 180.0;
        case 256: return std::atan(1.0 / 16.0);
        default:
            throw std::invalid_argument("dvbt2_angle: unsupported modulation order " +
                                        std::to_string(m));
    }
}

ConstellationSpec build_spec(int m, double theta) {
    if (!supported_order(m))
        throw std::invalid_argument("build_spec: unsupported modulation order " +
                                    std::to_string(m));
    if (!(theta >= 0.0 && theta <= M_PI / 4.0 + 1e-15))
        throw std::invalid_argument("build_spec: rotation angle outside [0, pi/4]");

    ConstellationSpec spec;
    spec.m = m;
    spec.u = int_sqrt(m);
    spec.shift = int_log2(spec.u);
    spec.bits_per_symbol = 2 * spec.shift;
    spec.theta = theta;
    spec.cos_theta = std::cos(theta);
    spec.sin_theta = std::sin(theta);
    spec.labeling = BitLabeling::gray(spec.u);
    spec.proposed_angle = (theta == angle_for(m));

    // Normalize the unrotated alphabet to unit average symbol energy.
    double energy = 0.0;
    for (int p = 0; p < spec.u; ++p) {
        const double a = static_cast<double>(-spec.u + 1 + 2 * p);
        energy += 2.0 * a * a;  // both axes contribute the same level set
    }
    energy /= spec.u;  // mean over the M points collapses to a per-axis mean
    spec.beta_s = 1.0 / std::sqrt(energy);
    spec.d1d_min = 2.0 * spec.beta_s * spec.sin_theta;

    spec.pt_z_i.resize(m);
    spec.pt_z_q.resize(m);
    spec.pt_bits.resize(m);
    for (int pi = 0; pi < spec.u; ++pi) {
        for (int pq = 0; pq < spec.u; ++pq) {
            const int k = pi * spec.u + pq;
            const double s_i = spec.level(pi);
            const double s_q = spec.level(pq);
            spec.pt_z_i[k] = s_i * spec.cos_theta - s_q * spec.sin_theta;
            spec.pt_z_q[k] = s_i * spec.sin_theta + s_q * spec.cos_theta;

            std::uint16_t bits = 0;
            const int gi = spec.labeling.code_of_level[pi];
            const int gq = spec.labeling.code_of_level[pq];
            for (int b = 0; b < spec.shift; ++b) {
                const int bit_i = (gi >> (spec.shift - 1 - b)) & 1;
                const int bit_q = (gq >> (spec.shift - 1 - b)) & 1;
                bits = static_cast<std::uint16_t>(bits | (bit_i << (2 * b)) | (bit_q << (2 * b + 1)));
            }
            spec.pt_bits[k] = bits;
        }
    }

    if (spec.proposed_angle) {
        spec.pt_t_i.resize(m);
        spec.pt_t_q.resize(m);
        spec.point_of_t_i.resize(m);
        spec.point_of_t_q.resize(m);
        for (int pi = 0; pi < spec.u; ++pi) {
            for (int pq = 0; pq < spec.u; ++pq) {
                const int k = pi * spec.u + pq;
                const int t_i = spec.u * pi + (spec.u - 1 - pq);
                const int t_q = spec.u * pq + pi;
                spec.pt_t_i[k] = t_i;
                spec.pt_t_q[k] = t_q;
                spec.point_of_t_i[t_i] = k;
                spec.point_of_t_q[t_q] = k;
            }
        }
    }
    return spec;
}

RotatedPoint map_symbol(const ConstellationSpec& spec, SymbolIndex s) {
    if (s.p_i < 0 || s.p_i >= spec.u || s.p_q < 0 || s.p_q >= spec.u)
        throw std::invalid_argument("map_symbol: level index out of range");
    const int k = spec.point_index(s);
    return {spec.pt_z_i[k], spec.pt_z_q[k]};
}

SymbolIndex symbol_of_bits(const ConstellationSpec& spec, std::span<const std::uint8_t> bits) {
    if (static_cast<int>(bits.size()) != spec.bits_per_symbol)
        throw std::invalid_argument("map_bits: expected " + std::to_string(spec.bits_per_symbol) +
                                    " bits, got " + std::to_string(bits.size()));
    int gi = 0;
    int gq = 0;
    for (int b = 0; b < spec.shift; ++b) {
        gi = (gi << 1) | (bits[2 * b] & 1);
        gq = (gq << 1) | (bits[2 * b + 1] & 1);
    }
    return {spec.labeling.level_of_code[gi], spec.labeling.level_of_code[gq]};
}

RotatedPoint map_bits(const ConstellationSpec& spec, std::span<const std::uint8_t> bits) {
    return map_symbol(spec, symbol_of_bits(spec, bits));
}

void bits_of_symbol(const ConstellationSpec& spec, SymbolIndex s, std::span<std::uint8_t> out) {
    if (static_cast<int>(out.size()) != spec.bits_per_symbol)
        throw std::invalid_argument("bits_of_symbol: wrong output length");
    const std::uint16_t bits = spec.pt_bits[spec.point_index(s)];
    for (int i = 0; i < spec.bits_per_symbol; ++i)
        out[i] = static_cast<std::uint8_t>((bits >> i) & 1);
}

LatticeCoord lattice_coords(const ConstellationSpec& spec, SymbolIndex s) {
    if (!spec.proposed_angle)
        throw UnsupportedAngleError("lattice_coords: requires theta = arctan(1/sqrt(M))");
    if (s.p_i < 0 || s.p_i >= spec.u || s.p_q < 0 || s.p_q >= spec.u)
        throw std::invalid_argument("lattice_coords: level index out of range");
    const int k = spec.point_index(s);
    return {spec.pt_t_i[k], spec.pt_t_q[k], spec.d1d_min};
}

SymbolIndex coords_from_ti(const ConstellationSpec& spec, int t_i) {
    if (!spec.proposed_angle)
        throw UnsupportedAngleError("coords_from_ti: requires theta = arctan(1/sqrt(M))");
    if (t_i < 0 || t_i >= spec.m)
        throw std::invalid_argument("coords_from_ti: value out of [0, M-1]");
    const int p_i = t_i >> spec.shift;
    const int p_q = spec.u - 1 - (t_i & (spec.u - 1));
    return {p_i, p_q};
}

SymbolIndex coords_from_tq(const ConstellationSpec& spec, int t_q) {
    if (!spec.proposed_angle)
        throw UnsupportedAngleError("coords_from_tq: requires theta = arctan(1/sqrt(M))");
    if (t_q < 0 || t_q >= spec.m)
        throw std::invalid_argument("coords_from_tq: value out of [0, M-1]");
    const int p_q = t_q >> spec.shift;
    const int p_i = t_q & (spec.u - 1);
    return {p_i, p_q};
}

std::vector<CellPair> q_delay(std::span<const RotatedPoint> block) {
    if (block.empty()) throw std::invalid_argument("q_delay: empty block");
    const std::size_t n = block.size();
    std::vector<CellPair> cells(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t prev = (k == 0) ? n - 1 : k - 1;
        cells[k] = {block[k].z_i, block[prev].z_q};
    }
    return cells;
}

std::vector<RotatedPoint> q_undelay(std::span<const CellPair> cells) {
    if (cells.empty()) throw std::invalid_argument("q_undelay: empty block");
    const std::size_t n = cells.size();
    std::vector<RotatedPoint> block(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t next = (k + 1 == n) ? 0 : k + 1;
        block[k] = {cells[k].x_i, cells[next].x_q};
    }
    return block;
}

}  // namespace ssd
