#include "ssd/demap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ssd/errors.hpp"

namespace ssd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_llr(double v, double cap) { return std::clamp(v, -cap, cap); }

void require_noise(const Observation& obs) {
    if (!(obs.sigma2 > 0.0)) throw std::invalid_argument("demap: sigma2 must be > 0");
}

}  // namespace

double distance(const Observation& obs, const RotatedPoint& z) {
    const double ei = obs.y_i - obs.h_i * z.z_i;
    const double eq = obs.y_q - obs.h_q * z.z_q;
    return ei * ei + eq * eq;
}

double cross_term_coefficient(double h_i, double h_q, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return (h_i * c) * (-h_i * s) + (h_q * s) * (h_q * c);
}

double expanded_distance(const Observation& obs, double s_i, double s_q, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double h11 = obs.h_i * c;
    const double h12 = -obs.h_i * s;
    const double h21 = obs.h_q * s;
    const double h22 = obs.h_q * c;
    const double gi = h11 * h11 + h21 * h21;
    const double gq = h12 * h12 + h22 * h22;
    if (gi == 0.0 || gq == 0.0)
        throw DegenerateChannelError("expanded_distance: zero effective axis gain");
    const double wi = obs.y_i * h11 + obs.y_q * h21;
    const double wq = obs.y_i * h12 + obs.y_q * h22;
    const double ri = s_i - wi / gi;
    const double rq = s_q - wq / gq;
    // note the + sign on the coupling term; expanding the squares directly
    // confirms it
    return obs.y_i * obs.y_i + obs.y_q * obs.y_q - wi * wi / gi - wq * wq / gq + gi * ri * ri +
           gq * rq * rq + 2.0 * (h11 * h12 + h21 * h22) * s_i * s_q;
}

LlrVector llr_exact(const Observation& obs, const ConstellationSpec& spec,
                    const DemapOptions& opt) {
    require_noise(obs);
    const int m = spec.m;
    const double inv_s = 1.0 / obs.sigma2;

    // exponents -d_k/sigma^2 over the whole alphabet
    std::array<double, 256> a;
    for (int k = 0; k < m; ++k)
        a[k] = -distance(obs, {spec.pt_z_i[k], spec.pt_z_q[k]}) * inv_s;

    LlrVector out;
    out.n = spec.bits_per_symbol;
    for (int i = 0; i < out.n; ++i) {
        double mx0 = -kInf, mx1 = -kInf;
        for (int k = 0; k < m; ++k)
            ((spec.pt_bits[k] >> i) & 1) ? mx1 = std::max(mx1, a[k]) : mx0 = std::max(mx0, a[k]);
        double s0 = 0.0, s1 = 0.0;
        for (int k = 0; k < m; ++k) {
            if ((spec.pt_bits[k] >> i) & 1)
                s1 += std::exp(a[k] - mx1);
            else
                s0 += std::exp(a[k] - mx0);
        }
        const double lse0 = mx0 + std::log(s0);
        const double lse1 = mx1 + std::log(s1);
        out.v[i] = clamp_llr(lse0 - lse1, opt.llr_cap);
    }
    return out;
}

LlrVector llr_maxlog_full(const Observation& obs, const ConstellationSpec& spec,
                          const DemapOptions& opt, OpCounters* ops) {
    require_noise(obs);
    const int m = spec.m;

    std::array<double, 256> dist;
    for (int k = 0; k < m; ++k) {
        const double ei = obs.y_i - obs.h_i * spec.pt_z_i[k];
        const double eq = obs.y_q - obs.h_q * spec.pt_z_q[k];
        dist[k] = ei * ei + eq * eq;
    }
    if (ops) {
        ops->cp += static_cast<std::uint64_t>(m);
        ops->rm += 4ULL * m;  // two gain products and two squares per point
        ops->rs += 3ULL * m;  // two differences and the final add per point
    }

    const double inv_s = 1.0 / obs.sigma2;
    LlrVector out;
    out.n = spec.bits_per_symbol;
    for (int i = 0; i < out.n; ++i) {
        double m0 = kInf, m1 = kInf;
        for (int k = 0; k < m; ++k) {
            if ((spec.pt_bits[k] >> i) & 1)
                m1 = std::min(m1, dist[k]);
            else
                m0 = std::min(m0, dist[k]);
        }
        if (ops) ops->rc += static_cast<std::uint64_t>(m);  // one compare per point per bit
        out.v[i] = clamp_llr((m1 - m0) * inv_s, opt.llr_cap);
    }
    if (ops) {
        ops->rm += static_cast<std::uint64_t>(out.n);
        ops->rs += static_cast<std::uint64_t>(out.n);
    }
    return out;
}

EqualizedObservation equalize(const Observation& obs, const ConstellationSpec& spec,
                              const DemapOptions& opt) {
    if (!spec.proposed_angle)
        throw UnsupportedAngleError("equalize: requires theta = arctan(1/sqrt(M))");
    EqualizedObservation eq;
    eq.valid_i = obs.h_i >= opt.erasure_eps;
    eq.valid_q = obs.h_q >= opt.erasure_eps;
    if (!eq.valid_i && !eq.valid_q)
        throw DegenerateChannelError("equalize: both axis gains below the erasure threshold");
    const double half = 0.5 * static_cast<double>(spec.m - 1);
    if (eq.valid_i) eq.lat_i = obs.y_i * (1.0 / (spec.d1d_min * obs.h_i)) + half;
    if (eq.valid_q) eq.lat_q = obs.y_q * (1.0 / (spec.d1d_min * obs.h_q)) + half;
    return eq;
}

WindowRange window(double lat, int m, int d) {
    if (d < 1 || 2 * d > m) throw std::invalid_argument("window: radius out of [1, M/2]");
    if (lat < static_cast<double>(d)) return {0, 2 * d - 1};
    if (lat >= static_cast<double>(m - d)) return {m - 2 * d, m - 1};
    const int f = static_cast<int>(std::floor(lat));
    return {f - d + 1, f + d};
}

CandidateSet sphere_candidates(const Observation& obs, const ConstellationSpec& spec, int d,
                               const DemapOptions& opt) {
    const EqualizedObservation eq = equalize(obs, spec, opt);
    if (!eq.valid_i || !eq.valid_q)
        throw DegenerateChannelError("sphere_candidates: needs both axes valid");
    CandidateSet set;
    set.win_i = window(eq.lat_i, spec.m, d);
    set.win_q = window(eq.lat_q, spec.m, d);
    set.entries.reserve(static_cast<std::size_t>(4 * d));
    const double scale = spec.d1d_min * spec.d1d_min;
    const auto push = [&](int t, int axis) {
        const int k = axis == 0 ? spec.point_of_t_i[t] : spec.point_of_t_q[t];
        const double di = obs.h_i * (eq.lat_i - spec.pt_t_i[k]);
        const double dq = obs.h_q * (eq.lat_q - spec.pt_t_q[k]);
        set.entries.push_back({t, axis, spec.symbol_at(k), scale * (di * di + dq * dq)});
    };
    for (int t = set.win_i.lo; t <= set.win_i.hi; ++t) push(t, 0);
    for (int t = set.win_q.lo; t <= set.win_q.hi; ++t) push(t, 1);
    return set;
}

namespace {

// One axis erased: score all M lattice values of the surviving axis. Counter
// rules follow the same units (2 RM + 1 RS per 1D distance, one equalization,
// full-scan minima); these counts are outside the standard 4-step accounting.
SphereResult sphere_1d_fallback(const Observation& obs, const ConstellationSpec& spec,
                                const DemapOptions& opt, bool use_i) {
    SphereResult res;
    res.fallback_1d = true;
    res.llr.n = spec.bits_per_symbol;
    OpCounters& ops = res.ops;

    const double h = use_i ? obs.h_i : obs.h_q;
    const double y = use_i ? obs.y_i : obs.y_q;
    const double half = 0.5 * static_cast<double>(spec.m - 1);
    const double lat = y * (1.0 / (spec.d1d_min * h)) + half;
    ops.ri += 1;
    ops.rm += 1;
    ops.rs += 1;

    const int m = spec.m;
    std::array<double, 256> dist;
    std::array<int, 256> point;
    for (int t = 0; t < m; ++t) {
        point[t] = use_i ? spec.point_of_t_i[t] : spec.point_of_t_q[t];
        const double e = h * (lat - static_cast<double>(t));
        dist[t] = e * e;
    }
    ops.cp += static_cast<std::uint64_t>(m);
    ops.rm += 2ULL * m;
    ops.rs += 1ULL * m;

    int best = 0;
    for (int t = 1; t < m; ++t)
        if (dist[t] < dist[best]) best = t;
    ops.rc += static_cast<std::uint64_t>(m - 1);

    const std::uint16_t best_bits = spec.pt_bits[point[best]];
    const double scale = spec.d1d_min * spec.d1d_min / obs.sigma2;
    for (int i = 0; i < res.llr.n; ++i) {
        const int comp = ((best_bits >> i) & 1) ^ 1;
        double mc = kInf;
        for (int t = 0; t < m; ++t)
            if ((((spec.pt_bits[point[t]] >> i) & 1) == comp) && dist[t] < mc) mc = dist[t];
        ops.rc += static_cast<std::uint64_t>(m - 2);
        double l = (mc - dist[best]) * scale;
        if (comp == 0) l = -l;
        res.llr.v[i] = clamp_llr(l, opt.llr_cap);
    }
    ops.rm += static_cast<std::uint64_t>(res.llr.n);
    ops.rs += static_cast<std::uint64_t>(res.llr.n);
    return res;
}

}  // namespace

SphereResult sphere_demap_radius(const Observation& obs, const ConstellationSpec& spec, int d,
                                 const DemapOptions& opt) {
    if (!spec.proposed_angle)
        throw UnsupportedAngleError("sphere_demap: requires theta = arctan(1/sqrt(M))");
    require_noise(obs);
    if (d < 1 || 2 * d > spec.m)
        throw std::invalid_argument("sphere_demap: radius out of [1, M/2]");

    const bool vi = obs.h_i >= opt.erasure_eps;
    const bool vq = obs.h_q >= opt.erasure_eps;
    if (!vi && !vq) {
        SphereResult res;
        res.degenerate = true;
        res.llr.n = spec.bits_per_symbol;
        return res;
    }
    if (!vi || !vq) return sphere_1d_fallback(obs, spec, opt, vi);

    SphereResult res;
    res.llr.n = spec.bits_per_symbol;
    OpCounters& ops = res.ops;

    // step 1: lattice-domain equalization, one reciprocal + product + shift per axis
    const EqualizedObservation eq = equalize(obs, spec, opt);
    ops.ri += 2;
    ops.rm += 2;
    ops.rs += 2;

    // step 2: branch selection per axis, then one op per generated candidate value
    const WindowRange wi = window(eq.lat_i, spec.m, d);
    const WindowRange wq = window(eq.lat_q, spec.m, d);
    ops.rc += 4;

    const int n_cand = 4 * d;
    std::array<int, 64> point_buf;
    std::array<double, 64> dist_buf;
    std::vector<int> point_dyn;
    std::vector<double> dist_dyn;
    int* point = point_buf.data();
    double* dist = dist_buf.data();
    if (n_cand > 64) {
        point_dyn.resize(static_cast<std::size_t>(n_cand));
        dist_dyn.resize(static_cast<std::size_t>(n_cand));
        point = point_dyn.data();
        dist = dist_dyn.data();
    }
    {
        int c = 0;
        for (int t = wi.lo; t <= wi.hi; ++t) point[c++] = spec.point_of_t_i[t];
        for (int t = wq.lo; t <= wq.hi; ++t) point[c++] = spec.point_of_t_q[t];
    }
    ops.rs += static_cast<std::uint64_t>(n_cand);
    ops.cp += static_cast<std::uint64_t>(n_cand);

    // step 3: lattice-domain metrics; the common d1d_min^2 factor is folded
    // into the final per-bit scaling
    for (int c = 0; c < n_cand; ++c) {
        const int k = point[c];
        const double di = obs.h_i * (eq.lat_i - static_cast<double>(spec.pt_t_i[k]));
        const double dq = obs.h_q * (eq.lat_q - static_cast<double>(spec.pt_t_q[k]));
        dist[c] = di * di + dq * dq;
    }
    ops.rm += 4ULL * n_cand;
    ops.rs += 3ULL * n_cand;

    // step 4: global minimum, then one complementary minimum per bit
    int best = 0;
    for (int c = 1; c < n_cand; ++c)
        if (dist[c] < dist[best]) best = c;
    ops.rc += static_cast<std::uint64_t>(n_cand - 1);

    const std::uint16_t best_bits = spec.pt_bits[point[best]];
    const double scale = spec.d1d_min * spec.d1d_min / obs.sigma2;
    for (int i = 0; i < res.llr.n; ++i) {
        const int comp = ((best_bits >> i) & 1) ^ 1;
        double mc = kInf;  // stays infinite only when d is too small for coverage
        for (int c = 0; c < n_cand; ++c)
            if ((((spec.pt_bits[point[c]] >> i) & 1) == comp) && dist[c] < mc) mc = dist[c];
        ops.rc += static_cast<std::uint64_t>(n_cand - 2);
        double l = (mc - dist[best]) * scale;
        if (comp == 0) l = -l;
        res.llr.v[i] = clamp_llr(l, opt.llr_cap);
    }
    ops.rm += static_cast<std::uint64_t>(res.llr.n);
    ops.rs += static_cast<std::uint64_t>(res.llr.n);
    return res;
}

SphereResult sphere_demap(const Observation& obs, const ConstellationSpec& spec,
                          const DemapOptions& opt) {
    return sphere_demap_radius(obs, spec, spec.u / 2, opt);
}

LlrVector mmse_demap(const Observation& obs, const ConstellationSpec& spec,
                     const DemapOptions& opt) {
    require_noise(obs);
    LlrVector out;
    out.n = spec.bits_per_symbol;

    // effective real channel [y_i; y_q] = H [s_i; s_q] + n
    const double c = spec.cos_theta;
    const double s = spec.sin_theta;
    const double h11 = obs.h_i * c, h12 = -obs.h_i * s;
    const double h21 = obs.h_q * s, h22 = obs.h_q * c;

    // A = H Rs H' + Rn with Rs = I/2 and Rn = sigma^2/2 I
    const double hv = obs.sigma2 / 2.0;
    const double a11 = 0.5 * (h11 * h11 + h12 * h12) + hv;
    const double a12 = 0.5 * (h11 * h21 + h12 * h22);
    const double a22 = 0.5 * (h21 * h21 + h22 * h22) + hv;
    const double det = a11 * a22 - a12 * a12;
    if (!(det > 1e-300)) return out;  // no usable estimate: zero LLRs

    // G = Rs H' A^{-1}  (2x2)
    const double i11 = a22 / det, i12 = -a12 / det, i22 = a11 / det;
    const double g11 = 0.5 * (h11 * i11 + h21 * i12);
    const double g12 = 0.5 * (h11 * i12 + h21 * i22);
    const double g21 = 0.5 * (h12 * i11 + h22 * i12);
    const double g22 = 0.5 * (h12 * i12 + h22 * i22);

    const double est_i = g11 * obs.y_i + g12 * obs.y_q;
    const double est_q = g21 * obs.y_i + g22 * obs.y_q;

    // bias B = G H, residual interference + filtered noise per axis
    const double b11 = g11 * h11 + g12 * h21;
    const double b12 = g11 * h12 + g12 * h22;
    const double b21 = g21 * h11 + g22 * h21;
    const double b22 = g21 * h12 + g22 * h22;
    const double n_i = hv * (g11 * g11 + g12 * g12);
    const double n_q = hv * (g21 * g21 + g22 * g22);
    const double v_i = std::max(b12 * b12 * 0.5 + n_i, 1e-300);
    const double v_q = std::max(b21 * b21 * 0.5 + n_q, 1e-300);

    // independent 1D max-log per axis over the sqrt(M) levels
    const auto axis_llrs = [&](double est, double mu, double var, int axis) {
        for (int b = 0; b < spec.shift; ++b) {
            double m0 = kInf, m1 = kInf;
            for (int p = 0; p < spec.u; ++p) {
                const double e = est - mu * spec.level(p);
                const double dd = e * e;
                if ((spec.labeling.code_of_level[p] >> (spec.shift - 1 - b)) & 1)
                    m1 = std::min(m1, dd);
                else
                    m0 = std::min(m0, dd);
            }
            out.v[2 * b + axis] = clamp_llr((m1 - m0) / (2.0 * var), opt.llr_cap);
        }
    };
    axis_llrs(est_i, b11, v_i, 0);
    axis_llrs(est_q, b22, v_q, 1);
    return out;
}

}  // namespace ssd
