#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ssd/channel.hpp"
#include "ssd/complexity.hpp"
#include "ssd/constellation.hpp"

namespace ssd {

// Soft bit metrics for one symbol. llr[i] > 0 means bit b_i = 0 is more
// likely. Values are always finite: magnitudes are clamped at the cap from
// DemapOptions.
struct LlrVector {
    std::array<double, 8> v{};  // log2(M) <= 8
    int n = 0;

    int size() const { return n; }
    double operator[](int i) const { return v[i]; }
    const double* begin() const { return v.data(); }
    const double* end() const { return v.data() + n; }
    // hard decision under the sign convention above; exact zero decides 0
    int hard(int i) const { return v[i] < 0.0 ? 1 : 0; }
};

struct DemapOptions {
    double llr_cap = 50.0;      // clamp on |LLR|
    double erasure_eps = 1e-6;  // a gain below this counts as an erased axis
};

// Observation mapped into lattice coordinates, per axis. Invalid axes carry
// no information (erased or nearly so) and their value is left at zero.
struct EqualizedObservation {
    double lat_i = 0.0;
    double lat_q = 0.0;
    bool valid_i = false;
    bool valid_q = false;
};

// Inclusive integer interval of lattice values; always exactly 2d wide.
struct WindowRange {
    int lo = 0;
    int hi = 0;
    int count() const { return hi - lo + 1; }
};

struct Candidate {
    int t = 0;       // enumerated lattice value
    int axis = 0;    // 0 when enumerated from the I window, 1 from the Q window
    SymbolIndex sym;
    double dist = 0.0;  // squared metric of this point (same units as distance())
};

struct CandidateSet {
    WindowRange win_i, win_q;
    std::vector<Candidate> entries;  // I window first, ascending t, then Q window
};

// Squared 2D Euclidean metric between an observation and a faded point.
double distance(const Observation&, const RotatedPoint&);

// Coefficient of the s_i*s_q coupling term in the expanded metric; zero iff
// the two axes fade equally or the rotation is trivial.
double cross_term_coefficient(double h_i, double h_q, double theta);

// Seven-term algebraic expansion of the squared metric in terms of the
// unrotated coordinates. Slower than distance(); used to cross-check the
// joint-detection structure and as a test oracle.
double expanded_distance(const Observation&, double s_i, double s_q, double theta);

// Exact soft demapper: per-bit log-sum-exp over the full alphabet,
// numerically stabilized. The reference for everything else.
LlrVector llr_exact(const Observation&, const ConstellationSpec&, const DemapOptions& = {});

// Exhaustive max-log demapper over the full alphabet, any rotation angle.
// Erased axes need no special casing: a zero gain turns the axis term into a
// constant that cancels between cosets. Pass ops to record operation counts.
LlrVector llr_maxlog_full(const Observation&, const ConstellationSpec&, const DemapOptions& = {},
                          OpCounters* ops = nullptr);

// Per-axis linear transform into lattice coordinates. Requires the proposed
// angle. Throws DegenerateChannelError when both axes are below the erasure
// threshold.
EqualizedObservation equalize(const Observation&, const ConstellationSpec&,
                              const DemapOptions& = {});

// Search window of 2d consecutive lattice values around an equalized
// observation, clamped into [0, M-1].
WindowRange window(double lat, int m, int d);

// Candidate enumeration used by the windowed demapper, with metric values
// filled in; requires both axes valid. Mainly a test/diagnostic surface.
CandidateSet sphere_candidates(const Observation&, const ConstellationSpec&, int d,
                               const DemapOptions& = {});

struct SphereResult {
    LlrVector llr;
    OpCounters ops;
    bool degenerate = false;   // both axes erased; llr is all zeros
    bool fallback_1d = false;  // one axis erased; 1D scan over all M lattice values
};

// Windowed lattice demapper: equalize, enumerate 2d candidates around each
// axis, score them in lattice coordinates, then max-log per bit. The default
// radius sqrt(M)/2 guarantees every bit sees both values among candidates.
SphereResult sphere_demap(const Observation&, const ConstellationSpec&, const DemapOptions& = {});

// Same with an explicit window radius d in [1, M/2]. With d = M/2 the windows
// span the whole lattice and the result equals the exhaustive max-log search.
SphereResult sphere_demap_radius(const Observation&, const ConstellationSpec&, int d,
                                 const DemapOptions& = {});

// Decorrelating baseline: 2x2 linear MMSE estimate of the unrotated
// coordinates followed by independent per-axis 1D max-log. Cheap and
// noticeably worse than joint detection on rotated constellations.
LlrVector mmse_demap(const Observation&, const ConstellationSpec&, const DemapOptions& = {});

}  // namespace ssd
