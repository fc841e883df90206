#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ssd/constellation.hpp"
#include "ssd/demap.hpp"

namespace ssd {

enum class AngleMode { proposed, dvbt2, custom };
enum class DemapperKind { exact, maxlog, sphere, mmse };
enum class ChannelProfile { rayleigh, awgn };

std::string_view to_string(AngleMode);
std::string_view to_string(DemapperKind);
std::string_view to_string(ChannelProfile);
DemapperKind demapper_from(std::string_view);
ChannelProfile profile_from(std::string_view);

struct SimConfig {
    int m = 16;
    AngleMode angle_mode = AngleMode::proposed;
    double custom_angle_rad = 0.0;  // used when angle_mode == custom
    DemapperKind demapper = DemapperKind::sphere;
    DemapperKind ref_demapper = DemapperKind::maxlog;  // llr-compare only
    std::vector<double> esn0_grid{10.0};
    double erasure_prob = 0.0;
    ChannelProfile profile = ChannelProfile::rayleigh;
    bool coded = false;
    std::string ldpc_path;
    int ldpc_iters = 25;
    std::uint64_t frames = 1000;
    std::uint64_t stop_at_frame_errors = 200;  // 0 disables early stopping
    int symbols_per_frame = 252;               // uncoded frames
    std::uint64_t seed = 1;
    int workers = 1;
    double llr_cap = 50.0;

    // Resolves the angle mode against M.
    double angle() const;
    // Throws ConfigError on any inconsistency (including a sphere demapper
    // paired with a non-lattice angle).
    void validate() const;
    // Canonical "key = value" lines echoed into CSV headers. Excludes
    // execution details (workers, output path) so reruns compare bytewise.
    std::string echo() const;
    std::uint64_t hash() const;  // FNV-1a over echo()

    // Parses "a:b:step" or a comma list of dB values.
    static std::vector<double> parse_esn0(std::string_view);
    // "proposed", "dvbt2", or a number in radians.
    void set_angle(std::string_view);
    std::string angle_string() const;
};

struct Wilson {
    double lo = 0.0;
    double hi = 0.0;
};
// 95% Wilson score interval for a binomial proportion.
Wilson wilson_ci(std::uint64_t errors, std::uint64_t trials);

struct GridPointStats {
    double esn0_db = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t frames = 0;
    std::uint64_t frame_errors = 0;
    // Sum of squared per-frame bit-error counts; supports cluster-robust
    // uncertainty estimates for coded runs where errors arrive in bursts.
    std::uint64_t sum_sq_frame_errors = 0;
    double elapsed_s = 0.0;  // never serialized into the CSV

    double ber() const { return bits ? static_cast<double>(bit_errors) / bits : 0.0; }
    Wilson wilson() const { return wilson_ci(bit_errors, bits); }
};

struct SimReport {
    SimConfig config;
    std::vector<GridPointStats> points;
};

// Monte-Carlo BER over the configured Es/N0 grid. Deterministic for a given
// (config, seed) independently of the worker count: every frame runs on its
// own RNG substream and early stopping is evaluated at fixed chunk
// boundaries.
SimReport run_ber(const SimConfig&);
void write_ber_csv(const SimReport&, std::ostream&);

struct LlrCompareReport {
    SimConfig config;
    std::uint64_t bits = 0;
    std::uint64_t sign_agree = 0;
    double max_abs_delta = 0.0;
    double mean_abs_delta = 0.0;
    double q50 = 0.0, q90 = 0.0, q99 = 0.0;  // quantiles of |llr - ref|

    double agreement() const { return bits ? static_cast<double>(sign_agree) / bits : 1.0; }
};

// Runs both demappers on identical observations at the first grid point and
// compares per-bit LLRs. Streams one CSV row per (symbol, bit) when csv is
// non-null: demapper,bit,llr,ref_llr,agree.
LlrCompareReport run_llr_compare(const SimConfig&, std::ostream* csv);

// Operation-count table: algorithm,cp,rm,rs,rc,ri,source with source one of
// analytic, measured, paper.
void write_count_ops_csv(const SimConfig&, std::ostream&);

// Full alphabet dump: p_i,p_q,bits,s_i,s_q,z_i,z_q,t_i,t_q. Lattice columns
// are empty unless the angle is the proposed one.
void write_constellation_csv(const SimConfig&, std::ostream&);

}  // namespace ssd
