#include "ssd/sim.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>
#include <ostream>
#include <thread>

#include "ssd/channel.hpp"
#include "ssd/errors.hpp"
#include "ssd/fec.hpp"
#include "ssd/format.hpp"
#include "ssd/rng.hpp"

namespace ssd {

namespace {

constexpr std::uint64_t kChunkFrames = 512;  // early-stop granularity, worker independent

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

std::string_view to_string(AngleMode a) {
    switch (a) {
        case AngleMode::proposed: return "proposed";
        case AngleMode::dvbt2: return "dvbt2";
        case AngleMode::custom: return "custom";
    }
    return "?";
}

std::string_view to_string(DemapperKind d) {
    switch (d) {
        case DemapperKind::exact: return "exact";
        case DemapperKind::maxlog: return "maxlog";
        case DemapperKind::sphere: return "sphere";
        case DemapperKind::mmse: return "mmse";
    }
    return "?";
}

std::string_view to_string(ChannelProfile p) {
    return p == ChannelProfile::rayleigh ? "rayleigh" : "awgn";
}

DemapperKind demapper_from(std::string_view s) {
    if (s == "exact") return DemapperKind::exact;
    if (s == "maxlog") return DemapperKind::maxlog;
    if (s == "sphere") return DemapperKind::sphere;
    if (s == "mmse") return DemapperKind::mmse;
    throw ConfigError("unknown demapper: " + std::string(s));
}

ChannelProfile profile_from(std::string_view s) {
    if (s == "rayleigh") return ChannelProfile::rayleigh;
    if (s == "awgn") return ChannelProfile::awgn;
    throw ConfigError("unknown channel profile: " + std::string(s));
}

double SimConfig::angle() const {
    switch (angle_mode) {
        case AngleMode::proposed: return angle_for(m);
        case AngleMode::dvbt2: return dvbt2_angle(m);
        case AngleMode::custom: return custom_angle_rad;
    }
    return 0.0;
}

void SimConfig::set_angle(std::string_view s) {
    if (s == "proposed") {
        angle_mode = AngleMode::proposed;
        return;
    }
    if (s == "dvbt2") {
        angle_mode = AngleMode::dvbt2;
        return;
    }
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ConfigError("angle must be 'proposed', 'dvbt2' or radians: " + std::string(s));
    angle_mode = AngleMode::custom;
    custom_angle_rad = v;
}

std::string SimConfig::angle_string() const {
    if (angle_mode == AngleMode::custom) return fmt_g6(custom_angle_rad);
    return std::string(to_string(angle_mode));
}

std::vector<double> SimConfig::parse_esn0(std::string_view s) {
    std::vector<double> grid;
    const auto parse_one = [](std::string_view t) {
        double v = 0.0;
        const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
        if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
            throw ConfigError("bad Es/N0 value: " + std::string(t));
        return v;
    };
    if (s.find(':') != std::string_view::npos) {
        // a:b:step, inclusive
        const auto c1 = s.find(':');
        const auto c2 = s.find(':', c1 + 1);
        if (c2 == std::string_view::npos) throw ConfigError("esn0 range needs a:b:step");
        const double a = parse_one(s.substr(0, c1));
        const double b = parse_one(s.substr(c1 + 1, c2 - c1 - 1));
        const double step = parse_one(s.substr(c2 + 1));
        if (!(step > 0.0) || b < a) throw ConfigError("esn0 range needs a <= b and step > 0");
        const int count = static_cast<int>(std::floor((b - a) / step + 1e-9)) + 1;
        grid.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) grid.push_back(a + i * step);
        return grid;
    }
    std::size_t pos = 0;
    while (pos <= s.size()) {
        auto comma = s.find(',', pos);
        if (comma == std::string_view::npos) comma = s.size();
        if (comma > pos) grid.push_back(parse_one(s.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    if (grid.empty()) throw ConfigError("empty esn0 grid");
    return grid;
}

void SimConfig::validate() const {
    if (m != 4 && m != 16 && m != 64 && m != 256)
        throw ConfigError("m must be one of 4, 16, 64, 256");
    if (esn0_grid.empty()) throw ConfigError("esn0 grid must be non-empty");
    for (double e : esn0_grid)
        if (!std::isfinite(e)) throw ConfigError("esn0 values must be finite");
    if (!(erasure_prob >= 0.0 && erasure_prob < 1.0))
        throw ConfigError("erasure probability must be in [0, 1)");
    if (frames < 1) throw ConfigError("frames must be >= 1");
    if (symbols_per_frame < 1) throw ConfigError("symbols-per-frame must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (!(llr_cap > 0.0)) throw ConfigError("llr-cap must be > 0");
    if (ldpc_iters < 1) throw ConfigError("ldpc-iters must be >= 1");
    if (angle_mode == AngleMode::custom &&
        !(custom_angle_rad >= 0.0 && custom_angle_rad <= M_PI / 4.0 + 1e-15))
        throw ConfigError("custom angle must be in [0, pi/4] radians");
    if (coded && ldpc_path.empty()) throw ConfigError("coded runs need --ldpc PATH.alist");
    const bool needs_lattice =
        demapper == DemapperKind::sphere || ref_demapper == DemapperKind::sphere;
    if (needs_lattice && angle() != angle_for(m))
        throw ConfigError("the sphere demapper requires the proposed rotation angle");
}

std::string SimConfig::echo() const {
    std::string out;
    const auto kv = [&out](std::string_view k, const std::string& v) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    };
    kv("m", std::to_string(m));
    kv("angle", angle_string());
    kv("demapper", std::string(to_string(demapper)));
    kv("ref-demapper", std::string(to_string(ref_demapper)));
    std::string grid;
    for (std::size_t i = 0; i < esn0_grid.size(); ++i) {
        if (i) grid += ',';
        grid += fmt_g6(esn0_grid[i]);
    }
    kv("esn0", grid);
    kv("erasure", fmt_g6(erasure_prob));
    kv("channel", std::string(to_string(profile)));
    kv("coded", coded ? "1" : "0");
    kv("ldpc", ldpc_path);
    kv("ldpc-iters", std::to_string(ldpc_iters));
    kv("frames", std::to_string(frames));
    kv("stop-errors", std::to_string(stop_at_frame_errors));
    kv("symbols-per-frame", std::to_string(symbols_per_frame));
    kv("seed", std::to_string(seed));
    kv("llr-cap", fmt_g6(llr_cap));
    return out;
}

std::uint64_t SimConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : echo()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Wilson wilson_ci(std::uint64_t errors, std::uint64_t trials) {
    if (trials == 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(errors) / n;
    const double z2n = z * z / n;
    const double denom = 1.0 + z2n;
    const double center = (p + 0.5 * z2n) / denom;
    const double half = (z / denom) * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n));
    Wilson w{std::max(0.0, center - half), std::min(1.0, center + half)};
    if (errors == 0) w.lo = 0.0;  // keep the boundary cases exact
    if (errors == trials) w.hi = 1.0;
    return w;
}

namespace {

// Per-worker scratch buffers, reused across frames.
struct Scratch {
    std::vector<std::uint8_t> bits;
    std::vector<RotatedPoint> points;
    std::vector<CellPair> cells;
    std::vector<CellGain> gains;
    std::vector<Observation> obs;
    std::vector<double> llrs;
    std::vector<std::uint8_t> info;
    std::unique_ptr<MinSumDecoder> decoder;
};

struct FrameResult {
    std::uint32_t bits = 0;
    std::uint32_t bit_errors = 0;
};

class BerEngine {
  public:
    explicit BerEngine(const SimConfig& cfg) : cfg_(cfg), spec_(build_spec(cfg.m, cfg.angle())) {
        opt_.llr_cap = cfg.llr_cap;
        if (cfg_.coded) {
            code_ = load_alist_file(cfg_.ldpc_path);
            if (code_.n % spec_.bits_per_symbol != 0)
                throw ConfigError("code length is not a multiple of bits per symbol");
        }
    }

    const ConstellationSpec& spec() const { return spec_; }
    const ParityCheckMatrix& code() const { return code_; }

    LlrVector demap_one(DemapperKind kind, const Observation& o) const {
        switch (kind) {
            case DemapperKind::exact: return llr_exact(o, spec_, opt_);
            case DemapperKind::maxlog: return llr_maxlog_full(o, spec_, opt_);
            case DemapperKind::sphere: return sphere_demap(o, spec_, opt_).llr;
            case DemapperKind::mmse: return mmse_demap(o, spec_, opt_);
        }
        return {};
    }

    // Modulates the frame bits and fills sc with the channel output. Every
    // random draw comes from the frame's own substream.
    void run_channel(std::size_t grid_index, std::size_t n_symbols,
                     std::span<const std::uint8_t> frame_bits, Scratch& sc, Rng& rng) const {
        const int L = spec_.bits_per_symbol;
        sc.points.resize(n_symbols);
        for (std::size_t j = 0; j < n_symbols; ++j)
            sc.points[j] = map_bits(spec_, frame_bits.subspan(j * L, L));
        sc.cells = q_delay(sc.points);

        ChannelConfig ch;
        ch.esn0_db = cfg_.esn0_grid[grid_index];
        ch.erasure_prob = cfg_.erasure_prob;
        sc.gains = cfg_.profile == ChannelProfile::rayleigh
                       ? sample_channel(ch, n_symbols, rng)
                       : unit_gains(ch, n_symbols, rng);
        sc.obs = transmit(sc.cells, sc.gains, sigma_from_esn0(ch.esn0_db), rng);
    }

    FrameResult uncoded_frame(std::size_t gi, std::uint64_t f, Scratch& sc) const {
        Rng rng = Rng::frame_stream(cfg_.seed, gi, f);
        const int L = spec_.bits_per_symbol;
        const std::size_t nsym = static_cast<std::size_t>(cfg_.symbols_per_frame);
        sc.bits.resize(nsym * L);
        for (auto& b : sc.bits) b = rng.bernoulli(0.5) ? 1 : 0;
        run_channel(gi, nsym, sc.bits, sc, rng);

        FrameResult res;
        res.bits = static_cast<std::uint32_t>(nsym * L);
        for (std::size_t j = 0; j < nsym; ++j) {
            const LlrVector llr = demap_one(cfg_.demapper, sc.obs[j]);
            for (int i = 0; i < L; ++i)
                res.bit_errors += (llr.hard(i) != sc.bits[j * L + i]);
        }
        return res;
    }

    FrameResult coded_frame(std::size_t gi, std::uint64_t f, Scratch& sc) const {
        Rng rng = Rng::frame_stream(cfg_.seed, gi, f);
        const int L = spec_.bits_per_symbol;
        const int k = code_.info_bits();
        sc.info.resize(static_cast<std::size_t>(k));
        for (auto& b : sc.info) b = rng.bernoulli(0.5) ? 1 : 0;
        if (code_.staircase) {
            sc.bits = encode(code_, sc.info);
        } else {
            // all-zero codeword fallback, valid for BER of linear codes under
            // symmetric LLR noise
            std::fill(sc.info.begin(), sc.info.end(), 0);
            sc.bits.assign(static_cast<std::size_t>(code_.n), 0);
        }
        const std::size_t nsym = static_cast<std::size_t>(code_.n) / L;
        run_channel(gi, nsym, sc.bits, sc, rng);

        sc.llrs.resize(static_cast<std::size_t>(code_.n));
        for (std::size_t j = 0; j < nsym; ++j) {
            const LlrVector llr = demap_one(cfg_.demapper, sc.obs[j]);
            for (int i = 0; i < L; ++i) sc.llrs[j * L + i] = llr[i];
        }
        if (!sc.decoder) sc.decoder = std::make_unique<MinSumDecoder>(code_);
        DecoderConfig dec;
        dec.max_iters = cfg_.ldpc_iters;
        const DecodeResult out = sc.decoder->decode(sc.llrs, dec);

        FrameResult res;
        res.bits = static_cast<std::uint32_t>(k);
        for (int i = 0; i < k; ++i)
            res.bit_errors += (out.bits[static_cast<std::size_t>(i)] != sc.info[static_cast<std::size_t>(i)]);
        return res;
    }

    FrameResult frame(std::size_t gi, std::uint64_t f, Scratch& sc) const {
        return cfg_.coded ? coded_frame(gi, f, sc) : uncoded_frame(gi, f, sc);
    }

    GridPointStats run_point(std::size_t gi) const {
        GridPointStats st;
        st.esn0_db = cfg_.esn0_grid[gi];
        const double t0 = now_seconds();

        std::uint64_t f = 0;
        const auto stopped = [&] {
            return cfg_.stop_at_frame_errors > 0 && st.frame_errors >= cfg_.stop_at_frame_errors;
        };
        while (f < cfg_.frames && !stopped()) {
            const std::uint64_t end = std::min(cfg_.frames, f + kChunkFrames);
            if (cfg_.workers <= 1) {
                Scratch sc;
                for (; f < end; ++f) accumulate(st, frame(gi, f, sc));
            } else {
                std::atomic<std::uint64_t> next{f};
                std::mutex mu;
                std::vector<std::thread> pool;
                pool.reserve(static_cast<std::size_t>(cfg_.workers));
                for (int w = 0; w < cfg_.workers; ++w) {
                    pool.emplace_back([&] {
                        Scratch sc;
                        GridPointStats local;
                        for (;;) {
                            const std::uint64_t i = next.fetch_add(1);
                            if (i >= end) break;
                            accumulate(local, frame(gi, i, sc));
                        }
                        const std::lock_guard<std::mutex> lock(mu);
                        st.bits += local.bits;
                        st.bit_errors += local.bit_errors;
                        st.frames += local.frames;
                        st.frame_errors += local.frame_errors;
                        st.sum_sq_frame_errors += local.sum_sq_frame_errors;
                    });
                }
                for (auto& t : pool) t.join();
                f = end;
            }
        }
        st.elapsed_s = now_seconds() - t0;
        return st;
    }

  private:
    static void accumulate(GridPointStats& st, const FrameResult& r) {
        st.bits += r.bits;
        st.bit_errors += r.bit_errors;
        st.frames += 1;
        st.frame_errors += (r.bit_errors > 0);
        st.sum_sq_frame_errors += static_cast<std::uint64_t>(r.bit_errors) * r.bit_errors;
    }

    SimConfig cfg_;
    ConstellationSpec spec_;
    ParityCheckMatrix code_;
    DemapOptions opt_;
};

}  // namespace

SimReport run_ber(const SimConfig& cfg) {
    cfg.validate();
    BerEngine engine(cfg);
    SimReport report;
    report.config = cfg;
    report.points.reserve(cfg.esn0_grid.size());
    for (std::size_t gi = 0; gi < cfg.esn0_grid.size(); ++gi)
        report.points.push_back(engine.run_point(gi));
    return report;
}

namespace {

void write_echo(const SimConfig& cfg, std::string_view subcommand, std::ostream& os) {
    os << "# ssd-lab " << subcommand << '\n';
    std::string echo = cfg.echo();
    std::size_t pos = 0;
    while (pos < echo.size()) {
        auto nl = echo.find('\n', pos);
        os << "# " << echo.substr(pos, nl - pos) << '\n';
        pos = nl + 1;
    }
    char hex[19];
    std::snprintf(hex, sizeof hex, "0x%016llx",
                  static_cast<unsigned long long>(cfg.hash()));
    os << "# config-hash = " << hex << '\n';
}

}  // namespace

void write_ber_csv(const SimReport& report, std::ostream& os) {
    write_echo(report.config, "ber", os);
    os << "esn0_db,bits,bit_errors,ber,wilson_lo,wilson_hi,frames,frame_errors\n";
    for (const auto& p : report.points) {
        const Wilson w = p.wilson();
        os << fmt_g6(p.esn0_db) << ',' << p.bits << ',' << p.bit_errors << ',' << fmt_g6(p.ber())
           << ',' << fmt_g6(w.lo) << ',' << fmt_g6(w.hi) << ',' << p.frames << ','
           << p.frame_errors << '\n';
    }
}

LlrCompareReport run_llr_compare(const SimConfig& cfg, std::ostream* csv) {
    cfg.validate();
    if (cfg.coded) throw ConfigError("llr-compare runs uncoded");
    BerEngine engine(cfg);
    const ConstellationSpec& spec = engine.spec();
    const int L = spec.bits_per_symbol;
    const std::size_t gi = 0;

    if (csv) {
        write_echo(cfg, "llr-compare", *csv);
        *csv << "demapper,bit,llr,ref_llr,agree\n";
    }

    LlrCompareReport rep;
    rep.config = cfg;
    std::vector<double> abs_deltas;
    double sum_abs = 0.0;

    // Frame slots are flushed in order, so the CSV layout is independent of
    // the worker count.
    struct Slot {
        std::uint64_t bits = 0, agree = 0;
        double max_abs = 0.0, sum_abs = 0.0;
        std::vector<double> deltas;
        std::string rows;
    };

    const std::string demapper_name(to_string(cfg.demapper));
    const auto run_frame = [&](std::uint64_t f, Scratch& sc, Slot& slot) {
        Rng rng = Rng::frame_stream(cfg.seed, gi, f);
        const std::size_t nsym = static_cast<std::size_t>(cfg.symbols_per_frame);
        sc.bits.resize(nsym * static_cast<std::size_t>(L));
        for (auto& b : sc.bits) b = rng.bernoulli(0.5) ? 1 : 0;
        engine.run_channel(gi, nsym, sc.bits, sc, rng);
        for (std::size_t j = 0; j < nsym; ++j) {
            const LlrVector a = engine.demap_one(cfg.demapper, sc.obs[j]);
            const LlrVector b = engine.demap_one(cfg.ref_demapper, sc.obs[j]);
            for (int i = 0; i < L; ++i) {
                const double delta = std::fabs(a[i] - b[i]);
                const bool agree = a.hard(i) == b.hard(i);
                slot.bits += 1;
                slot.agree += agree;
                slot.max_abs = std::max(slot.max_abs, delta);
                slot.sum_abs += delta;
                slot.deltas.push_back(delta);
                if (csv) {
                    slot.rows += demapper_name;
                    slot.rows += ',';
                    slot.rows += std::to_string(i);
                    slot.rows += ',';
                    slot.rows += fmt_g6(a[i]);
                    slot.rows += ',';
                    slot.rows += fmt_g6(b[i]);
                    slot.rows += ',';
                    slot.rows += agree ? '1' : '0';
                    slot.rows += '\n';
                }
            }
        }
    };

    std::uint64_t f = 0;
    while (f < cfg.frames) {
        const std::uint64_t end = std::min(cfg.frames, f + kChunkFrames);
        std::vector<Slot> slots(static_cast<std::size_t>(end - f));
        if (cfg.workers <= 1) {
            Scratch sc;
            for (std::uint64_t i = f; i < end; ++i) run_frame(i, sc, slots[i - f]);
        } else {
            std::atomic<std::uint64_t> next{f};
            std::vector<std::thread> pool;
            for (int w = 0; w < cfg.workers; ++w) {
                pool.emplace_back([&] {
                    Scratch sc;
                    for (;;) {
                        const std::uint64_t i = next.fetch_add(1);
                        if (i >= end) break;
                        run_frame(i, sc, slots[i - f]);
                    }
                });
            }
            for (auto& t : pool) t.join();
        }
        for (auto& slot : slots) {
            rep.bits += slot.bits;
            rep.sign_agree += slot.agree;
            rep.max_abs_delta = std::max(rep.max_abs_delta, slot.max_abs);
            sum_abs += slot.sum_abs;
            abs_deltas.insert(abs_deltas.end(), slot.deltas.begin(), slot.deltas.end());
            if (csv) *csv << slot.rows;
        }
        f = end;
    }

    rep.mean_abs_delta = rep.bits ? sum_abs / static_cast<double>(rep.bits) : 0.0;
    if (!abs_deltas.empty()) {
        const auto quantile = [&](double q) {
            const auto idx = static_cast<std::size_t>(
                std::llround(q * static_cast<double>(abs_deltas.size() - 1)));
            std::nth_element(abs_deltas.begin(), abs_deltas.begin() + static_cast<std::ptrdiff_t>(idx),
                             abs_deltas.end());
            return abs_deltas[idx];
        };
        rep.q50 = quantile(0.50);
        rep.q90 = quantile(0.90);
        rep.q99 = quantile(0.99);
    }
    return rep;
}

void write_count_ops_csv(const SimConfig& cfg, std::ostream& os) {
    cfg.validate();
    write_echo(cfg, "count-ops", os);
    os << "algorithm,cp,rm,rs,rc,ri,source\n";
    const auto row = [&os](std::string_view algo, const OpCounters& c, std::string_view source) {
        os << algo << ',' << c.cp << ',' << c.rm << ',' << c.rs << ',' << c.rc << ',' << c.ri
           << ',' << source << '\n';
    };

    // a fixed, interior-window observation for the measured rows; counters do
    // not depend on the input
    const ConstellationSpec spec = build_spec(cfg.m, angle_for(cfg.m));
    const int k = spec.m / 2 + 1;
    Observation obs;
    obs.h_i = 0.9;
    obs.h_q = 1.2;
    obs.y_i = obs.h_i * spec.pt_z_i[k] + 0.01;
    obs.y_q = obs.h_q * spec.pt_z_q[k] - 0.02;
    obs.sigma2 = sigma_from_esn0(15.0);

    {
        OpCounters measured;
        (void)llr_maxlog_full(obs, spec, DemapOptions{}, &measured);
        row("maxlog", analytic_cost(cfg.m, CostModel::maxlog_full), "analytic");
        row("maxlog", measured, "measured");
        if (cfg.m == 256) row("maxlog", analytic_cost(256, CostModel::maxlog_full), "paper");
    }
    if (cfg.m == 256) {
        row("subregion", analytic_cost(256, CostModel::subregion_ref), "paper");
        row("mmse", analytic_cost(256, CostModel::mmse_ref), "paper");
        row("pddem", analytic_cost(256, CostModel::pddem_ref), "paper");
    }
    {
        const SphereResult res = sphere_demap(obs, spec);
        row("sphere", analytic_cost(cfg.m, CostModel::sphere), "analytic");
        row("sphere", res.ops, "measured");
        if (cfg.m == 256) row("sphere", analytic_cost(256, CostModel::sphere), "paper");
    }
}

void write_constellation_csv(const SimConfig& cfg, std::ostream& os) {
    cfg.validate();
    write_echo(cfg, "dump-constellation", os);
    const ConstellationSpec spec = build_spec(cfg.m, cfg.angle());
    os << "p_i,p_q,bits,s_i,s_q,z_i,z_q,t_i,t_q\n";
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(spec.bits_per_symbol));
    for (int pi = 0; pi < spec.u; ++pi) {
        for (int pq = 0; pq < spec.u; ++pq) {
            const SymbolIndex s{pi, pq};
            const int k = spec.point_index(s);
            bits_of_symbol(spec, s, bits);
            std::string bitstr;
            for (auto b : bits) bitstr += static_cast<char>('0' + b);
            os << pi << ',' << pq << ',' << bitstr << ',' << fmt_g6(spec.level(pi)) << ','
               << fmt_g6(spec.level(pq)) << ',' << fmt_g6(spec.pt_z_i[k]) << ','
               << fmt_g6(spec.pt_z_q[k]) << ',';
            if (spec.proposed_angle)
                os << spec.pt_t_i[k] << ',' << spec.pt_t_q[k];
            else
                os << ',';
            os << '\n';
        }
    }
}

}  // namespace ssd
