// ssd-lab: simulator CLI for rotated, cyclic-Q-delayed QAM.
//
// Subcommands: ber, llr-compare, count-ops, dump-constellation. Every option
// can also be set from a flat "key = value" config file (--config), with
// command-line flags taking precedence.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "ssd/errors.hpp"
#include "ssd/format.hpp"
#include "ssd/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct Options {
    ssd::SimConfig sim;
    std::string angle = "proposed";
    std::string demapper = "sphere";
    std::string ref_demapper = "maxlog";
    std::string esn0 = "10";
    std::string channel = "rayleigh";
    std::string out;
};

void add_common_options(CLI::App* cmd, Options& o) {
    cmd->set_config("--config")->description("flat key = value config file");
    cmd->add_option("--m", o.sim.m, "modulation order: 4, 16, 64 or 256");
    cmd->add_option("--angle", o.angle, "proposed | dvbt2 | rotation angle in radians");
    cmd->add_option("--demapper", o.demapper, "sphere | maxlog | exact | mmse");
    cmd->add_option("--ref-demapper", o.ref_demapper, "reference demapper (llr-compare)");
    cmd->add_option("--esn0", o.esn0, "Es/N0 grid in dB: a:b:step or comma list");
    cmd->add_option("--erasure", o.sim.erasure_prob, "per-cell erasure probability");
    cmd->add_option("--channel", o.channel, "rayleigh | awgn");
    cmd->add_flag("--coded", o.sim.coded, "run the LDPC-coded chain");
    cmd->add_option("--ldpc", o.sim.ldpc_path, "parity-check matrix (alist)");
    cmd->add_option("--ldpc-iters", o.sim.ldpc_iters, "min-sum iterations");
    cmd->add_option("--frames", o.sim.frames, "frame budget per grid point");
    cmd->add_option("--stop-errors", o.sim.stop_at_frame_errors,
                    "stop a grid point after this many frame errors (0 = never)");
    cmd->add_option("--symbols-per-frame", o.sim.symbols_per_frame, "uncoded frame length");
    cmd->add_option("--seed", o.sim.seed, "master RNG seed");
    cmd->add_option("--workers", o.sim.workers, "worker threads (result-invariant)");
    cmd->add_option("--llr-cap", o.sim.llr_cap, "clamp on |LLR|");
    cmd->add_option("--out", o.out, "output CSV path (default: stdout)");
}

void resolve(Options& o) {
    o.sim.set_angle(o.angle);
    o.sim.demapper = ssd::demapper_from(o.demapper);
    o.sim.ref_demapper = ssd::demapper_from(o.ref_demapper);
    o.sim.esn0_grid = ssd::SimConfig::parse_esn0(o.esn0);
    o.sim.profile = ssd::profile_from(o.channel);
    o.sim.validate();
}

// Output sink: stdout unless --out was given.
class Sink {
  public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw ssd::IoError("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    void finish() {
        stream().flush();
        if (file_.is_open() && !file_) throw ssd::IoError("write failed");
        if (!file_.is_open() && !std::cout) throw ssd::IoError("write to stdout failed");
    }

  private:
    std::ofstream file_;
};

int run_ber_cmd(Options& o) {
    resolve(o);
    const ssd::SimReport report = ssd::run_ber(o.sim);
    Sink sink(o.out);
    ssd::write_ber_csv(report, sink.stream());
    sink.finish();
    double elapsed = 0.0;
    for (const auto& p : report.points) elapsed += p.elapsed_s;
    std::cerr << "ber: " << report.points.size() << " grid points, " << ssd::fmt_g6(elapsed)
              << " s\n";
    return kExitOk;
}

int run_llr_compare_cmd(Options& o) {
    resolve(o);
    Sink sink(o.out);
    const ssd::LlrCompareReport rep = ssd::run_llr_compare(o.sim, &sink.stream());
    sink.finish();
    std::cerr << "llr-compare: " << rep.bits << " bits, sign agreement "
              << ssd::fmt_g6(rep.agreement()) << ", |delta| mean " << ssd::fmt_g6(rep.mean_abs_delta)
              << " p50 " << ssd::fmt_g6(rep.q50) << " p90 " << ssd::fmt_g6(rep.q90) << " p99 "
              << ssd::fmt_g6(rep.q99) << " max " << ssd::fmt_g6(rep.max_abs_delta) << "\n";
    return kExitOk;
}

int run_count_ops_cmd(Options& o) {
    resolve(o);
    Sink sink(o.out);
    ssd::write_count_ops_csv(o.sim, sink.stream());
    sink.finish();
    // reduction summary vs the exhaustive search, stderr only
    const ssd::OpCounters sphere = ssd::analytic_cost(o.sim.m, ssd::CostModel::sphere);
    const ssd::OpCounters full = ssd::analytic_cost(o.sim.m, ssd::CostModel::maxlog_full);
    std::cerr << "reduction vs maxlog:";
    for (const auto& e : ssd::reduction_report(sphere, full))
        std::cerr << ' ' << e.field << ' ' << ssd::fmt_g6(e.percent) << "% (~" << e.nearest << ")";
    std::cerr << '\n';
    return kExitOk;
}

int run_dump_cmd(Options& o) {
    resolve(o);
    Sink sink(o.out);
    ssd::write_constellation_csv(o.sim, sink.stream());
    sink.finish();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rotated cyclic-Q-delayed QAM simulation lab"};
    app.require_subcommand(1);

    Options o;
    int (*handler)(Options&) = nullptr;

    CLI::App* ber = app.add_subcommand("ber", "Monte-Carlo BER over an Es/N0 grid");
    add_common_options(ber, o);
    ber->callback([&] { handler = run_ber_cmd; });

    CLI::App* cmp = app.add_subcommand("llr-compare", "per-bit LLR agreement of two demappers");
    add_common_options(cmp, o);
    cmp->callback([&] { handler = run_llr_compare_cmd; });

    CLI::App* ops = app.add_subcommand("count-ops", "operation-count table for the demappers");
    add_common_options(ops, o);
    ops->callback([&] { handler = run_count_ops_cmd; });

    CLI::App* dump = app.add_subcommand("dump-constellation", "alphabet dump as CSV");
    add_common_options(dump, o);
    dump->callback([&] { handler = run_dump_cmd; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        return handler(o);
    } catch (const ssd::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ssd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
}
