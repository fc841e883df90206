#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ssd/errors.hpp"
#include "ssd/sim.hpp"

using namespace ssd;

namespace {

std::string ber_csv(const SimConfig& cfg) {
    std::ostringstream os;
    write_ber_csv(run_ber(cfg), os);
    return os.str();
}

double q_func(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("wilson interval") {
    const Wilson w = wilson_ci(0, 1000);
    CHECK(w.lo == 0.0);
    CHECK(w.hi > 0.0);
    CHECK(w.hi < 0.01);

    const Wilson all = wilson_ci(1000, 1000);
    CHECK(all.hi == 1.0);
    CHECK(all.lo > 0.99);

    // standard reference value for 5/100
    const Wilson w5 = wilson_ci(5, 100);
    CHECK(w5.lo == doctest::Approx(0.0215).epsilon(0.02));
    CHECK(w5.hi == doctest::Approx(0.1118).epsilon(0.02));
}

TEST_CASE("esn0 grid parsing") {
    CHECK(SimConfig::parse_esn0("10:20:5") == std::vector<double>{10, 15, 20});
    CHECK(SimConfig::parse_esn0("7") == std::vector<double>{7});
    CHECK(SimConfig::parse_esn0("1,2.5,4") == std::vector<double>{1.0, 2.5, 4.0});
    CHECK_THROWS_AS(SimConfig::parse_esn0("a:b:c"), ConfigError);
    CHECK_THROWS_AS(SimConfig::parse_esn0("10:5:1"), ConfigError);
    CHECK_THROWS_AS(SimConfig::parse_esn0(""), ConfigError);
}

TEST_CASE("config validation") {
    SimConfig cfg;
    cfg.validate();  // defaults are fine

    SimConfig bad = cfg;
    bad.m = 32;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = cfg;
    bad.erasure_prob = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = cfg;
    bad.coded = true;
    CHECK_THROWS_AS(bad.validate(), ConfigError);  // no matrix path

    // the windowed demapper needs the lattice angle
    bad = cfg;
    bad.m = 16;
    bad.angle_mode = AngleMode::dvbt2;
    bad.demapper = DemapperKind::sphere;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad.m = 256;  // the one order where the standard angle is the lattice angle
    bad.validate();

    bad = cfg;
    bad.set_angle("0.1");
    CHECK(bad.angle_mode == AngleMode::custom);
    CHECK(bad.custom_angle_rad == 0.1);
    CHECK_THROWS_AS(bad.set_angle("fast"), ConfigError);
}

TEST_CASE("uncoded QPSK on the unfaded channel matches the closed form") {
    SimConfig cfg;
    cfg.m = 4;
    cfg.set_angle("0");  // conventional QAM baseline
    cfg.demapper = DemapperKind::maxlog;
    cfg.profile = ChannelProfile::awgn;
    cfg.esn0_grid = {10.0};
    cfg.frames = 1500;
    cfg.stop_at_frame_errors = 0;
    cfg.symbols_per_frame = 256;
    cfg.seed = 9;

    const SimReport rep = run_ber(cfg);
    const auto& p = rep.points[0];
    const double expect = q_func(std::sqrt(10.0));  // per-bit error rate at Es/N0 = 10 dB
    const Wilson w = p.wilson();
    CHECK(p.bits == 1500u * 512u);
    CHECK(w.lo <= expect);
    CHECK(w.hi >= expect);
}

TEST_CASE("BER is monotone over the grid within confidence") {
    SimConfig cfg;
    cfg.m = 16;
    cfg.demapper = DemapperKind::sphere;
    cfg.esn0_grid = {5.0, 10.0, 15.0, 20.0};
    cfg.frames = 400;
    cfg.stop_at_frame_errors = 0;
    cfg.symbols_per_frame = 128;
    cfg.seed = 4;
    const SimReport rep = run_ber(cfg);
    for (std::size_t i = 0; i + 1 < rep.points.size(); ++i) {
        const Wilson a = rep.points[i].wilson();
        const Wilson b = rep.points[i + 1].wilson();
        CHECK(b.lo <= a.hi);  // next point is not significantly above the previous
    }
}

TEST_CASE("reruns and worker counts do not change the CSV") {
    SimConfig cfg;
    cfg.m = 16;
    cfg.demapper = DemapperKind::sphere;
    cfg.erasure_prob = 0.15;
    cfg.esn0_grid = {12.0, 18.0};
    cfg.frames = 600;  // spans two scheduling chunks
    cfg.stop_at_frame_errors = 0;
    cfg.symbols_per_frame = 64;
    cfg.seed = 31;

    cfg.workers = 1;
    const std::string once = ber_csv(cfg);
    const std::string twice = ber_csv(cfg);
    CHECK(once == twice);

    cfg.workers = 2;
    CHECK(ber_csv(cfg) == once);
    cfg.workers = 3;
    CHECK(ber_csv(cfg) == once);

    // early stopping also lands on the same frames regardless of workers
    cfg.stop_at_frame_errors = 50;
    cfg.workers = 1;
    const std::string stop1 = ber_csv(cfg);
    cfg.workers = 3;
    CHECK(ber_csv(cfg) == stop1);
}

TEST_CASE("llr-compare: identical demappers and near-noiseless agreement") {
    SimConfig cfg;
    cfg.m = 16;
    cfg.demapper = DemapperKind::sphere;
    cfg.ref_demapper = DemapperKind::maxlog;
    cfg.profile = ChannelProfile::awgn;
    cfg.esn0_grid = {200.0};  // effectively noiseless
    cfg.frames = 4;
    cfg.symbols_per_frame = 256;
    cfg.seed = 12;

    const LlrCompareReport rep = run_llr_compare(cfg, nullptr);
    CHECK(rep.agreement() == 1.0);
    CHECK(rep.max_abs_delta == 0.0);  // both demappers sit at the clamp

    // CSV shape and worker invariance
    std::ostringstream a, b;
    cfg.esn0_grid = {15.0};
    cfg.profile = ChannelProfile::rayleigh;
    (void)run_llr_compare(cfg, &a);
    cfg.workers = 2;
    (void)run_llr_compare(cfg, &b);
    CHECK(a.str() == b.str());
    CHECK(a.str().find("demapper,bit,llr,ref_llr,agree\n") != std::string::npos);
    CHECK(a.str().find("sphere,0,") != std::string::npos);
}

TEST_CASE("windowed vs exhaustive demapper agreement, pinned") {
    // 1e5 fading draws at 15 dB for the largest order: hard decisions agreed
    // on every draw when this was first measured; pinned as a regression.
    SimConfig cfg;
    cfg.m = 256;
    cfg.demapper = DemapperKind::sphere;
    cfg.ref_demapper = DemapperKind::maxlog;
    cfg.esn0_grid = {15.0};
    cfg.frames = 100;
    cfg.symbols_per_frame = 1000;
    cfg.seed = 1515;
    cfg.workers = 2;
    const LlrCompareReport rep = run_llr_compare(cfg, nullptr);
    CHECK(rep.bits == 800000u);
    CHECK(rep.agreement() == 1.0);
}

TEST_CASE("count-ops CSV carries the closed-form table") {
    SimConfig cfg;
    cfg.m = 256;
    std::ostringstream os;
    write_count_ops_csv(cfg, os);
    const std::string csv = os.str();
    CHECK(csv.find("algorithm,cp,rm,rs,rc,ri,source\n") != std::string::npos);
    CHECK(csv.find("sphere,32,138,138,275,2,analytic\n") != std::string::npos);
    CHECK(csv.find("sphere,32,138,138,275,2,measured\n") != std::string::npos);
    CHECK(csv.find("sphere,32,138,138,275,2,paper\n") != std::string::npos);
    CHECK(csv.find("maxlog,256,1032,776,2048,0,analytic\n") != std::string::npos);
    CHECK(csv.find("maxlog,256,1032,776,2048,0,measured\n") != std::string::npos);
    CHECK(csv.find("mmse,16,64,48,128,6,paper\n") != std::string::npos);
    CHECK(csv.find("subregion,81,332,251,648,0,paper\n") != std::string::npos);
    CHECK(csv.find("pddem,80,390,279,231,0,paper\n") != std::string::npos);

    // smaller orders still get analytic + measured rows
    cfg.m = 16;
    std::ostringstream os16;
    write_count_ops_csv(cfg, os16);
    CHECK(os16.str().find("sphere,8,38,38,35,2,analytic\n") != std::string::npos);
    CHECK(os16.str().find("sphere,8,38,38,35,2,measured\n") != std::string::npos);
    CHECK(os16.str().find("paper") == std::string::npos);
}

TEST_CASE("constellation dump") {
    SimConfig cfg;
    cfg.m = 4;
    std::ostringstream os;
    write_constellation_csv(cfg, os);
    const std::string csv = os.str();
    CHECK(csv.find("p_i,p_q,bits,s_i,s_q,z_i,z_q,t_i,t_q\n") != std::string::npos);

    // four rows, lattice columns a permutation of 0..3 on each axis
    std::istringstream in(csv);
    std::string line;
    int rows = 0;
    std::set<std::string> tis, tqs;
    std::set<std::string> zis;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'p') continue;
        ++rows;
        // split
        std::vector<std::string> f;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            auto c = line.find(',', pos);
            if (c == std::string::npos) c = line.size();
            f.push_back(line.substr(pos, c - pos));
            pos = c + 1;
        }
        REQUIRE(f.size() == 9);
        tis.insert(f[7]);
        tqs.insert(f[8]);
        zis.insert(f[5]);
        CHECK(f[2].size() == 2);  // log2(4) bits
    }
    CHECK(rows == 4);
    CHECK(tis == std::set<std::string>{"0", "1", "2", "3"});
    CHECK(tqs == std::set<std::string>{"0", "1", "2", "3"});
    CHECK(zis.size() == 4);  // all projections distinct

    // a non-lattice angle leaves the lattice columns empty
    cfg.m = 16;
    cfg.angle_mode = AngleMode::dvbt2;
    cfg.demapper = DemapperKind::maxlog;
    std::ostringstream os2;
    write_constellation_csv(cfg, os2);
    std::istringstream in2(os2.str());
    int empty_rows = 0, data_rows = 0;
    while (std::getline(in2, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'p') continue;
        ++data_rows;
        if (line.size() >= 2 && line.substr(line.size() - 2) == ",,") ++empty_rows;
    }
    CHECK(data_rows == 16);
    CHECK(empty_rows == 16);
}

TEST_CASE("config echo and hash ignore execution details") {
    SimConfig a;
    a.workers = 1;
    SimConfig b = a;
    b.workers = 8;
    CHECK(a.echo() == b.echo());
    CHECK(a.hash() == b.hash());

    b.seed = 999;
    CHECK(a.hash() != b.hash());
}
