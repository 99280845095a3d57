#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qsens/io.hpp"
#include "support/oracles.hpp"

using namespace qsens;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const char* name) {
    fs::path dir = fs::temp_directory_path() / "qsens_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("controller JSON round-trip is bit-exact") {
    const fs::path dir = fresh_dir("roundtrip");
    Rng rng(81);

    StoredController sc;
    sc.id = "p1_tf2_k6_r0000";
    sc.problem = 1;
    sc.ctrl = testing::random_controller(4, 6, 2.0, rng);
    sc.ctrl.f(0, 0) = 1e-17; // awkward magnitudes must survive
    sc.ctrl.f(1, 2) = -0.1 + 1e-18;
    sc.ctrl.f(2, 3) = 12345.678901234567;
    sc.seed = 0xDEADBEEFCAFEBABEull;
    sc.init = InitStrategy::uniform;
    sc.eps = 3.0283598556306461e-05;

    const std::string path = (dir / "c.json").string();
    save_controller(path, sc);
    const StoredController back = load_controller(path);

    CHECK(back.id == sc.id);
    CHECK(back.problem == sc.problem);
    CHECK(back.seed == sc.seed);
    CHECK(back.init == sc.init);
    CHECK(back.eps == sc.eps);
    CHECK(back.ctrl.t_f == sc.ctrl.t_f);
    CHECK(back.ctrl.steps == sc.ctrl.steps);
    CHECK(back.ctrl.fields == sc.ctrl.fields); // exact doubles

    // saving the loaded controller again reproduces the bytes
    const std::string path2 = (dir / "c2.json").string();
    save_controller(path2, back);
    CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("field round-trips are exact for random magnitudes") {
    const fs::path dir = fresh_dir("roundtrip_prop");
    Rng rng(83);
    StoredController sc;
    sc.id = "prop";
    sc.problem = 1;
    sc.ctrl = Controller(4, 25, 2.0);
    for (double& v : sc.ctrl.fields) {
        // spread mantissas across ~60 decades
        const double mag = std::pow(10.0, -30.0 + 60.0 * rng.uniform());
        v = (rng.uniform() < 0.5 ? -1.0 : 1.0) * mag * (0.5 + rng.uniform());
    }
    const std::string path = (dir / "p.json").string();
    save_controller(path, sc);
    CHECK(load_controller(path).ctrl.fields == sc.ctrl.fields);
}

TEST_CASE("controller loader rejects malformed files") {
    const fs::path dir = fresh_dir("badjson");
    CHECK_THROWS_AS(load_controller((dir / "missing.json").string()), io_error);

    std::ofstream(dir / "garbage.json") << "not json at all";
    CHECK_THROWS_AS(load_controller((dir / "garbage.json").string()), io_error);

    std::ofstream(dir / "wrong.json") << "{\"format\":\"other.v9\"}";
    CHECK_THROWS_AS(load_controller((dir / "wrong.json").string()), io_error);
}

TEST_CASE("records CSV round-trip and schema validation") {
    const fs::path dir = fresh_dir("records");
    std::vector<RobustnessRecord> recs(2);
    recs[0].id = "a";
    recs[0].eps = 1.25e-4;
    recs[0].b_vu = 3.5;
    recs[0].b_static = 1.75;
    recs[0].log_sens_norm = 42.0;
    recs[0].delta_bar = 0.037;
    recs[0].delta_bar_lower_bound = false;
    recs[0].step = 1e-3;
    recs[0].seed = 7;
    recs[0].init = "normal";
    recs[1] = recs[0];
    recs[1].id = "b";
    recs[1].delta_bar_lower_bound = true;

    const std::string path = (dir / "records.csv").string();
    write_records_csv(path, recs);

    // RFC 4180 line endings
    const std::string raw = slurp(path);
    CHECK(raw.find("\r\n") != std::string::npos);

    const auto back = read_records_csv(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].id == "a");
    CHECK(back[0].eps == recs[0].eps);
    CHECK(back[0].b_vu == recs[0].b_vu);
    CHECK(back[1].delta_bar_lower_bound);

    std::ofstream(dir / "bad.csv") << "id,nope\r\nx,1\r\n";
    CHECK_THROWS_AS(read_records_csv((dir / "bad.csv").string()), io_error);
}

TEST_CASE("cmd_synthesize writes deterministic artifacts") {
    const fs::path dir1 = fresh_dir("syn1");
    const fs::path dir2 = fresh_dir("syn2");

    RunConfig cfg;
    cfg.problem = 1;
    cfg.t_f = 2.0;
    cfg.kappa = 40;
    cfg.restarts = 2;
    cfg.seed = 31337;
    cfg.max_iters = 120;
    cfg.fidelity_filter = 1.0; // keep both restarts regardless of quality
    cfg.out_dir = dir1.string();
    CHECK(cmd_synthesize(cfg) == 0);

    cfg.out_dir = dir2.string();
    CHECK(cmd_synthesize(cfg) == 0);

    CHECK(fs::exists(dir1 / "index.csv"));
    CHECK(fs::exists(dir1 / "p1_tf2_k40_r0000.json"));
    CHECK(fs::exists(dir1 / "p1_tf2_k40_r0001.json"));
    // re-running the same config is byte-identical
    CHECK(slurp(dir1 / "index.csv") == slurp(dir2 / "index.csv"));
    CHECK(slurp(dir1 / "p1_tf2_k40_r0000.json") == slurp(dir2 / "p1_tf2_k40_r0000.json"));
}

TEST_CASE("cmd_synthesize flags inadmissible configurations and empty runs") {
    RunConfig cfg;
    cfg.problem = 1;
    cfg.t_f = 99.0;
    cfg.kappa = 40;
    CHECK_THROWS_AS(validate_run_config(cfg), argument_error);

    cfg.t_f = 2.0;
    cfg.kappa = 7;
    CHECK_THROWS_AS(validate_run_config(cfg), argument_error);

    // the same pair passes with --override
    cfg.override_admissible = true;
    validate_run_config(cfg);

    const fs::path dir = fresh_dir("syn_empty");
    cfg.kappa = 8;
    cfg.restarts = 0;
    cfg.out_dir = dir.string();
    CHECK(cmd_synthesize(cfg) == 4); // warning exit: nothing survived
    CHECK(fs::exists(dir / "index.csv"));
}

TEST_CASE("cmd_analyze produces records consumable by cmd_stats") {
    const fs::path dir = fresh_dir("pipeline");

    RunConfig cfg;
    cfg.problem = 1;
    cfg.t_f = 2.0;
    cfg.kappa = 10;
    cfg.restarts = 5;
    cfg.seed = 4242;
    cfg.max_iters = 12; // leave the errors finite and spread out
    cfg.fidelity_filter = 1.0;
    cfg.override_admissible = true;
    cfg.out_dir = (dir / "controllers").string();
    REQUIRE(cmd_synthesize(cfg) == 0);

    std::vector<std::string> files;
    for (int r = 0; r < 5; ++r)
        files.push_back((dir / "controllers" / ("p1_tf2_k10_r000" + std::to_string(r) + ".json"))
                            .string());
    files.push_back((dir / "controllers" / "index.csv").string()); // not a controller: skipped

    cfg.out_dir = (dir / "analysis").string();
    cfg.epsilon = 0.3;
    cfg.step = 5e-3;
    cfg.max_iter = 4000;
    cfg.emit_traces = true;
    REQUIRE(cmd_analyze(cfg, files) == 0);

    const auto recs = read_records_csv((dir / "analysis" / "records.csv").string());
    REQUIRE(recs.size() == 5); // the bogus file was skipped, the run continued
    for (const auto& r : recs) {
        CHECK(std::isfinite(r.b_vu));
        CHECK(r.b_static <= r.b_vu + 1e-12);
        CHECK(r.delta_bar >= 0.0);
    }
    CHECK(fs::exists(dir / "analysis" / "traces" / (recs[0].id + "_trace.csv")));

    StatsOptions st;
    st.records_csv = (dir / "analysis" / "records.csv").string();
    st.pair = StatsPair::bvu_eps;
    st.out_dir = (dir / "stats").string();
    st.svg_path = (dir / "stats" / "scatter.svg").string();
    REQUIRE(cmd_stats(st) == 0);
    CHECK(fs::exists(dir / "stats" / "stats.csv"));
    CHECK(fs::exists(dir / "stats" / "scatter.csv"));
    CHECK(slurp(dir / "stats" / "scatter.svg").find("<svg") != std::string::npos);
}

TEST_CASE("cmd_stats on synthetic records") {
    const fs::path dir = fresh_dir("stats_synth");
    std::vector<RobustnessRecord> recs;
    for (int i = 1; i <= 8; ++i) {
        RobustnessRecord r;
        r.id = "c" + std::to_string(i);
        r.b_vu = i;
        r.eps = i; // y = x: perfect positive correlation
        r.delta_bar = 1.0 / i;
        r.log_sens_norm = 10.0 - i;
        r.init = "normal";
        recs.push_back(r);
    }
    write_records_csv((dir / "records.csv").string(), recs);

    StatsOptions st;
    st.records_csv = (dir / "records.csv").string();
    st.pair = StatsPair::bvu_eps;
    st.out_dir = dir.string();
    REQUIRE(cmd_stats(st) == 0);
    const std::string out = slurp(dir / "stats.csv");
    CHECK(out.find("bvu-eps,pearson,positive,8,1,") != std::string::npos);

    // two records: insufficient sample is a usage error
    write_records_csv((dir / "two.csv").string(), {recs[0], recs[1]});
    st.records_csv = (dir / "two.csv").string();
    CHECK_THROWS_AS(cmd_stats(st), argument_error);
}

TEST_CASE("cmd_analyze skips mismatched controllers and flags empty runs") {
    const fs::path dir = fresh_dir("analyze_edge");
    Rng rng(82);

    // shape that contradicts problem 1 (which has 4 controls)
    StoredController bad;
    bad.id = "bad";
    bad.problem = 1;
    bad.ctrl = testing::random_controller(2, 6, 2.0, rng);
    bad.eps = 1e-3;
    save_controller((dir / "bad.json").string(), bad);

    RunConfig cfg;
    cfg.out_dir = (dir / "analysis").string();
    cfg.step = 1e-2;
    cfg.max_iter = 50;
    CHECK(cmd_analyze(cfg, {(dir / "bad.json").string()}) == 4); // nothing analyzable
    CHECK(read_records_csv((dir / "analysis" / "records.csv").string()).empty());
}

TEST_CASE("cmd_stats emits a degenerate row instead of failing") {
    const fs::path dir = fresh_dir("stats_degenerate");
    std::vector<RobustnessRecord> recs(4);
    for (int i = 0; i < 4; ++i) {
        recs[i].id = "c" + std::to_string(i);
        recs[i].b_vu = 1.0; // zero variance in x
        recs[i].eps = 0.1 * (i + 1);
        recs[i].init = "normal";
    }
    write_records_csv((dir / "records.csv").string(), recs);

    StatsOptions st;
    st.records_csv = (dir / "records.csv").string();
    st.pair = StatsPair::bvu_eps;
    st.out_dir = dir.string();
    CHECK(cmd_stats(st) == 0);
    CHECK(slurp(dir / "stats.csv").find(",degenerate") != std::string::npos);
}

TEST_CASE("custom uncertainty structure files")
{
    const fs::path dir = fresh_dir("structures");
    const ProblemSpec spec = make_problem(1);

    // drift-only file: sigma_z x sigma_z / 2 (unit Frobenius norm)
    std::ofstream f(dir / "unc.json");
    f << "{\"dim\":4,\"slots\":[{\"slot\":0,\"matrix\":[";
    for (int i = 0; i < 4; ++i) {
        f << (i ? "," : "") << "[";
        for (int j = 0; j < 4; ++j) {
            const double v = (i == j) ? ((i == 0 || i == 3) ? 0.5 : -0.5) : 0.0;
            f << (j ? "," : "") << "[" << v << ",0]";
        }
        f << "]";
    }
    f << "]}]}";
    f.close();

    const UncertaintyStructure unc = load_structures((dir / "unc.json").string(), spec);
    CHECK(unc.slots() == 5);
    CHECK(unc.is_active(0));
    for (int m = 1; m < 5; ++m) CHECK(!unc.is_active(m));

    // a non-normalized matrix must be rejected
    std::ofstream g(dir / "bad.json");
    g << "{\"dim\":4,\"slots\":[{\"slot\":0,\"matrix\":[";
    for (int i = 0; i < 4; ++i) {
        g << (i ? "," : "") << "[";
        for (int j = 0; j < 4; ++j) g << (j ? "," : "") << "[" << (i == j ? 2.0 : 0.0) << ",0]";
        g << "]";
    }
    g << "]}]}";
    g.close();
    CHECK_THROWS_AS(load_structures((dir / "bad.json").string(), spec), contract_error);
}
