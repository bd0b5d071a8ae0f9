#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "hsi/harness.hpp"

#include "test_util.hpp"

using namespace hsi;

namespace {

// Tiny but complete scenario: synthetic scene, light noise, all four methods,
// a handful of iterations. Keeps the end-to-end path honest without burning
// minutes.
ScenarioConfig tiny_scenario(const std::string& out_dir) {
    ScenarioConfig cfg;
    cfg.name = "tiny";
    cfg.dataset.synthetic = SyntheticSpec{24, 24, 4, 7};
    cfg.noise.gaussian_snr_db = 10.0;
    cfg.noise.seed = 3;
    cfg.network.depth = 1;
    cfg.network.channels_down = {8};
    cfg.network.channels_up = {8};
    cfg.network.channels_skip = {2};
    cfg.train.iterations = 12;
    cfg.train.eval_every = 4;
    cfg.methods = ScenarioConfig::default_methods();
    cfg.seeds = {1};
    cfg.out_dir = out_dir;
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("run_scenario produces the full artifact set for all four methods") {
    TempDir dir("scenario");
    const ScenarioConfig cfg = tiny_scenario(dir.str("run"));
    const ScenarioResult result = run_scenario(cfg, {.jobs = 2});
    REQUIRE(result.all_ok());
    REQUIRE(result.runs.size() == 4);

    namespace fs = std::filesystem;
    CHECK(fs::exists(dir.str("run/clean.json")));
    CHECK(fs::exists(dir.str("run/noisy.json")));
    CHECK(fs::exists(dir.str("run/sigma.json")));
    CHECK(fs::exists(dir.str("run/manifest.json")));
    CHECK(fs::exists(dir.str("run/summary.json")));
    for (const char* m : {"l2", "sure", "smooth_l1", "unified"}) {
        CHECK(fs::exists(dir.str("run/methods/") + m + "/seed_1/trace.csv"));
        CHECK(fs::exists(dir.str("run/methods/") + m + "/seed_1/final.json"));
        CHECK(fs::exists(dir.str("run/methods/") + m + "/seed_1/metrics.json"));
    }

    SECTION("replaying the manifest reproduces metrics bit-exactly") {
        auto scenarios = load_scenarios(dir.str("run/manifest.json"));
        REQUIRE(scenarios.size() == 1);
        scenarios[0].out_dir = dir.str("replay");
        run_scenario(scenarios[0], {.jobs = 2});
        for (const char* m : {"l2", "sure", "smooth_l1", "unified"}) {
            const std::string a = slurp(dir.str("run/methods/") + m + "/seed_1/metrics.json");
            const std::string b = slurp(dir.str("replay/methods/") + m + "/seed_1/metrics.json");
            CHECK(a == b);
        }
    }

    SECTION("tables aggregate the run with a noisy baseline row") {
        const ResultsTable table = build_tables({dir.str("run")});
        REQUIRE(table.rows.size() == 5);
        CHECK(table.rows[0].method == "noisy");
        REQUIRE(table.rows[0].mpsnr.has_value());
        int best = 0;
        for (const auto& row : table.rows) {
            CHECK(row.scenario == "tiny");
            if (row.best) ++best;
        }
        CHECK(best == 1);
        CHECK(table.to_csv().find("noisy") != std::string::npos);
        CHECK(table.to_text().find("unified") != std::string::npos);
    }

    SECTION("missing metrics become explicit failed cells") {
        std::filesystem::remove(dir.str("run/summary.json"));
        const ResultsTable table = build_tables({dir.str("run")});
        bool failed_cell = false;
        for (const auto& row : table.rows)
            if (row.method == "unified" && row.status == "failed") failed_cell = true;
        CHECK(failed_cell);
    }

    SECTION("render_outputs writes composites and curves") {
        render_outputs(dir.str("run"));
        CHECK(fs::exists(dir.str("run/renders/clean.ppm")));
        CHECK(fs::exists(dir.str("run/renders/noisy.ppm")));
        CHECK(fs::exists(dir.str("run/renders/unified.ppm")));
        CHECK(fs::exists(dir.str("run/renders/mpsnr_curve.svg")));
        CHECK(fs::exists(dir.str("run/renders/nmse_curve.svg")));
    }
}

TEST_CASE("invalid configs fail before any compute") {
    TempDir dir("badcfg");
    SECTION("crop outside the cube") {
        ScenarioConfig cfg = tiny_scenario(dir.str("run"));
        cfg.dataset.crop = CropSpec{20, 20, 16, 16}; // 24x24 scene
        CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
        CHECK_FALSE(std::filesystem::exists(dir.str("run/noisy.json")));
    }
    SECTION("no seeds") {
        ScenarioConfig cfg = tiny_scenario(dir.str("run"));
        cfg.seeds.clear();
        CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
    }
    SECTION("render bands out of range") {
        ScenarioConfig cfg = tiny_scenario(dir.str("run"));
        cfg.render_bands = {0, 1, 99};
        run_scenario(cfg, {.jobs = 2});
        CHECK_THROWS_AS(render_outputs(dir.str("run")), ConfigError);
    }
}

TEST_CASE("failed methods are recorded without aborting the grid") {
    TempDir dir("partial");
    ScenarioConfig cfg = tiny_scenario(dir.str("run"));
    // sabotage one method: sigma_source oracle with a sparse-only corruption
    // gives sigma = 0, which SURE rejects
    cfg.noise = NoiseSpec{};
    cfg.noise.sparse_fraction = 0.02;
    cfg.noise.seed = 5;
    for (auto& m : cfg.methods)
        if (m.loss.kind == LossKind::SURE || m.loss.kind == LossKind::UNIFIED)
            m.loss.sigma_source = SigmaSource::oracle;

    const ScenarioResult result = run_scenario(cfg, {.jobs = 2});
    int ok = 0, failed = 0;
    for (const auto& r : result.runs) (r.ok ? ok : failed)++;
    CHECK(ok == 2);      // l2, smooth_l1
    CHECK(failed == 2);  // sure, unified
    const ResultsTable table = build_tables({dir.str("run")});
    bool l2_ok = false, sure_failed = false;
    for (const auto& row : table.rows) {
        if (row.method == "l2" && row.status == "ok") l2_ok = true;
        if (row.method == "sure" && row.status == "failed") sure_failed = true;
    }
    CHECK(l2_ok);
    CHECK(sure_failed);
}

TEST_CASE("padding path handles dims that do not divide 2^depth") {
    TempDir dir("pad");
    ScenarioConfig cfg = tiny_scenario(dir.str("run"));
    cfg.dataset.synthetic = SyntheticSpec{22, 22, 3, 9}; // needs padding for depth 1
    cfg.methods = {cfg.methods[0]}; // just l2
    const ScenarioResult result = run_scenario(cfg);
    REQUIRE(result.all_ok());
    const Cube final_cube = load_cube(dir.str("run/methods/l2/seed_1/final"));
    CHECK(final_cube.width == 22);
    CHECK(final_cube.height == 22);
}

TEST_CASE("the loss-vs-input ablation grid is expressible in one config") {
    // three divergence-relevant losses x {fixed, optimized} input
    nlohmann::json j = {
        {"name", "ablation"},
        {"dataset", {{"synthetic", {{"width", 16}, {"height", 16}, {"bands", 2}, {"seed", 1}}}}},
        {"noise", {{"gaussian_snr_db", 5.0}, {"seed", 2}}},
        {"methods",
         {{{"name", "sure_fixed"}, {"loss", "sure"}, {"optimize_input", false}},
          {{"name", "sure_joint"}, {"loss", "sure"}, {"optimize_input", true}},
          {{"name", "smooth_l1_fixed"}, {"loss", "smooth_l1"}, {"optimize_input", false}},
          {{"name", "smooth_l1_joint"}, {"loss", "smooth_l1"}, {"optimize_input", true}},
          {{"name", "unified_fixed"}, {"loss", "unified"}, {"optimize_input", false}},
          {{"name", "unified_joint"}, {"loss", "unified"}, {"optimize_input", true}}}},
        {"seeds", {1}}};
    const ScenarioConfig cfg = j.get<ScenarioConfig>();
    CHECK_NOTHROW(cfg.validate());
    REQUIRE(cfg.methods.size() == 6);
    CHECK(cfg.methods[0].resolved_optimize_input() == false);
    CHECK(cfg.methods[1].resolved_optimize_input() == true);
    CHECK(cfg.methods[4].resolved_optimize_input() == false);
    CHECK(cfg.methods[5].resolved_optimize_input() == true);
    // defaults when unspecified
    MethodSpec plain;
    plain.loss.kind = LossKind::UNIFIED;
    CHECK(plain.resolved_optimize_input() == true);
    plain.loss.kind = LossKind::L2;
    CHECK(plain.resolved_optimize_input() == false);
    CHECK(plain.resolved_input_init() == InputInit::gaussian);
}

TEST_CASE("scenario config JSON round-trip") {
    TempDir dir("cfg");
    const ScenarioConfig cfg = tiny_scenario(dir.str("out"));
    const nlohmann::json j = cfg;
    const ScenarioConfig back = j.get<ScenarioConfig>();
    CHECK(back.name == cfg.name);
    CHECK(back.dataset.synthetic->width == 24);
    CHECK(back.methods.size() == 4);
    CHECK(back.train.iterations == 12);
    CHECK(back.seeds == cfg.seeds);
}
