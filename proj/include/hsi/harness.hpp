#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hsi/cube.hpp"
#include "hsi/error.hpp"
#include "hsi/losses.hpp"
#include "hsi/metrics.hpp"
#include "hsi/noise.hpp"
#include "hsi/render.hpp"
#include "hsi/sigma.hpp"
#include "hsi/synthetic.hpp"
#include "hsi/trainer.hpp"

namespace hsi {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kDataRootEnv = "HSI_DATA_ROOT";

struct CropSpec {
    int row0 = 0, col0 = 0;
    int height = 0, width = 0; // 0 keeps the full extent
};

struct SyntheticSpec {
    int width = 64, height = 64, bands = 16;
    std::uint64_t seed = 7;
};

// Where the clean cube comes from: a native cube file (resolved against
// HSI_DATA_ROOT when not found directly) or the built-in synthetic scene.
struct DatasetSpec {
    std::string path;
    std::optional<SyntheticSpec> synthetic;
    std::optional<CropSpec> crop;
    std::optional<int> band_count;          // evenly spaced subset
    std::optional<std::vector<int>> bands;  // explicit subset

    void validate() const {
        if (path.empty() == !synthetic)
            throw ConfigError("dataset needs exactly one of 'path' or 'synthetic'");
        if (crop && (crop->height < 0 || crop->width < 0 || crop->row0 < 0 || crop->col0 < 0))
            throw ConfigError("crop fields must be non-negative");
        if (band_count && bands) throw ConfigError("give band_count or bands, not both");
        if (band_count && *band_count <= 0) throw ConfigError("band_count must be positive");
    }
};

// One table column: a loss mode plus its input policy. Defaults follow the
// methods being compared: joint input optimization for the unified loss,
// fixed input elsewhere; random Gaussian input for the plain data terms and
// the noisy observation for the divergence-regularized ones.
struct MethodSpec {
    std::string name;
    LossMode loss;
    std::optional<bool> optimize_input;
    std::optional<InputInit> input_init;

    bool resolved_optimize_input() const {
        return optimize_input.value_or(loss.kind == LossKind::UNIFIED);
    }
    InputInit resolved_input_init() const {
        if (input_init) return *input_init;
        return (loss.kind == LossKind::SURE || loss.kind == LossKind::UNIFIED)
                   ? InputInit::noisy_y
                   : InputInit::gaussian;
    }
};

struct ScenarioConfig {
    std::string name = "scenario";
    DatasetSpec dataset;
    NoiseSpec noise;
    nn::NetworkConfig network;
    TrainConfig train;
    std::vector<MethodSpec> methods;
    std::vector<std::uint64_t> seeds = {1};
    std::vector<int> render_bands; // empty picks a spread automatically
    std::string out_dir;

    void validate() const {
        dataset.validate();
        if (seeds.empty()) throw ConfigError("scenario needs at least one seed");
        if (methods.empty()) throw ConfigError("scenario needs at least one method");
        network.validate();
        if (render_bands.size() != 0 && render_bands.size() != 3)
            throw ConfigError("render_bands must list exactly 3 bands");
        // Noise and crop bounds are checked against the cube right after load.
    }

    static std::vector<MethodSpec> default_methods() {
        std::vector<MethodSpec> m(4);
        m[0].name = "l2";
        m[0].loss.kind = LossKind::L2;
        m[1].name = "sure";
        m[1].loss.kind = LossKind::SURE;
        m[2].name = "smooth_l1";
        m[2].loss.kind = LossKind::SMOOTH_L1;
        m[3].name = "unified";
        m[3].loss.kind = LossKind::UNIFIED;
        return m;
    }
};

inline void to_json(nlohmann::json& j, const CropSpec& c) {
    j = nlohmann::json{{"row0", c.row0}, {"col0", c.col0}, {"height", c.height}, {"width", c.width}};
}
inline void from_json(const nlohmann::json& j, CropSpec& c) {
    c.row0 = j.value("row0", 0);
    c.col0 = j.value("col0", 0);
    c.height = j.value("height", 0);
    c.width = j.value("width", 0);
}

inline void to_json(nlohmann::json& j, const SyntheticSpec& s) {
    j = nlohmann::json{{"width", s.width}, {"height", s.height}, {"bands", s.bands}, {"seed", s.seed}};
}
inline void from_json(const nlohmann::json& j, SyntheticSpec& s) {
    s.width = j.value("width", 64);
    s.height = j.value("height", 64);
    s.bands = j.value("bands", 16);
    s.seed = j.value("seed", std::uint64_t{7});
}

inline void to_json(nlohmann::json& j, const DatasetSpec& d) {
    j = nlohmann::json::object();
    if (!d.path.empty()) j["path"] = d.path;
    if (d.synthetic) j["synthetic"] = *d.synthetic;
    if (d.crop) j["crop"] = *d.crop;
    if (d.band_count) j["band_count"] = *d.band_count;
    if (d.bands) j["bands"] = *d.bands;
}
inline void from_json(const nlohmann::json& j, DatasetSpec& d) {
    d.path = j.value("path", "");
    if (j.contains("synthetic")) d.synthetic = j.at("synthetic").get<SyntheticSpec>();
    if (j.contains("crop")) d.crop = j.at("crop").get<CropSpec>();
    if (j.contains("band_count")) d.band_count = j.at("band_count").get<int>();
    if (j.contains("bands")) d.bands = j.at("bands").get<std::vector<int>>();
}

inline void to_json(nlohmann::json& j, const MethodSpec& m) {
    j = nlohmann::json{{"name", m.name}, {"loss", m.loss}};
    if (m.optimize_input) j["optimize_input"] = *m.optimize_input;
    if (m.input_init) j["input_init"] = to_string(*m.input_init);
}
inline void from_json(const nlohmann::json& j, MethodSpec& m) {
    // Accepts both {"loss": "unified", "beta": ...} and {"loss": {...}}.
    if (j.contains("loss") && j.at("loss").is_object())
        m.loss = j.at("loss").get<LossMode>();
    else
        m.loss = j.get<LossMode>();
    m.name = j.value("name", to_string(m.loss.kind));
    if (j.contains("optimize_input")) m.optimize_input = j.at("optimize_input").get<bool>();
    if (j.contains("input_init")) m.input_init = input_init_from_string(j.at("input_init").get<std::string>());
}

inline void to_json(nlohmann::json& j, const ScenarioConfig& s) {
    j = nlohmann::json{{"name", s.name},     {"dataset", s.dataset}, {"noise", s.noise},
                       {"network", s.network}, {"train", s.train},     {"methods", s.methods},
                       {"seeds", s.seeds},    {"out_dir", s.out_dir}};
    if (!s.render_bands.empty()) j["render_bands"] = s.render_bands;
}
inline void from_json(const nlohmann::json& j, ScenarioConfig& s) {
    s.name = j.value("name", "scenario");
    s.dataset = j.at("dataset").get<DatasetSpec>();
    s.noise = j.at("noise").get<NoiseSpec>();
    if (j.contains("network")) s.network = j.at("network").get<nn::NetworkConfig>();
    if (j.contains("train")) s.train = j.at("train").get<TrainConfig>();
    s.methods = j.contains("methods") ? j.at("methods").get<std::vector<MethodSpec>>()
                                      : ScenarioConfig::default_methods();
    s.seeds = j.value("seeds", std::vector<std::uint64_t>{1});
    s.render_bands = j.value("render_bands", std::vector<int>{});
    s.out_dir = j.value("out_dir", "");
}

namespace detail {

inline std::string resolve_dataset_path(const std::string& path) {
    namespace fs = std::filesystem;
    auto [header, payload] = cube_paths(path);
    if (fs::exists(header)) return path;
    if (const char* root = std::getenv(kDataRootEnv)) {
        const fs::path candidate = fs::path(root) / path;
        auto [h2, p2] = cube_paths(candidate.string());
        if (fs::exists(h2)) return candidate.string();
    }
    throw FileError("dataset not found: " + path + " (also tried $" + kDataRootEnv + ")");
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path);
    if (!f) throw FileError("cannot write " + path);
    f << j.dump(2) << "\n";
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FileError("missing file: " + path);
    return nlohmann::json::parse(f);
}

inline double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

} // namespace detail

// Loads, crops, band-selects, and normalizes the clean cube of a scenario.
inline Cube prepare_clean_cube(const DatasetSpec& spec) {
    spec.validate();
    Cube cube = spec.synthetic ? make_scene(spec.synthetic->width, spec.synthetic->height,
                                            spec.synthetic->bands, spec.synthetic->seed)
                               : load_cube(detail::resolve_dataset_path(spec.path));
    if (spec.crop && (spec.crop->height > 0 || spec.crop->width > 0)) {
        const int h = spec.crop->height > 0 ? spec.crop->height : cube.height - spec.crop->row0;
        const int w = spec.crop->width > 0 ? spec.crop->width : cube.width - spec.crop->col0;
        cube = crop(cube, spec.crop->row0, spec.crop->col0, h, w);
    }
    if (spec.band_count) {
        const auto idx = evenly_spaced_bands(cube.bands, *spec.band_count);
        cube = select_bands(cube, idx);
    } else if (spec.bands) {
        cube = select_bands(cube, *spec.bands);
    }
    return normalize(cube);
}

struct RunOptions {
    int jobs = 1;
    std::string out_override; // replaces the scenario's out_dir when set
};

struct MethodRunStatus {
    std::string method;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double final_mpsnr = 0.0, peak_mpsnr = 0.0;
};

struct ScenarioResult {
    std::string run_dir;
    std::vector<MethodRunStatus> runs;
    bool all_ok() const {
        for (const auto& r : runs)
            if (!r.ok) return false;
        return true;
    }
};

// Executes one scenario: corrupts the clean cube, estimates sigma, trains
// every (method, seed) pair (up to opts.jobs concurrently; each run owns its
// model, input, and generators), and writes every artifact needed for exact
// replay. Failed runs are recorded and never abort the rest of the grid.
inline ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& opts = {}) {
    ScenarioConfig cfg = config;
    cfg.validate();
    if (!opts.out_override.empty())
        cfg.out_dir = (std::filesystem::path(opts.out_override) / cfg.name).string();
    if (cfg.out_dir.empty()) cfg.out_dir = (std::filesystem::path("runs") / cfg.name).string();
    const std::string dir = cfg.out_dir;
    std::filesystem::create_directories(dir);

    const Cube clean = prepare_clean_cube(cfg.dataset);
    cfg.noise.validate(clean.bands);
    const NoisyCube noisy = apply_spec(clean, cfg.noise);
    const SigmaEstimate sigma_est = estimate_sigma(noisy.cube);

    save_cube(clean, dir + "/clean");
    save_cube(noisy.cube, dir + "/noisy");
    detail::write_json_file(dir + "/sigma.json",
                            {{"per_band", sigma_est.per_band},
                             {"pooled", sigma_est.pooled},
                             {"oracle", noisy.sigma}});

    // Pad so the spatial dims divide 2^depth (undone on the way out).
    const int multiple = 1 << cfg.network.depth;
    const Cube clean_p = pad_to_multiple(clean, multiple, 2 * multiple);
    const Cube noisy_p = pad_to_multiple(noisy.cube, multiple, 2 * multiple);

    const MetricsReport noisy_metrics = compute_metrics(clean, noisy.cube);
    detail::write_json_file(dir + "/noisy_metrics.json", noisy_metrics);

    struct Job {
        const MethodSpec* method;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& m : cfg.methods)
        for (std::uint64_t s : cfg.seeds) jobs.push_back({&m, s});

    std::vector<MethodRunStatus> statuses(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const Job& job = jobs[i];
            MethodRunStatus& st = statuses[i];
            st.method = job.method->name;
            st.seed = job.seed;
            const std::string run_dir =
                dir + "/methods/" + job.method->name + "/seed_" + std::to_string(job.seed);
            try {
                TrainConfig tc = cfg.train;
                tc.seed = job.seed;
                tc.loss = job.method->loss;
                tc.loss.sigma = tc.loss.sigma_source == SigmaSource::oracle ? noisy.sigma
                                                                            : sigma_est.pooled;
                tc.optimize_input = job.method->resolved_optimize_input();
                tc.input_init = job.method->resolved_input_init();
                if (!tc.checkpoint_dir.empty()) tc.checkpoint_dir = run_dir + "/checkpoints";

                nn::SkipNet<float> model(cfg.network, noisy_p.height, noisy_p.width,
                                         noisy_p.bands, job.seed);
                TrainResult result = train(model, noisy_p, tc, &clean_p);
                Cube estimate = result.estimate;
                if (!estimate.same_shape(clean))
                    estimate = crop(estimate, 0, 0, clean.height, clean.width);

                std::filesystem::create_directories(run_dir);
                result.trace.write_csv(run_dir + "/trace.csv");
                save_cube(estimate, run_dir + "/final");
                const MetricsReport metrics = compute_metrics(clean, estimate);
                nlohmann::json mj = metrics;
                mj["peak_mpsnr"] = result.trace.peak ? *result.trace.peak->mpsnr : metrics.mpsnr;
                mj["peak_iteration"] = result.trace.peak ? result.trace.peak->iteration : 0;
                mj["param_count"] = model.param_count();
                detail::write_json_file(run_dir + "/metrics.json", mj);
                st.ok = true;
                st.final_mpsnr = metrics.mpsnr;
                st.peak_mpsnr = mj["peak_mpsnr"].get<double>();
            } catch (const std::exception& e) {
                st.ok = false;
                st.error = e.what();
                std::filesystem::create_directories(run_dir);
                detail::write_json_file(run_dir + "/failed.json", {{"error", st.error}});
            }
        }
    };
    const int nthreads = std::max(1, std::min<int>(opts.jobs, static_cast<int>(jobs.size())));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Summary: per-method medians over seeds, plus the noisy baseline.
    nlohmann::json summary;
    summary["noisy"] = noisy_metrics;
    for (const auto& m : cfg.methods) {
        std::vector<double> finals, peaks, gaps, ssims;
        nlohmann::json per_seed = nlohmann::json::object();
        bool any_failed = false;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            if (jobs[i].method != &m) continue;
            const auto& st = statuses[i];
            if (!st.ok) {
                any_failed = true;
                per_seed[std::to_string(st.seed)] = {{"ok", false}, {"error", st.error}};
                continue;
            }
            const std::string run_dir =
                dir + "/methods/" + m.name + "/seed_" + std::to_string(st.seed);
            const nlohmann::json mj = detail::read_json_file(run_dir + "/metrics.json");
            finals.push_back(mj.at("mpsnr").get<double>());
            ssims.push_back(mj.at("mssim").get<double>());
            peaks.push_back(mj.at("peak_mpsnr").get<double>());
            gaps.push_back(mj.at("peak_mpsnr").get<double>() - mj.at("mpsnr").get<double>());
            per_seed[std::to_string(st.seed)] = {{"ok", true},
                                                 {"mpsnr", mj.at("mpsnr")},
                                                 {"mssim", mj.at("mssim")},
                                                 {"peak_mpsnr", mj.at("peak_mpsnr")}};
        }
        nlohmann::json entry;
        entry["seeds"] = per_seed;
        entry["failed"] = any_failed;
        if (!finals.empty()) {
            entry["median_final_mpsnr"] = detail::median(finals);
            entry["median_final_mssim"] = detail::median(ssims);
            entry["median_peak_mpsnr"] = detail::median(peaks);
            entry["median_peak_minus_final"] = detail::median(gaps);
        }
        summary["methods"][m.name] = entry;
    }
    detail::write_json_file(dir + "/summary.json", summary);

    nlohmann::json manifest;
    manifest["package"] = std::string("hsi ") + kVersion;
    manifest["scenario"] = cfg;
    manifest["sigma"] = {{"pooled_estimate", sigma_est.pooled}, {"oracle", noisy.sigma}};
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& st : statuses)
        runs.push_back({{"method", st.method},
                        {"seed", st.seed},
                        {"ok", st.ok},
                        {"error", st.error}});
    manifest["runs"] = runs;
    detail::write_json_file(dir + "/manifest.json", manifest);

    ScenarioResult result;
    result.run_dir = dir;
    result.runs = statuses;
    return result;
}

// Parses either a scenario config, a {"scenarios": [...]} grid, or a run
// manifest (replay). Returns the list of scenarios to execute.
inline std::vector<ScenarioConfig> load_scenarios(const std::string& config_path) {
    const nlohmann::json j = detail::read_json_file(config_path);
    if (j.contains("scenario") && j.contains("package")) // manifest replay
        return {j.at("scenario").get<ScenarioConfig>()};
    if (j.contains("scenarios")) return j.at("scenarios").get<std::vector<ScenarioConfig>>();
    return {j.get<ScenarioConfig>()};
}

struct TableRow {
    std::string scenario;
    std::optional<double> snr_db;
    std::string method;
    std::optional<double> mpsnr, mssim;
    std::string status = "ok";
    bool best = false;
};

struct ResultsTable {
    std::vector<TableRow> rows;

    std::string to_csv() const {
        std::string out = "scenario,snr_db,method,mpsnr,mssim,status,best\n";
        char buf[64];
        for (const auto& r : rows) {
            out += r.scenario + ",";
            if (r.snr_db) {
                std::snprintf(buf, sizeof(buf), "%g", *r.snr_db);
                out += buf;
            }
            out += "," + r.method + ",";
            if (r.mpsnr) {
                std::snprintf(buf, sizeof(buf), "%.4f", *r.mpsnr);
                out += buf;
            }
            out += ",";
            if (r.mssim) {
                std::snprintf(buf, sizeof(buf), "%.4f", *r.mssim);
                out += buf;
            }
            out += "," + r.status + "," + (r.best ? "1" : "0") + "\n";
        }
        return out;
    }

    std::string to_text() const {
        char buf[256];
        std::string out;
        std::snprintf(buf, sizeof(buf), "%-28s %8s %-12s %9s %8s %s\n", "scenario", "snr_db",
                      "method", "mpsnr", "mssim", "");
        out += buf;
        out += std::string(72, '-') + "\n";
        for (const auto& r : rows) {
            std::string snr = r.snr_db ? std::to_string(*r.snr_db) : "";
            if (r.snr_db) {
                std::snprintf(buf, sizeof(buf), "%g", *r.snr_db);
                snr = buf;
            }
            std::string mpsnr = "failed", mssim = "";
            if (r.status == "ok" && r.mpsnr) {
                std::snprintf(buf, sizeof(buf), "%.2f", *r.mpsnr);
                mpsnr = buf;
                std::snprintf(buf, sizeof(buf), "%.4f", r.mssim ? *r.mssim : 0.0);
                mssim = buf;
            }
            std::snprintf(buf, sizeof(buf), "%-28s %8s %-12s %9s %8s %s\n", r.scenario.c_str(),
                          snr.c_str(), r.method.c_str(), mpsnr.c_str(), mssim.c_str(),
                          r.best ? "*" : "");
            out += buf;
        }
        return out;
    }
};

// Aggregates finished run directories into the (scenario, snr, method) table,
// median over seeds, best method per scenario flagged. Missing metrics become
// explicit "failed" cells rather than being dropped.
inline ResultsTable build_tables(const std::vector<std::string>& run_dirs) {
    ResultsTable table;
    for (const auto& dir : run_dirs) {
        const nlohmann::json manifest = detail::read_json_file(dir + "/manifest.json");
        const ScenarioConfig cfg = manifest.at("scenario").get<ScenarioConfig>();
        std::optional<double> snr = cfg.noise.gaussian_snr_db;

        TableRow noisy_row;
        noisy_row.scenario = cfg.name;
        noisy_row.snr_db = snr;
        noisy_row.method = "noisy";
        try {
            const nlohmann::json nm = detail::read_json_file(dir + "/noisy_metrics.json");
            noisy_row.mpsnr = nm.at("mpsnr").get<double>();
            noisy_row.mssim = nm.at("mssim").get<double>();
        } catch (const std::exception&) {
            noisy_row.status = "failed";
        }
        table.rows.push_back(noisy_row);

        nlohmann::json summary;
        try {
            summary = detail::read_json_file(dir + "/summary.json");
        } catch (const std::exception&) {
            summary = nlohmann::json::object();
        }
        std::size_t first = table.rows.size();
        for (const auto& m : cfg.methods) {
            TableRow row;
            row.scenario = cfg.name;
            row.snr_db = snr;
            row.method = m.name;
            const auto methods = summary.value("methods", nlohmann::json::object());
            if (methods.contains(m.name) && methods.at(m.name).contains("median_final_mpsnr")) {
                const auto& e = methods.at(m.name);
                row.mpsnr = e.at("median_final_mpsnr").get<double>();
                row.mssim = e.at("median_final_mssim").get<double>();
                if (e.value("failed", false)) row.status = "partial";
            } else {
                row.status = "failed";
            }
            table.rows.push_back(row);
        }
        // flag the best method cell for this scenario
        std::size_t best = 0;
        double best_v = -1e300;
        for (std::size_t i = first; i < table.rows.size(); ++i)
            if (table.rows[i].mpsnr && *table.rows[i].mpsnr > best_v) {
                best_v = *table.rows[i].mpsnr;
                best = i;
            }
        if (best_v > -1e300) table.rows[best].best = true;
    }
    return table;
}

// False-color composites (clean / noisy / per-method finals) and the
// MPSNR / NMSE training curves for one finished run directory.
inline void render_outputs(const std::string& run_dir) {
    const nlohmann::json manifest = detail::read_json_file(run_dir + "/manifest.json");
    const ScenarioConfig cfg = manifest.at("scenario").get<ScenarioConfig>();
    const Cube clean = load_cube(run_dir + "/clean");

    std::array<int, 3> bands{};
    if (cfg.render_bands.size() == 3) {
        bands = {cfg.render_bands[0], cfg.render_bands[1], cfg.render_bands[2]};
    } else {
        bands = {(3 * clean.bands) / 4, clean.bands / 2, clean.bands / 4};
    }
    const std::string out = run_dir + "/renders";
    write_false_color(clean, bands, out + "/clean.ppm");
    write_false_color(load_cube(run_dir + "/noisy"), bands, out + "/noisy.ppm");

    std::vector<PlotSeries> mpsnr_series, nmse_series;
    for (const auto& m : cfg.methods) {
        std::uint64_t seed_used = 0;
        bool found = false;
        for (std::uint64_t s : cfg.seeds) {
            const std::string base = run_dir + "/methods/" + m.name + "/seed_" + std::to_string(s);
            if (std::filesystem::exists(base + "/final.json")) {
                seed_used = s;
                found = true;
                break;
            }
        }
        if (!found) continue;
        const std::string base = run_dir + "/methods/" + m.name + "/seed_" + std::to_string(seed_used);
        write_false_color(load_cube(base + "/final"), bands, out + "/" + m.name + ".ppm");
        const TrainingTrace trace = TrainingTrace::read_csv(base + "/trace.csv");
        PlotSeries ps{m.name, {}, {}}, ns{m.name, {}, {}};
        for (const auto& r : trace.records) {
            if (r.mpsnr) {
                ps.x.push_back(r.iteration);
                ps.y.push_back(*r.mpsnr);
            }
            if (r.nmse) {
                ns.x.push_back(r.iteration);
                ns.y.push_back(*r.nmse);
            }
        }
        if (!ps.x.empty()) mpsnr_series.push_back(std::move(ps));
        if (!ns.x.empty()) nmse_series.push_back(std::move(ns));
    }
    if (!mpsnr_series.empty())
        write_svg_plot(out + "/mpsnr_curve.svg", cfg.name + ": reconstruction quality", "iteration",
                       "MPSNR (dB)", mpsnr_series);
    if (!nmse_series.empty())
        write_svg_plot(out + "/nmse_curve.svg", cfg.name + ": normalized MSE", "iteration", "NMSE",
                       nmse_series);
}

} // namespace hsi
