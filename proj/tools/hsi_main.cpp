// hsi: command-line front end for the hyperspectral denoising toolkit.
//
// Subcommands: convert, corrupt, sigma, metrics, synth, run, tables, render.
// Scenario configs are declarative JSON; `run` executes them (or replays a
// manifest) and the other commands are thin wrappers over the library.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hsi/hsi.hpp"

namespace {

int run_all(const std::string& config_path, const std::string& out, int jobs) {
    const auto scenarios = hsi::load_scenarios(config_path);
    hsi::RunOptions opts;
    opts.jobs = jobs;
    opts.out_override = out;
    int failures = 0;
    std::vector<std::string> dirs;
    for (const auto& sc : scenarios) {
        std::printf("scenario %-28s (%zu methods x %zu seeds)\n", sc.name.c_str(),
                    sc.methods.empty() ? hsi::ScenarioConfig::default_methods().size()
                                       : sc.methods.size(),
                    sc.seeds.size());
        const hsi::ScenarioResult result = hsi::run_scenario(sc, opts);
        dirs.push_back(result.run_dir);
        for (const auto& r : result.runs) {
            if (r.ok)
                std::printf("  %-12s seed %-4llu final %6.2f dB  peak %6.2f dB\n", r.method.c_str(),
                            static_cast<unsigned long long>(r.seed), r.final_mpsnr, r.peak_mpsnr);
            else {
                std::printf("  %-12s seed %-4llu FAILED: %s\n", r.method.c_str(),
                            static_cast<unsigned long long>(r.seed), r.error.c_str());
                ++failures;
            }
        }
        std::printf("  -> %s\n", result.run_dir.c_str());
    }
    if (dirs.size() > 1 || !dirs.empty()) {
        const hsi::ResultsTable table = hsi::build_tables(dirs);
        std::printf("\n%s", table.to_text().c_str());
    }
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"unsupervised hyperspectral image denoising toolkit"};
    app.require_subcommand(1);

    // convert
    std::string in_path, out_path, interleave = "bsq";
    auto* convert = app.add_subcommand("convert", "rewrite a cube in the native format");
    convert->add_option("--in", in_path, "input cube (.json header)")->required();
    convert->add_option("--out", out_path, "output cube stem or .json path")->required();
    convert->add_option("--interleave", interleave, "payload interleave: bsq|bip|bil");

    // corrupt
    std::string spec_path;
    bool emit_sigma = false;
    auto* corrupt = app.add_subcommand("corrupt", "apply a noise spec to a cube");
    corrupt->add_option("--in", in_path, "clean cube")->required();
    corrupt->add_option("--spec", spec_path, "noise spec JSON file")->required();
    corrupt->add_option("--out", out_path, "noisy cube output")->required();
    corrupt->add_flag("--emit-sigma", emit_sigma, "also write <out>.sigma.json and print sigma");

    // sigma
    auto* sigma_cmd = app.add_subcommand("sigma", "blind noise level estimate");
    sigma_cmd->add_option("--in", in_path, "noisy cube")->required();

    // metrics
    std::string ref_path, est_path;
    auto* metrics_cmd = app.add_subcommand("metrics", "MPSNR / MSSIM / NMSE between two cubes");
    metrics_cmd->add_option("--ref", ref_path, "reference cube (normalized)")->required();
    metrics_cmd->add_option("--est", est_path, "estimate cube")->required();

    // synth
    int sw = 64, sh = 64, sb = 16;
    std::uint64_t sseed = 7;
    auto* synth = app.add_subcommand("synth", "write a synthetic normalized scene");
    synth->add_option("--out", out_path, "output cube")->required();
    synth->add_option("--width", sw, "width (default 64)");
    synth->add_option("--height", sh, "height (default 64)");
    synth->add_option("--bands", sb, "bands (default 16)");
    synth->add_option("--seed", sseed, "seed (default 7)");

    // run
    std::string config_path, run_out;
    int jobs = 1;
    auto* run = app.add_subcommand("run", "execute scenario configs (or replay a manifest)");
    run->add_option("--config", config_path, "scenario config / grid / manifest JSON")->required();
    run->add_option("--jobs", jobs, "concurrent (method, seed) runs");
    run->add_option("--out", run_out, "output root (overrides out_dir)");

    // tables
    std::vector<std::string> run_dirs;
    std::string csv_out;
    auto* tables = app.add_subcommand("tables", "aggregate run directories into a results table");
    tables->add_option("--runs", run_dirs, "run directories")->required()->expected(-1);
    tables->add_option("--csv", csv_out, "also write the table as CSV");

    // render
    std::string render_dir;
    auto* render = app.add_subcommand("render", "false-color composites and training curves");
    render->add_option("--run", render_dir, "run directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (convert->parsed()) {
            hsi::save_cube(hsi::load_cube(in_path), out_path, interleave);
        } else if (corrupt->parsed()) {
            std::ifstream sf(spec_path);
            if (!sf) throw hsi::FileError("missing noise spec: " + spec_path);
            const auto spec = nlohmann::json::parse(sf).get<hsi::NoiseSpec>();
            const hsi::Cube clean = hsi::load_cube(in_path);
            const hsi::NoisyCube noisy = hsi::apply_spec(clean, spec);
            hsi::save_cube(noisy.cube, out_path);
            if (emit_sigma) {
                const nlohmann::json j{{"sigma", noisy.sigma}};
                const auto [header, payload] = hsi::detail::cube_paths(out_path);
                std::ofstream jf(header.string() + ".sigma.json");
                jf << j.dump(2) << "\n";
                std::cout << j.dump(2) << "\n";
            }
        } else if (sigma_cmd->parsed()) {
            const hsi::SigmaEstimate est = hsi::estimate_sigma(hsi::load_cube(in_path));
            std::cout << nlohmann::json{{"pooled", est.pooled}, {"per_band", est.per_band}}.dump(2)
                      << "\n";
        } else if (metrics_cmd->parsed()) {
            const hsi::MetricsReport report =
                hsi::compute_metrics(hsi::load_cube(ref_path), hsi::load_cube(est_path));
            std::cout << nlohmann::json(report).dump(2) << "\n";
        } else if (synth->parsed()) {
            hsi::save_cube(hsi::make_scene(sw, sh, sb, sseed), out_path);
        } else if (run->parsed()) {
            return run_all(config_path, run_out, jobs);
        } else if (tables->parsed()) {
            const hsi::ResultsTable table = hsi::build_tables(run_dirs);
            std::cout << table.to_text();
            if (!csv_out.empty()) {
                std::ofstream cf(csv_out);
                cf << table.to_csv();
            }
        } else if (render->parsed()) {
            hsi::render_outputs(render_dir);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
