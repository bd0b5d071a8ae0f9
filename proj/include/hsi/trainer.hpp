#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hsi/cube.hpp"
#include "hsi/error.hpp"
#include "hsi/losses.hpp"
#include "hsi/metrics.hpp"
#include "hsi/nn/adam.hpp"
#include "hsi/nn/skip_net.hpp"
#include "hsi/rng.hpp"

namespace hsi {

enum class InputInit { noisy_y, gaussian };

inline std::string to_string(InputInit i) {
    return i == InputInit::noisy_y ? "noisy_y" : "gaussian";
}

inline InputInit input_init_from_string(const std::string& s) {
    if (s == "noisy_y") return InputInit::noisy_y;
    if (s == "gaussian") return InputInit::gaussian;
    throw ConfigError("unknown input_init '" + s + "'");
}

struct TrainConfig {
    int iterations = 4000;
    double lr_theta = 0.01;
    double lr_z = 0.01;
    bool optimize_input = false;
    int eval_every = 10;
    std::uint64_t seed = 0;
    LossMode loss;
    InputInit input_init = InputInit::noisy_y;
    int checkpoint_every = 0; // 0 disables snapshots
    std::string checkpoint_dir;

    void validate() const {
        if (iterations < 0) throw ConfigError("iterations must be >= 0");
        if (lr_theta <= 0.0 || lr_z <= 0.0) throw ConfigError("learning rates must be positive");
        if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
        if (iterations > 0 && eval_every > iterations)
            throw ConfigError("eval_every exceeds iterations");
        loss.validate();
    }
};

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
    j = nlohmann::json{{"iterations", c.iterations},
                       {"lr_theta", c.lr_theta},
                       {"lr_z", c.lr_z},
                       {"optimize_input", c.optimize_input},
                       {"eval_every", c.eval_every},
                       {"seed", c.seed},
                       {"input_init", to_string(c.input_init)}};
    if (c.checkpoint_every > 0) {
        j["checkpoint_every"] = c.checkpoint_every;
        j["checkpoint_dir"] = c.checkpoint_dir;
    }
}

inline void from_json(const nlohmann::json& j, TrainConfig& c) {
    c.iterations = j.value("iterations", 4000);
    c.lr_theta = j.value("lr_theta", 0.01);
    c.lr_z = j.value("lr_z", 0.01);
    c.optimize_input = j.value("optimize_input", false);
    c.eval_every = j.value("eval_every", 10);
    c.seed = j.value("seed", std::uint64_t{0});
    c.input_init = input_init_from_string(j.value("input_init", "noisy_y"));
    c.checkpoint_every = j.value("checkpoint_every", 0);
    c.checkpoint_dir = j.value("checkpoint_dir", "");
}

struct TraceRecord {
    int iteration = 0;
    double loss = 0.0;
    std::optional<double> mpsnr, mssim, nmse;
};

struct TrainingTrace {
    std::vector<TraceRecord> records;
    std::optional<TraceRecord> peak; // highest MPSNR, when a reference was given
    std::optional<TraceRecord> final_record;

    void write_csv(const std::string& path) const {
        std::filesystem::path p(path);
        if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
        std::ofstream f(path);
        if (!f) throw FileError("cannot write trace: " + path);
        f << "iteration,loss,mpsnr,mssim,nmse\n";
        f.precision(17);
        for (const auto& r : records) {
            f << r.iteration << ',' << r.loss << ',';
            if (r.mpsnr) f << *r.mpsnr;
            f << ',';
            if (r.mssim) f << *r.mssim;
            f << ',';
            if (r.nmse) f << *r.nmse;
            f << '\n';
        }
    }

    static TrainingTrace read_csv(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw FileError("missing trace: " + path);
        TrainingTrace trace;
        std::string line;
        std::getline(f, line); // header
        while (std::getline(f, line)) {
            if (line.empty()) continue;
            std::stringstream ss(line);
            std::string cell;
            TraceRecord r;
            std::getline(ss, cell, ',');
            r.iteration = std::stoi(cell);
            std::getline(ss, cell, ',');
            r.loss = std::stod(cell);
            auto opt = [&]() -> std::optional<double> {
                if (!std::getline(ss, cell, ',')) return std::nullopt;
                if (cell.empty()) return std::nullopt;
                return std::stod(cell);
            };
            r.mpsnr = opt();
            r.mssim = opt();
            r.nmse = opt();
            trace.records.push_back(r);
        }
        trace.refresh_summary();
        return trace;
    }

    void refresh_summary() {
        peak.reset();
        final_record.reset();
        if (records.empty()) return;
        final_record = records.back();
        for (const auto& r : records)
            if (r.mpsnr && (!peak || *r.mpsnr > *peak->mpsnr)) peak = r;
    }
};

// One loss evaluation: the full objective value plus, when `with_grads`,
// parameter gradients accumulated into the model and (optionally) the
// gradient w.r.t. the input z. Deterministic given step_seed: the probe for
// the divergence term is drawn from it, fresh on every call.
template <typename T>
struct LossStep {
    double value = 0.0;      // reported objective (SURE keeps its -sigma^2 constant)
    double data_term = 0.0;
    double divergence = 0.0; // raw MC divergence estimate, 0 when unused
};

template <typename T>
LossStep<T> run_loss_step(nn::SkipNet<T>& model, const nn::Tensor<T>& z, const nn::Tensor<T>& y,
                          const LossMode& mode, std::uint64_t step_seed,
                          nn::Tensor<T>* grad_z = nullptr, bool with_grads = true) {
    mode.validate();
    if (!z.same_shape(y)) throw ShapeError("run_loss_step: z and y shapes differ");
    const std::size_t n = z.v.size();
    Rng rng(step_seed);

    // The probe is drawn before anything else so the value-only path and the
    // gradient path consume the stream identically.
    std::vector<T> b;
    nn::Tensor<T> zb;
    if (mode.uses_divergence()) {
        b = DivergenceProbe::draw<T>(n, rng);
        zb = z;
        for (std::size_t i = 0; i < n; ++i) zb.v[i] += static_cast<T>(mode.epsilon) * b[i];
    }

    if (with_grads) model.zero_grad();
    typename nn::SkipNet<T>::Ctx ctx_a;
    nn::Tensor<T> out_a = model.forward(z, ctx_a);

    LossStep<T> step;
    const bool robust = mode.kind == LossKind::SMOOTH_L1 || mode.kind == LossKind::UNIFIED;
    step.data_term = robust ? smooth_l1<T>(out_a.v, y.v, mode.beta)
                            : l2_loss<T>(out_a.v, y.v);
    step.value = step.data_term;

    nn::Tensor<T> grad_a(out_a.c, out_a.h, out_a.w);
    if (with_grads) {
        if (robust)
            smooth_l1_grad<T>(out_a.v, y.v, mode.beta, grad_a.v);
        else
            l2_loss_grad<T>(out_a.v, y.v, grad_a.v);
    }

    if (mode.uses_divergence()) {
        typename nn::SkipNet<T>::Ctx ctx_b;
        nn::Tensor<T> out_b = model.forward(zb, ctx_b);
        step.divergence = DivergenceProbe::estimate<T>(b, out_a.v, out_b.v, mode.epsilon);
        const double weight = 2.0 * mode.sigma * mode.sigma / double(n);
        step.value += weight * step.divergence;
        if (mode.kind == LossKind::SURE) step.value -= mode.sigma * mode.sigma;

        if (with_grads) {
            const double coeff = weight / mode.epsilon;
            nn::Tensor<T> grad_b(out_b.c, out_b.h, out_b.w);
            for (std::size_t i = 0; i < n; ++i) {
                const T gb = static_cast<T>(coeff * double(b[i]));
                grad_b.v[i] = gb;
                grad_a.v[i] -= gb;
            }
            nn::Tensor<T> gz_b = model.backward(grad_b, ctx_b);
            nn::Tensor<T> gz_a = model.backward(grad_a, ctx_a);
            if (grad_z) {
                for (std::size_t i = 0; i < n; ++i) grad_z->v[i] = gz_a.v[i] + gz_b.v[i];
            }
        }
        return step;
    }

    if (with_grads) {
        nn::Tensor<T> gz_a = model.backward(grad_a, ctx_a);
        if (grad_z) grad_z->v = std::move(gz_a.v);
    }
    return step;
}

// Objective value at the current (theta, z) without touching gradients.
// Same arithmetic and probe stream as run_loss_step.
template <typename T>
double loss_value(nn::SkipNet<T>& model, const nn::Tensor<T>& z, const nn::Tensor<T>& y,
                  const LossMode& mode, std::uint64_t step_seed) {
    return run_loss_step<T>(model, z, y, mode, step_seed, nullptr, false).value;
}

struct TrainResult {
    Cube estimate;
    TrainingTrace trace;
};

// The optimization loop over theta (and z when optimize_input): an
// adaptive-moment first-order optimizer for cfg.iterations steps, with one
// fresh MC probe per iteration seeded from (run seed, iteration). No early
// stopping in any mode; runs always use the full budget so late-training
// behavior stays visible. Fully deterministic given the config.
inline TrainResult train(nn::SkipNet<float>& model, const Cube& y, const TrainConfig& cfg,
                         const Cube* reference = nullptr) {
    cfg.validate();
    if (model.bands() != y.bands || model.height() != y.height || model.width() != y.width)
        throw ShapeError("train: model shape does not match y");
    if (reference && !reference->same_shape(y))
        throw ShapeError("train: reference shape does not match y");

    // SURE starts from z = y (its objective is written at the observation);
    // whether z then moves is governed by optimize_input like every other
    // mode, so the loss-vs-input-optimization ablation grid stays expressible.
    const bool sure_mode = cfg.loss.kind == LossKind::SURE;
    const bool joint = cfg.optimize_input;

    nn::Tensor<float> y_t = nn::tensor_from_cube<float>(y);
    nn::Tensor<float> z(y_t.c, y_t.h, y_t.w);
    if (sure_mode || cfg.input_init == InputInit::noisy_y) {
        z.v = y_t.v;
    } else {
        // The customary single-image-prior input scale.
        Rng rng(Rng::mix(cfg.seed, 0x5eed));
        rng.fill_normal(std::span<float>(z.v), 0.1);
    }
    nn::Tensor<float> gz(z.c, z.h, z.w);

    nn::Adam<float> opt_theta(cfg.lr_theta);
    opt_theta.attach(model);
    nn::Adam<float> opt_z(cfg.lr_z);
    if (joint) opt_z.add(z.v, gz.v);

    TrainingTrace trace;
    Cube estimate;
    auto evaluate = [&](int iteration, double loss) {
        nn::Tensor<float> out = model.forward(z);
        TraceRecord r;
        r.iteration = iteration;
        r.loss = loss;
        Cube est = nn::cube_from_tensor(out);
        if (reference) {
            MetricsReport m = compute_metrics(*reference, est);
            r.mpsnr = m.mpsnr;
            r.mssim = m.mssim;
            r.nmse = m.nmse;
        }
        trace.records.push_back(r);
        return est;
    };

    if (cfg.iterations == 0) {
        estimate = nn::cube_from_tensor(model.forward(z));
        trace.refresh_summary();
        return {std::move(estimate), std::move(trace)};
    }

    for (int it = 1; it <= cfg.iterations; ++it) {
        const std::uint64_t step_seed = Rng::mix(cfg.seed, static_cast<std::uint64_t>(it));
        LossStep<float> step =
            run_loss_step<float>(model, z, y_t, cfg.loss, step_seed, joint ? &gz : nullptr);
        if (!std::isfinite(step.value))
            throw TrainingError("non-finite loss at iteration " + std::to_string(it), it);
        opt_theta.step();
        if (joint) opt_z.step();

        if (it % cfg.eval_every == 0 || it == cfg.iterations) {
            Cube est = evaluate(it, step.value);
            if (it == cfg.iterations) estimate = std::move(est);
        }
        if (cfg.checkpoint_every > 0 && it % cfg.checkpoint_every == 0) {
            std::filesystem::create_directories(cfg.checkpoint_dir);
            nn::save_snapshot(model, cfg.checkpoint_dir + "/snapshot_" + std::to_string(it) + ".bin");
        }
    }
    trace.refresh_summary();
    return {std::move(estimate), std::move(trace)};
}

} // namespace hsi
