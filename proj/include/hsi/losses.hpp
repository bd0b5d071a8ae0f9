#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsi/error.hpp"
#include "hsi/rng.hpp"

namespace hsi {

enum class LossKind { L2, SURE, SMOOTH_L1, UNIFIED };
enum class SigmaSource { estimate, oracle };

inline std::string to_string(LossKind k) {
    switch (k) {
        case LossKind::L2: return "l2";
        case LossKind::SURE: return "sure";
        case LossKind::SMOOTH_L1: return "smooth_l1";
        case LossKind::UNIFIED: return "unified";
    }
    return "?";
}

inline LossKind loss_kind_from_string(const std::string& s) {
    if (s == "l2") return LossKind::L2;
    if (s == "sure") return LossKind::SURE;
    if (s == "smooth_l1") return LossKind::SMOOTH_L1;
    if (s == "unified") return LossKind::UNIFIED;
    throw ConfigError("unknown loss kind '" + s + "'");
}

// One of the four training objectives plus its parameters. `sigma` is the
// resolved noise level used by the divergence weight; `sigma_source` records
// where the harness should take it from.
struct LossMode {
    LossKind kind = LossKind::UNIFIED;
    double beta = 1e-3;    // Smooth-l1 knee
    double epsilon = 1e-3; // Monte Carlo perturbation
    double sigma = 0.0;
    SigmaSource sigma_source = SigmaSource::estimate;

    bool uses_divergence() const { return kind == LossKind::SURE || kind == LossKind::UNIFIED; }

    void validate() const {
        if (beta <= 0.0) throw ConfigError("beta must be positive");
        if (epsilon <= 0.0) throw ConfigError("epsilon must be positive");
        if (uses_divergence() && !(sigma > 0.0))
            throw ConfigError(to_string(kind) + " loss requires sigma > 0");
    }
};

inline void to_json(nlohmann::json& j, const LossMode& m) {
    j = nlohmann::json{{"loss", to_string(m.kind)},
                       {"beta", m.beta},
                       {"epsilon", m.epsilon},
                       {"sigma_source", m.sigma_source == SigmaSource::estimate ? "estimate" : "oracle"}};
    if (m.sigma > 0.0) j["sigma"] = m.sigma;
}

inline void from_json(const nlohmann::json& j, LossMode& m) {
    m.kind = loss_kind_from_string(j.value("loss", "unified"));
    m.beta = j.value("beta", 1e-3);
    m.epsilon = j.value("epsilon", 1e-3);
    const std::string src = j.value("sigma_source", "estimate");
    if (src != "estimate" && src != "oracle")
        throw ConfigError("sigma_source must be estimate|oracle");
    m.sigma_source = src == "estimate" ? SigmaSource::estimate : SigmaSource::oracle;
    m.sigma = j.value("sigma", 0.0);
}

namespace detail {

inline void require_equal_length(std::size_t a, std::size_t b, const char* op) {
    if (a != b)
        throw ShapeError(std::string(op) + ": length mismatch " + std::to_string(a) + " vs " +
                         std::to_string(b));
}

} // namespace detail

// Mean of squared differences, (1/n)||pred - target||^2.
template <typename T>
double l2_loss(std::span<const T> pred, std::span<const T> target) {
    detail::require_equal_length(pred.size(), target.size(), "l2_loss");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = double(pred[i]) - double(target[i]);
        s += d * d;
    }
    return s / double(pred.size());
}

// d/dpred of l2_loss: 2 (pred - target) / n.
template <typename T>
void l2_loss_grad(std::span<const T> pred, std::span<const T> target, std::span<T> grad) {
    detail::require_equal_length(pred.size(), target.size(), "l2_loss_grad");
    const double inv = 2.0 / double(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i)
        grad[i] = static_cast<T>(inv * (double(pred[i]) - double(target[i])));
}

// Mean of the element-wise Smooth-l1 (Moreau envelope of |.|):
// d^2/(2 beta) inside the knee, |d| - beta/2 outside. Continuous with
// continuous first derivative at |d| = beta.
template <typename T>
double smooth_l1(std::span<const T> pred, std::span<const T> target, double beta) {
    detail::require_equal_length(pred.size(), target.size(), "smooth_l1");
    if (beta <= 0.0) throw ConfigError("smooth_l1: beta must be positive");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = std::abs(double(pred[i]) - double(target[i]));
        s += d <= beta ? d * d / (2.0 * beta) : d - beta / 2.0;
    }
    return s / double(pred.size());
}

// d/dpred of smooth_l1: d/(n beta) inside the knee, sign(d)/n outside.
template <typename T>
void smooth_l1_grad(std::span<const T> pred, std::span<const T> target, double beta,
                    std::span<T> grad) {
    detail::require_equal_length(pred.size(), target.size(), "smooth_l1_grad");
    if (beta <= 0.0) throw ConfigError("smooth_l1_grad: beta must be positive");
    const double inv = 1.0 / double(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = double(pred[i]) - double(target[i]);
        grad[i] = static_cast<T>(inv * (std::abs(d) <= beta ? d / beta
                                                            : (d > 0.0 ? 1.0 : -1.0)));
    }
}

// The randomized divergence estimate b^T (f(z + eps b) - f(z)) / eps split
// into its pieces, so callers that already have both forward passes (and
// need gradients through them) can reuse the probe. b is a constant sample
// per call; gradients flow only through the two forward passes.
struct DivergenceProbe {
    template <typename T>
    static std::vector<T> draw(std::size_t n, Rng& rng) {
        std::vector<T> b(n);
        rng.fill_normal(std::span<T>(b));
        return b;
    }

    template <typename T>
    static double estimate(std::span<const T> b, std::span<const T> f_z,
                           std::span<const T> f_z_eps_b, double epsilon) {
        detail::require_equal_length(f_z.size(), f_z_eps_b.size(), "mc_divergence");
        detail::require_equal_length(b.size(), f_z.size(), "mc_divergence");
        double s = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i)
            s += double(b[i]) * (double(f_z_eps_b[i]) - double(f_z[i]));
        return s / epsilon;
    }
};

// Monte Carlo divergence of a map f: R^n -> R^n at z. Draws a fresh probe
// from `rng` on every call. F is any callable vector-in/vector-out.
template <typename T, typename F>
double mc_divergence(F&& f, std::span<const T> z, double epsilon, Rng& rng) {
    if (epsilon <= 0.0) throw ConfigError("mc_divergence: epsilon must be positive");
    const std::vector<T> b = DivergenceProbe::draw<T>(z.size(), rng);
    std::vector<T> zb(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) zb[i] = z[i] + static_cast<T>(epsilon) * b[i];
    const std::vector<T> f_z = f(std::span<const T>(z));
    const std::vector<T> f_zb = f(std::span<const T>(zb));
    return DivergenceProbe::estimate<T>(b, f_z, f_zb, epsilon);
}

// SURE objective with the Monte Carlo divergence:
// (1/n)||y - f(y)||^2 - sigma^2 + (2 sigma^2 / n) div_y f(y).
// The input is pinned to y; this is the value an optimizer in SURE mode sees
// (the -sigma^2 constant is kept in the reported value).
template <typename T, typename F>
double sure_loss(F&& f, std::span<const T> y, double sigma, double epsilon, Rng& rng) {
    if (!(sigma > 0.0)) throw ConfigError("sure_loss: sigma must be positive");
    const std::size_t n = y.size();
    const std::vector<T> b = DivergenceProbe::draw<T>(n, rng);
    std::vector<T> yb(n);
    for (std::size_t i = 0; i < n; ++i) yb[i] = y[i] + static_cast<T>(epsilon) * b[i];
    const std::vector<T> f_y = f(std::span<const T>(y));
    const std::vector<T> f_yb = f(std::span<const T>(yb));
    const double div = DivergenceProbe::estimate<T>(b, f_y, f_yb, epsilon);
    return l2_loss<T>(f_y, y) - sigma * sigma + (2.0 * sigma * sigma / double(n)) * div;
}

// Unified objective: Smooth-l1 data fidelity plus divergence regularization
// at the current (learnable) input z:
// smooth_l1(f(z), y; beta) + (2 sigma^2 / n) div_z f(z).
template <typename T, typename F>
double unified_loss(F&& f, std::span<const T> z, std::span<const T> y, double sigma, double beta,
                    double epsilon, Rng& rng) {
    if (!(sigma > 0.0)) throw ConfigError("unified_loss: sigma must be positive");
    detail::require_equal_length(z.size(), y.size(), "unified_loss");
    const std::size_t n = z.size();
    const std::vector<T> b = DivergenceProbe::draw<T>(n, rng);
    std::vector<T> zb(n);
    for (std::size_t i = 0; i < n; ++i) zb[i] = z[i] + static_cast<T>(epsilon) * b[i];
    const std::vector<T> f_z = f(std::span<const T>(z));
    const std::vector<T> f_zb = f(std::span<const T>(zb));
    const double div = DivergenceProbe::estimate<T>(b, f_z, f_zb, epsilon);
    return smooth_l1<T>(f_z, y, beta) + (2.0 * sigma * sigma / double(n)) * div;
}

} // namespace hsi
