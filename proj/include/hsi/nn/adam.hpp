#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace hsi::nn {

// Adaptive-moment optimizer over registered (value, grad) buffer pairs.
// Registered buffers must not be reallocated afterwards.
template <typename T>
class Adam {
public:
    explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void add(std::vector<T>& value, std::vector<T>& grad) {
        slots_.push_back(Slot{&value, &grad,
                              std::vector<T>(value.size(), T(0)),
                              std::vector<T>(value.size(), T(0))});
    }

    template <typename Model>
    void attach(Model& model) {
        model.for_each_param([&](std::vector<T>& w, std::vector<T>& g) { add(w, g); });
    }

    void step() {
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, double(t_));
        const double bc2 = 1.0 - std::pow(beta2_, double(t_));
        for (auto& s : slots_) {
            auto& w = *s.value;
            auto& g = *s.grad;
            for (std::size_t i = 0; i < w.size(); ++i) {
                const double gi = g[i];
                const double m = beta1_ * s.m[i] + (1.0 - beta1_) * gi;
                const double v = beta2_ * s.v[i] + (1.0 - beta2_) * gi * gi;
                s.m[i] = static_cast<T>(m);
                s.v[i] = static_cast<T>(v);
                w[i] -= static_cast<T>(lr_ * (m / bc1) / (std::sqrt(v / bc2) + eps_));
            }
        }
    }

    double learning_rate() const { return lr_; }

private:
    struct Slot {
        std::vector<T>* value;
        std::vector<T>* grad;
        std::vector<T> m, v;
    };
    double lr_, beta1_, beta2_, eps_;
    std::int64_t t_ = 0;
    std::vector<Slot> slots_;
};

} // namespace hsi::nn
