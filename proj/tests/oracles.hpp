#pragma once

// Independent brute-force references for the test suites. These are kept
// definitionally simple and share no code with the implementations they
// check: the divergence of a linear map is its trace by direct diagonal
// summation, gradients come from central differences, and noise statistics
// from element-by-element comparison.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "hsi/cube.hpp"

namespace oracles {

// trace(A) for a square row-major matrix.
inline double linear_divergence(const std::vector<double>& a, int n) {
    if (static_cast<std::int64_t>(a.size()) != std::int64_t(n) * n)
        throw std::invalid_argument("linear_divergence: matrix is not n x n");
    double t = 0.0;
    for (int i = 0; i < n; ++i) t += a[static_cast<std::size_t>(i) * n + i];
    return t;
}

// Central differences (g(p + h e_i) - g(p - h e_i)) / (2h).
inline std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& g,
                                       std::vector<double> p, double h) {
    if (h <= 0.0) throw std::invalid_argument("fd_gradient: h must be positive");
    std::vector<double> grad(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double keep = p[i];
        p[i] = keep + h;
        const double up = g(p);
        p[i] = keep - h;
        const double down = g(p);
        p[i] = keep;
        if (!std::isfinite(up) || !std::isfinite(down))
            throw std::runtime_error("fd_gradient: non-finite evaluation");
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

struct NoiseStats {
    double realized_snr_db = 0.0; // +inf sentinel when clean == noisy
    std::int64_t altered_voxel_count = 0;
    std::set<int> striped_band_set; // bands with any difference
};

inline NoiseStats empirical_noise_stats(const hsi::Cube& clean, const hsi::Cube& noisy) {
    if (!clean.same_shape(noisy)) throw std::invalid_argument("empirical_noise_stats: shape mismatch");
    NoiseStats stats;
    double signal = 0.0, noise = 0.0;
    for (int r = 0; r < clean.height; ++r)
        for (int c = 0; c < clean.width; ++c)
            for (int b = 0; b < clean.bands; ++b) {
                const double x = clean.at(r, c, b);
                const double d = double(noisy.at(r, c, b)) - x;
                signal += x * x;
                noise += d * d;
                if (d != 0.0) {
                    ++stats.altered_voxel_count;
                    stats.striped_band_set.insert(b);
                }
            }
    stats.realized_snr_db = noise == 0.0 ? std::numeric_limits<double>::infinity()
                                         : 10.0 * std::log10(signal / noise);
    return stats;
}

} // namespace oracles
