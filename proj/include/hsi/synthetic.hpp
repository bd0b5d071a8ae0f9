#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "hsi/cube.hpp"
#include "hsi/rng.hpp"

namespace hsi {

// Deterministic synthetic scene: a handful of "materials", each a smooth
// spectral signature, mixed through spatial abundance maps built from
// rectangles, discs, and a gradient. The result has the two properties the
// denoisers rely on in real data: piecewise spatial structure with sharp
// edges, and strongly correlated (low-rank) spectra. Output is normalized.
inline Cube make_scene(int width, int height, int bands, std::uint64_t seed) {
    if (width < 2 || height < 2 || bands < 1)
        throw ConfigError("make_scene: dimensions too small");
    Rng rng(seed);
    constexpr int kMaterials = 5;

    // Smooth positive spectral signatures: two sinusoids plus a slope.
    std::vector<std::vector<double>> sig(kMaterials, std::vector<double>(static_cast<std::size_t>(bands)));
    for (auto& s : sig) {
        const double f1 = rng.uniform(0.5, 1.5), p1 = rng.uniform(0.0, 1.0);
        const double f2 = rng.uniform(2.0, 4.0), p2 = rng.uniform(0.0, 1.0);
        const double slope = rng.uniform(-0.3, 0.3), base = rng.uniform(0.25, 0.75);
        for (int b = 0; b < bands; ++b) {
            const double t = bands > 1 ? double(b) / (bands - 1) : 0.0;
            double v = base + slope * t + 0.3 * std::sin(2.0 * M_PI * (f1 * t + p1)) +
                       0.1 * std::sin(2.0 * M_PI * (f2 * t + p2));
            s[static_cast<std::size_t>(b)] = std::max(0.05, v);
        }
    }

    // Per-material score fields; softmax turns them into abundances.
    std::vector<std::vector<double>> score(
        kMaterials, std::vector<double>(static_cast<std::size_t>(width) * height, 0.0));
    for (int m = 0; m < kMaterials; ++m) {
        auto& f = score[static_cast<std::size_t>(m)];
        const double gx = rng.uniform(-1.0, 1.0), gy = rng.uniform(-1.0, 1.0);
        for (int r = 0; r < height; ++r)
            for (int c = 0; c < width; ++c)
                f[static_cast<std::size_t>(r) * width + c] =
                    gx * c / double(width) + gy * r / double(height);
        const int rects = 2 + static_cast<int>(rng.below(3));
        for (int k = 0; k < rects; ++k) {
            const int r0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(height)));
            const int c0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(width)));
            const int rh = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(height / 2 + 1)));
            const int rw = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(width / 2 + 1)));
            const double amp = rng.uniform(1.0, 3.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
            for (int r = r0; r < std::min(height, r0 + rh); ++r)
                for (int c = c0; c < std::min(width, c0 + rw); ++c)
                    f[static_cast<std::size_t>(r) * width + c] += amp;
        }
        for (int k = 0; k < 2; ++k) {
            const double cy = rng.uniform(0.0, height), cx = rng.uniform(0.0, width);
            const double rad = rng.uniform(0.08, 0.25) * std::min(width, height);
            const double amp = rng.uniform(1.0, 3.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
            for (int r = 0; r < height; ++r)
                for (int c = 0; c < width; ++c)
                    if ((r - cy) * (r - cy) + (c - cx) * (c - cx) < rad * rad)
                        f[static_cast<std::size_t>(r) * width + c] += amp;
        }
    }

    Cube cube = Cube::zeros(width, height, bands);
    std::vector<double> a(kMaterials);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const std::size_t p = static_cast<std::size_t>(r) * width + c;
            double mx = score[0][p];
            for (int m = 1; m < kMaterials; ++m) mx = std::max(mx, score[static_cast<std::size_t>(m)][p]);
            double z = 0.0;
            for (int m = 0; m < kMaterials; ++m) {
                a[static_cast<std::size_t>(m)] = std::exp(2.0 * (score[static_cast<std::size_t>(m)][p] - mx));
                z += a[static_cast<std::size_t>(m)];
            }
            for (int b = 0; b < bands; ++b) {
                double v = 0.0;
                for (int m = 0; m < kMaterials; ++m)
                    v += a[static_cast<std::size_t>(m)] / z * sig[static_cast<std::size_t>(m)][static_cast<std::size_t>(b)];
                cube.at(r, c, b) = static_cast<float>(v);
            }
        }
    }
    return normalize(cube);
}

} // namespace hsi
