#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hsi/cube.hpp"
#include "hsi/error.hpp"

namespace hsi {

// Single spatial plane, used for per-band work (wavelet subbands, SSIM maps).
struct Plane {
    int height = 0;
    int width = 0;
    std::vector<float> v;

    Plane() = default;
    Plane(int h, int w) : height(h), width(w), v(static_cast<std::size_t>(h) * w, 0.0f) {}
    float& at(int r, int c) { return v[static_cast<std::size_t>(r) * width + c]; }
    float at(int r, int c) const { return v[static_cast<std::size_t>(r) * width + c]; }
};

inline Plane band_plane(const Cube& cube, int band) {
    if (band < 0 || band >= cube.bands)
        throw ConfigError("band index " + std::to_string(band) + " out of range");
    Plane p(cube.height, cube.width);
    for (int r = 0; r < cube.height; ++r)
        for (int c = 0; c < cube.width; ++c) p.at(r, c) = cube.at(r, c, band);
    return p;
}

// Single-level Haar HH subband at half resolution. For the 2x2 block
// {a, b; c, d} anchored at (2i, 2j), HH(i, j) = (a - b - c + d) / 2. The
// transform is orthonormal, so i.i.d. N(0, sigma^2) inputs give i.i.d.
// N(0, sigma^2) coefficients. An odd trailing row/column is dropped.
inline Plane dwt_hh(const Plane& image) {
    if (image.height < 2 || image.width < 2)
        throw ShapeError("dwt_hh needs at least a 2x2 image");
    Plane out(image.height / 2, image.width / 2);
    for (int i = 0; i < out.height; ++i) {
        for (int j = 0; j < out.width; ++j) {
            const float a = image.at(2 * i, 2 * j);
            const float b = image.at(2 * i, 2 * j + 1);
            const float c = image.at(2 * i + 1, 2 * j);
            const float d = image.at(2 * i + 1, 2 * j + 1);
            out.at(i, j) = 0.5f * (a - b - c + d);
        }
    }
    return out;
}

// Blind per-band noise level estimates and their mean.
struct SigmaEstimate {
    std::vector<double> per_band;
    double pooled = 0.0;
};

namespace detail {

// Median with the usual even-length convention (mean of the middle pair).
inline double median_inplace(std::vector<float>& v) {
    const std::size_t n = v.size();
    const std::size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (n % 2 == 0) {
        const auto lower = std::max_element(v.begin(), v.begin() + mid);
        m = 0.5 * (m + *lower);
    }
    return m;
}

} // namespace detail

// Robust MAD estimator on the finest Haar high-pass subband:
// sigma_i = median(|HH_i|) / 0.6745 per band, pooled by the mean over bands.
inline SigmaEstimate estimate_sigma(const Cube& cube) {
    SigmaEstimate est;
    est.per_band.reserve(static_cast<std::size_t>(cube.bands));
    for (int b = 0; b < cube.bands; ++b) {
        Plane hh = dwt_hh(band_plane(cube, b));
        for (auto& x : hh.v) x = std::abs(x);
        est.per_band.push_back(detail::median_inplace(hh.v) / 0.6745);
    }
    double sum = 0.0;
    for (double s : est.per_band) sum += s;
    est.pooled = sum / double(cube.bands);
    return est;
}

} // namespace hsi
