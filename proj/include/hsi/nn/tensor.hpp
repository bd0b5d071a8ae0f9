#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hsi/cube.hpp"
#include "hsi/error.hpp"

namespace hsi::nn {

// Dense CHW tensor. Channels map to spectral bands at the network boundary.
template <typename T>
struct Tensor {
    int c = 0, h = 0, w = 0;
    std::vector<T> v;

    Tensor() = default;
    Tensor(int c_, int h_, int w_)
        : c(c_), h(h_), w(w_), v(static_cast<std::size_t>(c_) * h_ * w_, T(0)) {}

    std::int64_t size() const { return std::int64_t(c) * h * w; }
    std::int64_t plane_size() const { return std::int64_t(h) * w; }

    T* plane(int ci) { return v.data() + static_cast<std::size_t>(ci) * h * w; }
    const T* plane(int ci) const { return v.data() + static_cast<std::size_t>(ci) * h * w; }

    T& at(int ci, int y, int x) {
        return v[(static_cast<std::size_t>(ci) * h + y) * w + x];
    }
    T at(int ci, int y, int x) const {
        return v[(static_cast<std::size_t>(ci) * h + y) * w + x];
    }

    bool same_shape(const Tensor& o) const { return c == o.c && h == o.h && w == o.w; }

    void zero() { std::fill(v.begin(), v.end(), T(0)); }
};

template <typename T>
Tensor<T> tensor_from_cube(const Cube& cube) {
    Tensor<T> t(cube.bands, cube.height, cube.width);
    for (int b = 0; b < cube.bands; ++b)
        for (int r = 0; r < cube.height; ++r)
            for (int c = 0; c < cube.width; ++c) t.at(b, r, c) = static_cast<T>(cube.at(r, c, b));
    return t;
}

template <typename T>
Cube cube_from_tensor(const Tensor<T>& t) {
    Cube cube = Cube::zeros(t.w, t.h, t.c);
    for (int b = 0; b < t.c; ++b)
        for (int r = 0; r < t.h; ++r)
            for (int c = 0; c < t.w; ++c) cube.at(r, c, b) = static_cast<float>(t.at(b, r, c));
    return cube;
}

} // namespace hsi::nn
