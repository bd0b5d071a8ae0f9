#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "hsi/error.hpp"
#include "hsi/nn/tensor.hpp"
#include "hsi/rng.hpp"

namespace hsi::nn {

// Reusable im2col buffers; one per forward/backward caller.
template <typename T>
struct Workspace {
    std::vector<T> cols;
    std::vector<T> gcols;
};

namespace detail {

// reflect-101 (mirror without repeating the edge); valid for |i| < n.
inline int reflect(int i, int n) {
    if (i < 0) return -i;
    if (i >= n) return 2 * n - 2 - i;
    return i;
}

template <typename T>
using MatRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

} // namespace detail

// 2-D convolution with reflection padding (k odd, pad = k/2) and stride 1 or 2.
// Weights live in [out_c][in_c][ky][kx] order; the forward is an im2col + GEMM.
template <typename T>
struct Conv2d {
    int in_c = 0, out_c = 0, k = 1, stride = 1;
    std::vector<T> w, b;   // parameters
    std::vector<T> gw, gb; // gradients, accumulated by backward()

    struct Ctx {
        Tensor<T> x; // saved input; im2col is recomputed in backward
    };

    void init(int in_channels, int out_channels, int kernel, int stride_, Rng& rng) {
        in_c = in_channels;
        out_c = out_channels;
        k = kernel;
        stride = stride_;
        const std::size_t nw = static_cast<std::size_t>(out_c) * in_c * k * k;
        w.resize(nw);
        b.resize(static_cast<std::size_t>(out_c));
        gw.assign(nw, T(0));
        gb.assign(static_cast<std::size_t>(out_c), T(0));
        const double bound = 1.0 / std::sqrt(double(in_c) * k * k);
        for (auto& x : w) x = static_cast<T>(rng.uniform(-bound, bound));
        for (auto& x : b) x = static_cast<T>(rng.uniform(-bound, bound));
    }

    int out_h(int h) const { return (h + 2 * (k / 2) - k) / stride + 1; }
    int out_w(int wd) const { return (wd + 2 * (k / 2) - k) / stride + 1; }

    Tensor<T> forward(const Tensor<T>& x, Ctx* ctx, Workspace<T>& ws) const {
        const int oh = out_h(x.h), ow = out_w(x.w);
        Tensor<T> y(out_c, oh, ow);
        if (k == 1 && stride == 1) {
            // 1x1: plain channel-mixing GEMM, no im2col needed.
            Eigen::Map<const detail::MatRM<T>> W(w.data(), out_c, in_c);
            Eigen::Map<const detail::MatRM<T>> X(x.v.data(), in_c, x.plane_size());
            Eigen::Map<detail::MatRM<T>> Y(y.v.data(), out_c, y.plane_size());
            Y.noalias() = W * X;
        } else {
            const std::int64_t M = std::int64_t(in_c) * k * k, P = std::int64_t(oh) * ow;
            im2col(x, oh, ow, ws.cols);
            Eigen::Map<const detail::MatRM<T>> W(w.data(), out_c, M);
            Eigen::Map<const detail::MatRM<T>> C(ws.cols.data(), P, M);
            Eigen::Map<detail::MatRM<T>> Y(y.v.data(), out_c, P);
            Y.noalias() = W * C.transpose();
        }
        for (int oc = 0; oc < out_c; ++oc) {
            T* p = y.plane(oc);
            const T bias = b[static_cast<std::size_t>(oc)];
            for (std::int64_t i = 0; i < y.plane_size(); ++i) p[i] += bias;
        }
        if (ctx) ctx->x = x;
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy, const Ctx& ctx, Workspace<T>& ws) {
        const Tensor<T>& x = ctx.x;
        const int oh = gy.h, ow = gy.w;
        const std::int64_t P = std::int64_t(oh) * ow;
        Tensor<T> gx(in_c, x.h, x.w);

        Eigen::Map<const detail::MatRM<T>> GY(gy.v.data(), out_c, P);
        for (int oc = 0; oc < out_c; ++oc) {
            T s = T(0);
            const T* p = gy.plane(oc);
            for (std::int64_t i = 0; i < P; ++i) s += p[i];
            gb[static_cast<std::size_t>(oc)] += s;
        }

        if (k == 1 && stride == 1) {
            Eigen::Map<const detail::MatRM<T>> X(x.v.data(), in_c, P);
            Eigen::Map<detail::MatRM<T>> GW(gw.data(), out_c, in_c);
            GW.noalias() += GY * X.transpose();
            Eigen::Map<const detail::MatRM<T>> W(w.data(), out_c, in_c);
            Eigen::Map<detail::MatRM<T>> GX(gx.v.data(), in_c, P);
            GX.noalias() = W.transpose() * GY;
            return gx;
        }

        const std::int64_t M = std::int64_t(in_c) * k * k;
        im2col(x, oh, ow, ws.cols);
        Eigen::Map<const detail::MatRM<T>> C(ws.cols.data(), P, M);
        Eigen::Map<detail::MatRM<T>> GW(gw.data(), out_c, M);
        GW.noalias() += GY * C;

        ws.gcols.resize(static_cast<std::size_t>(P) * M);
        Eigen::Map<detail::MatRM<T>> GC(ws.gcols.data(), P, M);
        Eigen::Map<const detail::MatRM<T>> W(w.data(), out_c, M);
        GC.noalias() = GY.transpose() * W;

        // col2im: scatter-add through the same reflected indices.
        const int pad = k / 2;
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                const T* row = ws.gcols.data() + (static_cast<std::size_t>(oy) * ow + ox) * M;
                for (int ci = 0; ci < in_c; ++ci) {
                    T* xp = gx.plane(ci);
                    for (int ky = 0; ky < k; ++ky) {
                        const int sy = detail::reflect(oy * stride + ky - pad, x.h);
                        for (int kx = 0; kx < k; ++kx) {
                            const int sx = detail::reflect(ox * stride + kx - pad, x.w);
                            xp[static_cast<std::size_t>(sy) * x.w + sx] +=
                                row[(static_cast<std::size_t>(ci) * k + ky) * k + kx];
                        }
                    }
                }
            }
        }
        return gx;
    }

private:
    // Row-major (P x M) patch matrix: one row per output pixel.
    void im2col(const Tensor<T>& x, int oh, int ow, std::vector<T>& cols) const {
        const std::int64_t M = std::int64_t(in_c) * k * k;
        cols.resize(static_cast<std::size_t>(oh) * ow * M);
        const int pad = k / 2;
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                T* row = cols.data() + (static_cast<std::size_t>(oy) * ow + ox) * M;
                for (int ci = 0; ci < in_c; ++ci) {
                    const T* xp = x.plane(ci);
                    for (int ky = 0; ky < k; ++ky) {
                        const int sy = detail::reflect(oy * stride + ky - pad, x.h);
                        for (int kx = 0; kx < k; ++kx) {
                            const int sx = detail::reflect(ox * stride + kx - pad, x.w);
                            row[(static_cast<std::size_t>(ci) * k + ky) * k + kx] =
                                xp[static_cast<std::size_t>(sy) * x.w + sx];
                        }
                    }
                }
            }
        }
    }
};

// Per-channel normalization over spatial positions (batch statistics of the
// single image), with learned scale/shift. Disabled instances pass through.
template <typename T>
struct ChannelNorm {
    int c = 0;
    bool enabled = true;
    T eps = T(1e-5);
    std::vector<T> gamma, beta, ggamma, gbeta;

    struct Ctx {
        Tensor<T> xhat;
        std::vector<T> inv_std;
    };

    void init(int channels, bool enabled_) {
        c = channels;
        enabled = enabled_;
        if (!enabled) return;
        gamma.assign(static_cast<std::size_t>(c), T(1));
        beta.assign(static_cast<std::size_t>(c), T(0));
        ggamma.assign(static_cast<std::size_t>(c), T(0));
        gbeta.assign(static_cast<std::size_t>(c), T(0));
    }

    Tensor<T> forward(const Tensor<T>& x, Ctx* ctx) const {
        if (!enabled) return x;
        Tensor<T> y(x.c, x.h, x.w);
        if (ctx) {
            ctx->xhat = Tensor<T>(x.c, x.h, x.w);
            ctx->inv_std.assign(static_cast<std::size_t>(x.c), T(0));
        }
        const std::int64_t n = x.plane_size();
        for (int ci = 0; ci < x.c; ++ci) {
            const T* xp = x.plane(ci);
            double mean = 0.0;
            for (std::int64_t i = 0; i < n; ++i) mean += xp[i];
            mean /= double(n);
            double var = 0.0;
            for (std::int64_t i = 0; i < n; ++i) {
                const double d = double(xp[i]) - mean;
                var += d * d;
            }
            var /= double(n);
            const T inv = static_cast<T>(1.0 / std::sqrt(var + double(eps)));
            const T g = gamma[static_cast<std::size_t>(ci)], bt = beta[static_cast<std::size_t>(ci)];
            T* yp = y.plane(ci);
            T* hp = ctx ? ctx->xhat.plane(ci) : nullptr;
            for (std::int64_t i = 0; i < n; ++i) {
                const T xh = static_cast<T>((double(xp[i]) - mean)) * inv;
                if (hp) hp[i] = xh;
                yp[i] = g * xh + bt;
            }
            if (ctx) ctx->inv_std[static_cast<std::size_t>(ci)] = inv;
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy, const Ctx& ctx) {
        if (!enabled) return gy;
        Tensor<T> gx(gy.c, gy.h, gy.w);
        const std::int64_t n = gy.plane_size();
        for (int ci = 0; ci < gy.c; ++ci) {
            const T* gp = gy.plane(ci);
            const T* hp = ctx.xhat.plane(ci);
            double s1 = 0.0, s2 = 0.0;
            for (std::int64_t i = 0; i < n; ++i) {
                s1 += gp[i];
                s2 += double(gp[i]) * hp[i];
            }
            gbeta[static_cast<std::size_t>(ci)] += static_cast<T>(s1);
            ggamma[static_cast<std::size_t>(ci)] += static_cast<T>(s2);
            const double m1 = s1 / double(n), m2 = s2 / double(n);
            const double scale =
                double(gamma[static_cast<std::size_t>(ci)]) * ctx.inv_std[static_cast<std::size_t>(ci)];
            T* op = gx.plane(ci);
            for (std::int64_t i = 0; i < n; ++i)
                op[i] = static_cast<T>(scale * (double(gp[i]) - m1 - double(hp[i]) * m2));
        }
        return gx;
    }
};

template <typename T>
struct LeakyRelu {
    T slope = T(0.2);

    struct Ctx {
        Tensor<T> x;
    };

    Tensor<T> forward(const Tensor<T>& x, Ctx* ctx) const {
        Tensor<T> y(x.c, x.h, x.w);
        for (std::size_t i = 0; i < x.v.size(); ++i)
            y.v[i] = x.v[i] > T(0) ? x.v[i] : slope * x.v[i];
        if (ctx) ctx->x = x;
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy, const Ctx& ctx) const {
        Tensor<T> gx(gy.c, gy.h, gy.w);
        for (std::size_t i = 0; i < gy.v.size(); ++i)
            gx.v[i] = ctx.x.v[i] > T(0) ? gy.v[i] : slope * gy.v[i];
        return gx;
    }
};

// 2x upsampling. Bilinear uses the half-pixel-center convention (source
// coordinate (o + 0.5)/2 - 0.5, clamped), so edges replicate.
template <typename T>
struct Upsample2x {
    bool bilinear = true;

    Tensor<T> forward(const Tensor<T>& x) const {
        Tensor<T> y(x.c, x.h * 2, x.w * 2);
        if (!bilinear) {
            for (int ci = 0; ci < x.c; ++ci)
                for (int oy = 0; oy < y.h; ++oy)
                    for (int ox = 0; ox < y.w; ++ox)
                        y.at(ci, oy, ox) = x.at(ci, oy / 2, ox / 2);
            return y;
        }
        for (int oy = 0; oy < y.h; ++oy) {
            int y0, y1;
            T fy;
            src_coords(oy, x.h, y0, y1, fy);
            for (int ox = 0; ox < y.w; ++ox) {
                int x0, x1;
                T fx;
                src_coords(ox, x.w, x0, x1, fx);
                for (int ci = 0; ci < x.c; ++ci) {
                    const T v00 = x.at(ci, y0, x0), v01 = x.at(ci, y0, x1);
                    const T v10 = x.at(ci, y1, x0), v11 = x.at(ci, y1, x1);
                    y.at(ci, oy, ox) = (T(1) - fy) * ((T(1) - fx) * v00 + fx * v01) +
                                       fy * ((T(1) - fx) * v10 + fx * v11);
                }
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy, int in_h, int in_w) const {
        Tensor<T> gx(gy.c, in_h, in_w);
        if (!bilinear) {
            for (int ci = 0; ci < gy.c; ++ci)
                for (int oy = 0; oy < gy.h; ++oy)
                    for (int ox = 0; ox < gy.w; ++ox)
                        gx.at(ci, oy / 2, ox / 2) += gy.at(ci, oy, ox);
            return gx;
        }
        for (int oy = 0; oy < gy.h; ++oy) {
            int y0, y1;
            T fy;
            src_coords(oy, in_h, y0, y1, fy);
            for (int ox = 0; ox < gy.w; ++ox) {
                int x0, x1;
                T fx;
                src_coords(ox, in_w, x0, x1, fx);
                for (int ci = 0; ci < gy.c; ++ci) {
                    const T g = gy.at(ci, oy, ox);
                    gx.at(ci, y0, x0) += (T(1) - fy) * (T(1) - fx) * g;
                    gx.at(ci, y0, x1) += (T(1) - fy) * fx * g;
                    gx.at(ci, y1, x0) += fy * (T(1) - fx) * g;
                    gx.at(ci, y1, x1) += fy * fx * g;
                }
            }
        }
        return gx;
    }

private:
    static void src_coords(int o, int n, int& i0, int& i1, T& frac) {
        const double s = 0.5 * o - 0.25;
        const double f = std::floor(s);
        frac = static_cast<T>(s - f);
        i0 = std::clamp(static_cast<int>(f), 0, n - 1);
        i1 = std::clamp(static_cast<int>(f) + 1, 0, n - 1);
    }
};

template <typename T>
struct Sigmoid {
    struct Ctx {
        Tensor<T> y;
    };

    Tensor<T> forward(const Tensor<T>& x, Ctx* ctx) const {
        Tensor<T> y(x.c, x.h, x.w);
        for (std::size_t i = 0; i < x.v.size(); ++i)
            y.v[i] = T(1) / (T(1) + std::exp(-x.v[i]));
        if (ctx) ctx->y = y;
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy, const Ctx& ctx) const {
        Tensor<T> gx(gy.c, gy.h, gy.w);
        for (std::size_t i = 0; i < gy.v.size(); ++i)
            gx.v[i] = gy.v[i] * ctx.y.v[i] * (T(1) - ctx.y.v[i]);
        return gx;
    }
};

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.h != b.h || a.w != b.w) throw ShapeError("concat: spatial dims differ");
    Tensor<T> y(a.c + b.c, a.h, a.w);
    std::copy(a.v.begin(), a.v.end(), y.v.begin());
    std::copy(b.v.begin(), b.v.end(), y.v.begin() + a.v.size());
    return y;
}

template <typename T>
std::pair<Tensor<T>, Tensor<T>> split_channels(const Tensor<T>& y, int c_first) {
    Tensor<T> a(c_first, y.h, y.w), b(y.c - c_first, y.h, y.w);
    std::copy(y.v.begin(), y.v.begin() + a.v.size(), a.v.begin());
    std::copy(y.v.begin() + a.v.size(), y.v.end(), b.v.begin());
    return {std::move(a), std::move(b)};
}

} // namespace hsi::nn
