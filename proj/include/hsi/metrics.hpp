#pragma once

#include <cmath>
#include <vector>

#include <json.hpp>

#include "hsi/cube.hpp"
#include "hsi/error.hpp"
#include "hsi/sigma.hpp"

namespace hsi {

struct MetricsReport {
    double mpsnr = 0.0; // dB, mean of per-band PSNR
    double mssim = 0.0; // mean of per-band SSIM
    double nmse = 0.0;  // ||est - ref||^2 / ||ref||^2
    std::vector<double> per_band_psnr;
    std::vector<double> per_band_ssim;
};

inline void to_json(nlohmann::json& j, const MetricsReport& m) {
    j = nlohmann::json{{"mpsnr", m.mpsnr},
                       {"mssim", m.mssim},
                       {"nmse", m.nmse},
                       {"per_band_psnr", m.per_band_psnr},
                       {"per_band_ssim", m.per_band_ssim}};
}

inline void from_json(const nlohmann::json& j, MetricsReport& m) {
    j.at("mpsnr").get_to(m.mpsnr);
    j.at("mssim").get_to(m.mssim);
    j.at("nmse").get_to(m.nmse);
    m.per_band_psnr = j.value("per_band_psnr", std::vector<double>{});
    m.per_band_ssim = j.value("per_band_ssim", std::vector<double>{});
}

namespace detail {

inline void require_same_shape(const Cube& ref, const Cube& est, const char* op) {
    if (!ref.same_shape(est))
        throw ShapeError(std::string(op) + ": shape mismatch " + std::to_string(ref.width) + "x" +
                         std::to_string(ref.height) + "x" + std::to_string(ref.bands) + " vs " +
                         std::to_string(est.width) + "x" + std::to_string(est.height) + "x" +
                         std::to_string(est.bands));
}

} // namespace detail

inline double nmse(const Cube& ref, const Cube& est) {
    detail::require_same_shape(ref, est, "nmse");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ref.data.size(); ++i) {
        const double d = double(est.data[i]) - ref.data[i];
        num += d * d;
        den += double(ref.data[i]) * ref.data[i];
    }
    if (den == 0.0) throw NumericError("nmse: reference cube is all-zero");
    return num / den;
}

constexpr double kPsnrCapDb = 100.0;

// Per-band PSNR with peak fixed at 1.0 (cubes are normalized), capped at
// 100 dB so zero-MSE bands do not poison the mean.
inline std::pair<double, std::vector<double>> mpsnr(const Cube& ref, const Cube& est) {
    detail::require_same_shape(ref, est, "mpsnr");
    std::vector<double> per_band(static_cast<std::size_t>(ref.bands), 0.0);
    const std::int64_t pixels = std::int64_t(ref.width) * ref.height;
    for (int b = 0; b < ref.bands; ++b) {
        double mse = 0.0;
        for (int r = 0; r < ref.height; ++r)
            for (int c = 0; c < ref.width; ++c) {
                const double d = double(est.at(r, c, b)) - ref.at(r, c, b);
                mse += d * d;
            }
        mse /= double(pixels);
        per_band[static_cast<std::size_t>(b)] =
            (mse == 0.0) ? kPsnrCapDb : std::min(kPsnrCapDb, 10.0 * std::log10(1.0 / mse));
    }
    double mean = 0.0;
    for (double p : per_band) mean += p;
    mean /= double(ref.bands);
    return {mean, per_band};
}

namespace detail {

inline std::vector<double> gaussian_window(int size, double sigma) {
    std::vector<double> w(static_cast<std::size_t>(size));
    const double c = (size - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        w[static_cast<std::size_t>(i)] = std::exp(-(i - c) * (i - c) / (2.0 * sigma * sigma));
        sum += w[static_cast<std::size_t>(i)];
    }
    for (auto& x : w) x /= sum;
    return w;
}

// Separable valid-mode filtering; output shrinks by (size-1) per axis.
inline std::vector<double> filter_valid(const std::vector<double>& img, int h, int w,
                                        const std::vector<double>& win) {
    const int k = static_cast<int>(win.size());
    const int ow = w - k + 1, oh = h - k + 1;
    std::vector<double> horiz(static_cast<std::size_t>(h) * ow, 0.0);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < ow; ++c) {
            double s = 0.0;
            for (int i = 0; i < k; ++i) s += win[static_cast<std::size_t>(i)] * img[static_cast<std::size_t>(r) * w + c + i];
            horiz[static_cast<std::size_t>(r) * ow + c] = s;
        }
    std::vector<double> out(static_cast<std::size_t>(oh) * ow, 0.0);
    for (int r = 0; r < oh; ++r)
        for (int c = 0; c < ow; ++c) {
            double s = 0.0;
            for (int i = 0; i < k; ++i) s += win[static_cast<std::size_t>(i)] * horiz[static_cast<std::size_t>(r + i) * ow + c];
            out[static_cast<std::size_t>(r) * ow + c] = s;
        }
    return out;
}

} // namespace detail

constexpr int kSsimWindow = 11;
constexpr double kSsimWindowSigma = 1.5;
constexpr double kSsimK1 = 0.01;
constexpr double kSsimK2 = 0.03;

// Standard single-scale SSIM per band: 11x11 Gaussian window (std 1.5),
// C1 = (0.01 L)^2, C2 = (0.03 L)^2 with L = 1, valid-mode windows, mean of the
// map per band, then mean over bands.
inline std::pair<double, std::vector<double>> mssim(const Cube& ref, const Cube& est) {
    detail::require_same_shape(ref, est, "mssim");
    if (ref.height < kSsimWindow || ref.width < kSsimWindow)
        throw ShapeError("mssim: image smaller than the " + std::to_string(kSsimWindow) +
                         "x" + std::to_string(kSsimWindow) + " window");
    const double c1 = kSsimK1 * kSsimK1, c2 = kSsimK2 * kSsimK2; // L = 1
    const auto win = detail::gaussian_window(kSsimWindow, kSsimWindowSigma);
    const int h = ref.height, w = ref.width;
    const std::size_t pixels = static_cast<std::size_t>(h) * w;

    std::vector<double> x(pixels), y(pixels), xx(pixels), yy(pixels), xy(pixels);
    std::vector<double> per_band(static_cast<std::size_t>(ref.bands), 0.0);
    for (int b = 0; b < ref.bands; ++b) {
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                const std::size_t i = static_cast<std::size_t>(r) * w + c;
                x[i] = ref.at(r, c, b);
                y[i] = est.at(r, c, b);
                xx[i] = x[i] * x[i];
                yy[i] = y[i] * y[i];
                xy[i] = x[i] * y[i];
            }
        const auto mu1 = detail::filter_valid(x, h, w, win);
        const auto mu2 = detail::filter_valid(y, h, w, win);
        const auto ex2 = detail::filter_valid(xx, h, w, win);
        const auto ey2 = detail::filter_valid(yy, h, w, win);
        const auto exy = detail::filter_valid(xy, h, w, win);
        double sum = 0.0;
        for (std::size_t i = 0; i < mu1.size(); ++i) {
            const double m1 = mu1[i], m2 = mu2[i];
            const double dm = m1 - m2;
            const double s1 = ex2[i] - m1 * m1;
            const double s2 = ey2[i] - m2 * m2;
            // Numerators are written as denominator-minus-difference, with
            // difference terms that vanish bit-exactly for identical inputs:
            // 2 m1 m2 + c1      = (m1^2 + m2^2 + c1) - dm^2
            // 2 sigma12 + c2    = (s1 + s2 + c2) - E[(x-y)^2 cross] + dm^2
            // so ssim(x, x) is exactly 1 under any FP contraction scheme.
            const double lum_den = (m1 * m1 + m2 * m2) + c1;
            const double lum_num = lum_den - dm * dm;
            const double cross = (ex2[i] - exy[i]) + (ey2[i] - exy[i]);
            const double cs_den = (s1 + s2) + c2;
            const double cs_num = (cs_den - cross) + dm * dm;
            sum += (lum_num * cs_num) / (lum_den * cs_den);
        }
        per_band[static_cast<std::size_t>(b)] = sum / double(mu1.size());
    }
    double mean = 0.0;
    for (double s : per_band) mean += s;
    mean /= double(ref.bands);
    return {mean, per_band};
}

inline MetricsReport compute_metrics(const Cube& ref, const Cube& est) {
    MetricsReport report;
    auto [psnr_mean, psnr_bands] = mpsnr(ref, est);
    auto [ssim_mean, ssim_bands] = mssim(ref, est);
    report.mpsnr = psnr_mean;
    report.per_band_psnr = std::move(psnr_bands);
    report.mssim = ssim_mean;
    report.per_band_ssim = std::move(ssim_bands);
    report.nmse = nmse(ref, est);
    return report;
}

} // namespace hsi
