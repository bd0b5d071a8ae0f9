#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

// Worst relative disagreement between analytic and finite-difference
// gradients. Components far below the gradient scale are compared against a
// floor of 1e-4 x scale instead, where central differences are pure
// cancellation noise and a ratio would be meaningless.
inline double max_rel_error(const std::vector<double>& analytic, const std::vector<double>& fd) {
    double scale = 1e-8;
    for (std::size_t i = 0; i < analytic.size(); ++i)
        scale = std::max({scale, std::abs(analytic[i]), std::abs(fd[i])});
    const double floor = 1e-4 * scale;
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double denom = std::max({std::abs(analytic[i]), std::abs(fd[i]), floor});
        worst = std::max(worst, std::abs(analytic[i] - fd[i]) / denom);
    }
    return worst;
}

// Scratch directory wiped on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path = std::filesystem::temp_directory_path() /
               ("hsi_test_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string str(const std::string& rel = "") const {
        return rel.empty() ? path.string() : (path / rel).string();
    }
};
