#include <catch2/catch_amalgamated.hpp>

#include "hsi/synthetic.hpp"

#include "oracles.hpp"

TEST_CASE("linear_divergence sums the diagonal") {
    std::vector<double> eye(25, 0.0);
    for (int i = 0; i < 5; ++i) eye[static_cast<std::size_t>(i) * 5 + i] = 1.0;
    CHECK(oracles::linear_divergence(eye, 5) == 5.0);

    std::vector<double> diag(9, 0.0);
    diag[0] = 1.0;
    diag[4] = 2.0;
    diag[8] = 3.0;
    CHECK(oracles::linear_divergence(diag, 3) == 6.0);

    CHECK_THROWS_AS(oracles::linear_divergence(std::vector<double>(10, 0.0), 3),
                    std::invalid_argument);
}

TEST_CASE("fd_gradient recovers the gradient of a quadratic") {
    auto g = [](std::span<const double> p) {
        double s = 0.0;
        for (double v : p) s += v * v;
        return s;
    };
    const auto grad = oracles::fd_gradient(g, {1.0, 2.0}, 1e-6);
    CHECK(grad[0] == Catch::Approx(2.0).margin(1e-8));
    CHECK(grad[1] == Catch::Approx(4.0).margin(1e-8));
}

TEST_CASE("empirical_noise_stats on identical cubes") {
    const hsi::Cube c = hsi::make_scene(8, 8, 2, 1);
    const auto stats = oracles::empirical_noise_stats(c, c);
    CHECK(std::isinf(stats.realized_snr_db));
    CHECK(stats.altered_voxel_count == 0);
    CHECK(stats.striped_band_set.empty());
}
