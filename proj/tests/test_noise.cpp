#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "hsi/noise.hpp"
#include "hsi/synthetic.hpp"

#include "oracles.hpp"

using namespace hsi;

TEST_CASE("gaussian component hits its target SNR") {
    const Cube clean = make_scene(64, 64, 32, 1); // n = 131072 >= 1e5
    const auto [noisy, sigma] = add_gaussian_snr(clean, 5.0, 77);

    // sigma follows from the definition exactly
    double power = 0.0;
    for (float v : clean.data) power += double(v) * v;
    power /= double(clean.size());
    CHECK(sigma == Catch::Approx(std::sqrt(power / std::pow(10.0, 0.5))).epsilon(1e-12));

    const auto stats = oracles::empirical_noise_stats(clean, noisy);
    CHECK(std::abs(stats.realized_snr_db - 5.0) < 0.1);
    CHECK_FALSE(noisy.normalized);
}

TEST_CASE("gaussian noiseless limit returns the input") {
    const Cube clean = make_scene(16, 16, 4, 2);
    const auto [noisy, sigma] = add_gaussian_snr(clean, std::numeric_limits<double>::infinity(), 3);
    CHECK(sigma == 0.0);
    CHECK(noisy.data == clean.data);
}

TEST_CASE("gaussian requires a normalized cube") {
    Cube c = Cube::zeros(4, 4, 1);
    c.data[0] = 2.0f;
    CHECK_THROWS_AS(add_gaussian_snr(c, 5.0, 1), ConfigError);
}

TEST_CASE("sparse component alters exactly round(fraction*n) voxels") {
    // keep every value strictly inside (0, 1) so each impulse shows in a diff
    Cube clean = make_scene(100, 100, 10, 4);
    for (auto& v : clean.data) v = 0.25f + 0.5f * v;
    SECTION("fraction 0 is the identity") {
        CHECK(add_sparse(clean, 0.0, 5).data == clean.data);
    }
    SECTION("5% of a 100x100x10 cube is exactly 5000 voxels") {
        const Cube noisy = add_sparse(clean, 0.05, 5);
        const auto stats = oracles::empirical_noise_stats(clean, noisy);
        CHECK(stats.altered_voxel_count == 5000);
        for (std::size_t i = 0; i < clean.data.size(); ++i)
            if (noisy.data[i] != clean.data[i])
                CHECK((noisy.data[i] == 0.0f || noisy.data[i] == 1.0f));
    }
    SECTION("fraction 1 forces every voxel to an impulse") {
        const Cube noisy = add_sparse(clean, 1.0, 5);
        for (float v : noisy.data) CHECK((v == 0.0f || v == 1.0f));
    }
    SECTION("fraction out of range") {
        CHECK_THROWS_AS(add_sparse(clean, 1.5, 5), ConfigError);
        CHECK_THROWS_AS(add_sparse(clean, -0.1, 5), ConfigError);
    }
}

TEST_CASE("stripe component is column-constant and band-limited") {
    const Cube clean = make_scene(32, 24, 12, 6);
    SECTION("zero bands is the identity") {
        CHECK(add_stripes(clean, 0, 0.5, 0.25, 7).data == clean.data);
    }
    SECTION("one band, all columns") {
        const double amp = 0.5;
        const Cube noisy = add_stripes(clean, 1, 1.0, amp, 7);
        const auto stats = oracles::empirical_noise_stats(clean, noisy);
        REQUIRE(stats.striped_band_set.size() == 1);
        const int band = *stats.striped_band_set.begin();
        for (int c = 0; c < clean.width; ++c) {
            // per-column difference is one constant in [-amp, amp]
            const float d0 = noisy.at(0, c, band) - clean.at(0, c, band);
            CHECK(std::abs(d0) <= amp);
            double var = 0.0;
            for (int r = 0; r < clean.height; ++r) {
                const float d = noisy.at(r, c, band) - clean.at(r, c, band);
                var += (d - d0) * (d - d0);
            }
            CHECK(var < 1e-10); // constant up to f32 rounding of x + offset
        }
    }
    SECTION("exactly the requested number of bands differ") {
        const Cube noisy = add_stripes(clean, 5, 0.4, 0.25, 8);
        const auto stats = oracles::empirical_noise_stats(clean, noisy);
        CHECK(stats.striped_band_set.size() == 5);
    }
    SECTION("band_count > bands is rejected") {
        CHECK_THROWS_AS(add_stripes(clean, 13, 0.5, 0.25, 7), ConfigError);
    }
}

TEST_CASE("apply_spec composes deterministically with sparse last") {
    const Cube clean = make_scene(48, 48, 8, 9);
    NoiseSpec spec;
    spec.gaussian_snr_db = 10.0;
    spec.sparse_fraction = 0.05;
    spec.seed = 1234;

    const NoisyCube a = apply_spec(clean, spec);
    const NoisyCube b = apply_spec(clean, spec);
    CHECK(a.cube.data == b.cube.data); // bit-identical replay
    CHECK(a.sigma == b.sigma);
    CHECK(a.sigma > 0.0);

    // sparse overwrites: impulse voxels are exactly 0 or 1 despite the
    // Gaussian component having run first
    std::int64_t impulses = 0;
    for (float v : a.cube.data)
        if (v == 0.0f || v == 1.0f) ++impulses;
    CHECK(impulses >= std::llround(0.05 * double(clean.size())) - 8);

    SECTION("empty spec is rejected") {
        NoiseSpec empty;
        CHECK_THROWS_AS(apply_spec(clean, empty), ConfigError);
    }
    SECTION("sigma is zero without a gaussian component") {
        NoiseSpec sp;
        sp.sparse_fraction = 0.01;
        sp.seed = 5;
        CHECK(apply_spec(clean, sp).sigma == 0.0);
    }
    SECTION("different seeds change the corruption") {
        NoiseSpec sp = spec;
        sp.seed = 4321;
        CHECK(apply_spec(clean, sp).cube.data != a.cube.data);
    }
}

TEST_CASE("noise spec JSON round-trip") {
    NoiseSpec spec;
    spec.gaussian_snr_db = 0.0;
    spec.stripe_band_count = 50;
    spec.stripe_amplitude = 0.3;
    spec.seed = 42;
    const nlohmann::json j = spec;
    const NoiseSpec back = j.get<NoiseSpec>();
    CHECK(back.gaussian_snr_db == spec.gaussian_snr_db);
    CHECK(back.stripe_band_count == spec.stripe_band_count);
    CHECK(back.stripe_amplitude == spec.stripe_amplitude);
    CHECK(back.seed == spec.seed);
    CHECK_FALSE(back.sparse_fraction);
}
