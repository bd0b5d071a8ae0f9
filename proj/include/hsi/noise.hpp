#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

#include <json.hpp>

#include "hsi/cube.hpp"
#include "hsi/error.hpp"
#include "hsi/rng.hpp"

namespace hsi {

// Declarative description of a composite corruption: optional Gaussian,
// sparse (salt-and-pepper), and stripe components plus one seed. Components
// are applied in the fixed order Gaussian -> stripe -> sparse, so impulses
// overwrite whatever came before them.
struct NoiseSpec {
    std::optional<double> gaussian_snr_db;
    std::optional<double> sparse_fraction;   // fraction of voxels in [0, 1]
    std::optional<int> stripe_band_count;
    double stripe_column_fraction = 0.2;
    double stripe_amplitude = 0.25;
    std::uint64_t seed = 0;

    void validate(int cube_bands) const {
        if (!gaussian_snr_db && !sparse_fraction && !stripe_band_count)
            throw ConfigError("noise spec has no components");
        if (sparse_fraction && (*sparse_fraction < 0.0 || *sparse_fraction > 1.0))
            throw ConfigError("sparse_fraction must be in [0, 1]");
        if (stripe_band_count) {
            if (*stripe_band_count < 0)
                throw ConfigError("stripe_band_count must be non-negative");
            if (*stripe_band_count > cube_bands)
                throw ConfigError("stripe_band_count " + std::to_string(*stripe_band_count) +
                                  " exceeds cube bands " + std::to_string(cube_bands));
        }
        if (stripe_column_fraction < 0.0 || stripe_column_fraction > 1.0)
            throw ConfigError("stripe_column_fraction must be in [0, 1]");
        if (stripe_amplitude <= 0.0) throw ConfigError("stripe_amplitude must be positive");
    }
};

inline void to_json(nlohmann::json& j, const NoiseSpec& s) {
    j = nlohmann::json::object();
    if (s.gaussian_snr_db) j["gaussian_snr_db"] = *s.gaussian_snr_db;
    if (s.sparse_fraction) j["sparse_fraction"] = *s.sparse_fraction;
    if (s.stripe_band_count) {
        j["stripe_band_count"] = *s.stripe_band_count;
        j["stripe_column_fraction"] = s.stripe_column_fraction;
        j["stripe_amplitude"] = s.stripe_amplitude;
    }
    j["seed"] = s.seed;
}

inline void from_json(const nlohmann::json& j, NoiseSpec& s) {
    if (j.contains("gaussian_snr_db")) s.gaussian_snr_db = j.at("gaussian_snr_db").get<double>();
    if (j.contains("sparse_fraction")) s.sparse_fraction = j.at("sparse_fraction").get<double>();
    if (j.contains("stripe_band_count")) s.stripe_band_count = j.at("stripe_band_count").get<int>();
    s.stripe_column_fraction = j.value("stripe_column_fraction", 0.2);
    s.stripe_amplitude = j.value("stripe_amplitude", 0.25);
    s.seed = j.value("seed", std::uint64_t{0});
}

struct NoisyCube {
    Cube cube;
    double sigma = 0.0; // Gaussian component sigma actually used (0 if absent)
};

// Additive i.i.d. Gaussian noise at a target SNR. Signal power is ||x||^2/n,
// so sigma^2 = power / 10^(snr/10). Output is not clamped to [0, 1]: clamping
// would truncate the distribution the SURE-style losses assume.
inline NoisyCube add_gaussian_snr(const Cube& cube, double snr_db, std::uint64_t seed) {
    if (!cube.unit_range())
        throw ConfigError("add_gaussian_snr expects a normalized cube (values in [0, 1])");
    if (std::isnan(snr_db)) throw ConfigError("snr_db must not be NaN");

    NoisyCube out{cube, 0.0};
    out.cube.normalized = false;
    double power = 0.0;
    for (float v : cube.data) power += double(v) * v;
    power /= double(cube.size());
    const double sigma2 = power / std::pow(10.0, snr_db / 10.0);
    out.sigma = std::sqrt(sigma2);
    if (out.sigma == 0.0) {
        out.cube.normalized = cube.normalized;
        return out; // snr -> +inf limit: noiseless
    }
    Rng rng(seed);
    for (auto& v : out.cube.data) v = static_cast<float>(v + out.sigma * rng.normal());
    return out;
}

// Salt-and-pepper impulses: exactly round(fraction * n) distinct voxels are
// set to 0 or 1 with probability 1/2 each.
inline Cube add_sparse(const Cube& cube, double fraction, std::uint64_t seed) {
    if (fraction < 0.0 || fraction > 1.0) throw ConfigError("sparse fraction must be in [0, 1]");
    Cube out = cube;
    const std::int64_t n = cube.size();
    const std::int64_t k = std::llround(fraction * double(n));
    if (k == 0) return out;
    out.normalized = false;
    Rng rng(seed);
    const auto hit = rng.sample_distinct(n, k);
    for (std::int64_t idx : hit)
        out.data[static_cast<std::size_t>(idx)] = (rng.uniform() < 0.5) ? 0.0f : 1.0f;
    return out;
}

// Column-constant additive offsets confined to a random subset of bands.
// Within a selected band, round(column_fraction * width) distinct columns each
// get one offset drawn uniformly from [-amplitude, +amplitude].
inline Cube add_stripes(const Cube& cube, int band_count, double column_fraction,
                        double amplitude, std::uint64_t seed) {
    if (band_count < 0 || band_count > cube.bands)
        throw ConfigError("stripe band_count " + std::to_string(band_count) +
                          " out of range [0, " + std::to_string(cube.bands) + "]");
    if (column_fraction < 0.0 || column_fraction > 1.0)
        throw ConfigError("stripe column_fraction must be in [0, 1]");
    if (amplitude <= 0.0) throw ConfigError("stripe amplitude must be positive");
    Cube out = cube;
    if (band_count == 0) return out;
    out.normalized = false;
    Rng rng(seed);
    const auto bands = rng.sample_distinct(cube.bands, band_count);
    const std::int64_t cols_per_band = std::llround(column_fraction * double(cube.width));
    for (std::int64_t b : bands) {
        const auto cols = rng.sample_distinct(cube.width, cols_per_band);
        for (std::int64_t c : cols) {
            const float offset = static_cast<float>(rng.uniform(-amplitude, amplitude));
            for (int r = 0; r < cube.height; ++r)
                out.at(r, static_cast<int>(c), static_cast<int>(b)) += offset;
        }
    }
    return out;
}

// Applies the full spec: Gaussian -> stripe -> sparse, each component on its
// own sub-stream of the seed so a given component is reproducible regardless
// of which others are enabled. Returns the Gaussian sigma actually used.
inline NoisyCube apply_spec(const Cube& cube, const NoiseSpec& spec) {
    spec.validate(cube.bands);
    NoisyCube out{cube, 0.0};
    if (spec.gaussian_snr_db) {
        out = add_gaussian_snr(cube, *spec.gaussian_snr_db, Rng::mix(spec.seed, 1));
    }
    if (spec.stripe_band_count) {
        out.cube = add_stripes(out.cube, *spec.stripe_band_count, spec.stripe_column_fraction,
                               spec.stripe_amplitude, Rng::mix(spec.seed, 2));
    }
    if (spec.sparse_fraction) {
        out.cube = add_sparse(out.cube, *spec.sparse_fraction, Rng::mix(spec.seed, 3));
    }
    return out;
}

} // namespace hsi
