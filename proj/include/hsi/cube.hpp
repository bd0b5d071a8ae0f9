#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsi/error.hpp"

namespace hsi {

static_assert(std::endian::native == std::endian::little,
              "cube payloads are little-endian; big-endian hosts are unsupported");

// Hyperspectral cube. In-memory layout is (row, col, band) with band fastest,
// so a pixel's spectrum is contiguous. On disk the payload defaults to BSQ;
// the loader transposes whatever interleave the header declares into this
// canonical layout.
struct Cube {
    int width = 0;   // columns
    int height = 0;  // rows
    int bands = 0;   // spectral channels
    bool normalized = false;
    std::vector<float> data; // (row, col, band)

    Cube() = default;

    static Cube zeros(int width, int height, int bands) {
        Cube c;
        c.width = width;
        c.height = height;
        c.bands = bands;
        c.data.assign(static_cast<std::size_t>(width) * height * bands, 0.0f);
        return c;
    }

    std::int64_t size() const { return std::int64_t(width) * height * bands; }

    std::size_t index(int r, int c, int b) const {
        return (static_cast<std::size_t>(r) * width + c) * bands + b;
    }

    float& at(int r, int c, int b) { return data[index(r, c, b)]; }
    float at(int r, int c, int b) const { return data[index(r, c, b)]; }

    bool same_shape(const Cube& o) const {
        return width == o.width && height == o.height && bands == o.bands;
    }

    std::pair<float, float> min_max() const {
        float lo = std::numeric_limits<float>::max();
        float hi = std::numeric_limits<float>::lowest();
        for (float v : data) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return {lo, hi};
    }

    bool unit_range() const {
        auto [lo, hi] = min_max();
        return lo >= 0.0f && hi <= 1.0f;
    }
};

struct CubeHeader {
    int width = 0;
    int height = 0;
    int bands = 0;
    std::string dtype = "f32";
    std::string order = "little";
    std::string interleave = "bsq";
    std::vector<double> wavelengths; // nm, optional
    bool normalized = false;
};

inline void to_json(nlohmann::json& j, const CubeHeader& h) {
    j = nlohmann::json{{"width", h.width},
                       {"height", h.height},
                       {"bands", h.bands},
                       {"dtype", h.dtype},
                       {"order", h.order},
                       {"interleave", h.interleave}};
    if (!h.wavelengths.empty()) j["wavelengths"] = h.wavelengths;
    if (h.normalized) j["normalized"] = true;
}

inline void from_json(const nlohmann::json& j, CubeHeader& h) {
    j.at("width").get_to(h.width);
    j.at("height").get_to(h.height);
    j.at("bands").get_to(h.bands);
    h.dtype = j.value("dtype", "f32");
    h.order = j.value("order", "little");
    h.interleave = j.value("interleave", "bsq");
    h.wavelengths = j.value("wavelengths", std::vector<double>{});
    h.normalized = j.value("normalized", false);
}

namespace detail {

// A cube path names either the header ("x.json") or the stem ("x"); the
// payload always sits next to the header as "<stem>.raw".
inline std::pair<std::filesystem::path, std::filesystem::path>
cube_paths(const std::string& path) {
    std::filesystem::path header(path);
    if (header.extension() != ".json") header += ".json";
    std::filesystem::path payload = header;
    payload.replace_extension(".raw");
    return {header, payload};
}

} // namespace detail

// Reads a cube from its JSON header + raw payload, transposing to the
// canonical (row, col, band) layout. Every value is preserved bit-exactly.
inline Cube load_cube(const std::string& path) {
    const auto [header_path, payload_path] = detail::cube_paths(path);
    std::ifstream hf(header_path);
    if (!hf) throw FileError("missing cube header: " + header_path.string());

    CubeHeader header;
    try {
        nlohmann::json j = nlohmann::json::parse(hf);
        header = j.get<CubeHeader>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad cube header " + header_path.string() + ": " + e.what());
    }
    if (header.width <= 0 || header.height <= 0 || header.bands <= 0)
        throw FormatError("cube header has non-positive dimensions: " + header_path.string());
    if (header.dtype != "f32")
        throw FormatError("unsupported dtype '" + header.dtype + "' (only f32 is supported)");
    if (header.order != "little")
        throw FormatError("unsupported byte order '" + header.order + "'");
    if (header.interleave != "bsq" && header.interleave != "bip" && header.interleave != "bil")
        throw FormatError("unsupported interleave '" + header.interleave + "'");

    std::ifstream pf(payload_path, std::ios::binary);
    if (!pf) throw FileError("missing cube payload: " + payload_path.string());
    pf.seekg(0, std::ios::end);
    const std::int64_t bytes = pf.tellg();
    pf.seekg(0);

    const std::int64_t n = std::int64_t(header.width) * header.height * header.bands;
    if (bytes != n * 4)
        throw ShapeError("header/payload size mismatch: header " + std::to_string(header.width) +
                         "x" + std::to_string(header.height) + "x" + std::to_string(header.bands) +
                         " needs " + std::to_string(n * 4) + " bytes, payload has " +
                         std::to_string(bytes));

    std::vector<float> raw(static_cast<std::size_t>(n));
    pf.read(reinterpret_cast<char*>(raw.data()), n * 4);
    if (!pf) throw FileError("short read on cube payload: " + payload_path.string());

    Cube cube = Cube::zeros(header.width, header.height, header.bands);
    cube.normalized = header.normalized;
    const int w = header.width, h = header.height, b = header.bands;
    if (header.interleave == "bip") {
        cube.data = std::move(raw); // already (row, col, band)
    } else if (header.interleave == "bsq") {
        for (int bi = 0; bi < b; ++bi)
            for (int r = 0; r < h; ++r)
                for (int c = 0; c < w; ++c)
                    cube.at(r, c, bi) = raw[(static_cast<std::size_t>(bi) * h + r) * w + c];
    } else { // bil
        for (int r = 0; r < h; ++r)
            for (int bi = 0; bi < b; ++bi)
                for (int c = 0; c < w; ++c)
                    cube.at(r, c, bi) = raw[(static_cast<std::size_t>(r) * b + bi) * w + c];
    }

    for (std::size_t i = 0; i < cube.data.size(); ++i)
        if (!std::isfinite(cube.data[i]))
            throw NumericError("non-finite value in cube payload at element " + std::to_string(i));
    return cube;
}

inline void save_cube(const Cube& cube, const std::string& path,
                      const std::string& interleave = "bsq") {
    if (interleave != "bsq" && interleave != "bip" && interleave != "bil")
        throw FormatError("unsupported interleave '" + interleave + "'");
    const auto [header_path, payload_path] = detail::cube_paths(path);
    if (header_path.has_parent_path())
        std::filesystem::create_directories(header_path.parent_path());

    CubeHeader header;
    header.width = cube.width;
    header.height = cube.height;
    header.bands = cube.bands;
    header.interleave = interleave;
    header.normalized = cube.normalized;
    {
        std::ofstream hf(header_path);
        if (!hf) throw FileError("cannot write cube header: " + header_path.string());
        hf << nlohmann::json(header).dump(2) << "\n";
    }

    const int w = cube.width, h = cube.height, b = cube.bands;
    std::vector<float> raw(cube.data.size());
    if (interleave == "bip") {
        raw = cube.data;
    } else if (interleave == "bsq") {
        for (int bi = 0; bi < b; ++bi)
            for (int r = 0; r < h; ++r)
                for (int c = 0; c < w; ++c)
                    raw[(static_cast<std::size_t>(bi) * h + r) * w + c] = cube.at(r, c, bi);
    } else { // bil
        for (int r = 0; r < h; ++r)
            for (int bi = 0; bi < b; ++bi)
                for (int c = 0; c < w; ++c)
                    raw[(static_cast<std::size_t>(r) * b + bi) * w + c] = cube.at(r, c, bi);
    }
    std::ofstream pf(payload_path, std::ios::binary);
    if (!pf) throw FileError("cannot write cube payload: " + payload_path.string());
    pf.write(reinterpret_cast<const char*>(raw.data()),
             static_cast<std::streamsize>(raw.size() * 4));
}

// Global min-max normalization to [0, 1]. A constant cube maps to all zeros.
inline Cube normalize(const Cube& cube) {
    Cube out = cube;
    auto [lo, hi] = cube.min_max();
    if (!(hi > lo)) {
        std::fill(out.data.begin(), out.data.end(), 0.0f);
    } else {
        const float scale = hi - lo;
        for (auto& v : out.data) v = (v - lo) / scale;
    }
    out.normalized = true;
    return out;
}

inline std::vector<float> vectorize(const Cube& cube) { return cube.data; }

inline Cube devectorize(std::span<const float> flat, int width, int height, int bands) {
    const std::int64_t n = std::int64_t(width) * height * bands;
    if (static_cast<std::int64_t>(flat.size()) != n)
        throw ShapeError("devectorize: flat length " + std::to_string(flat.size()) +
                         " does not match " + std::to_string(width) + "x" +
                         std::to_string(height) + "x" + std::to_string(bands));
    Cube cube = Cube::zeros(width, height, bands);
    std::copy(flat.begin(), flat.end(), cube.data.begin());
    return cube;
}

inline Cube devectorize(std::span<const float> flat, const CubeHeader& header) {
    return devectorize(flat, header.width, header.height, header.bands);
}

inline Cube crop(const Cube& cube, int row0, int col0, int height, int width) {
    if (row0 < 0 || col0 < 0 || height <= 0 || width <= 0 ||
        row0 + height > cube.height || col0 + width > cube.width)
        throw ConfigError("crop " + std::to_string(width) + "x" + std::to_string(height) +
                          " at (" + std::to_string(row0) + "," + std::to_string(col0) +
                          ") exceeds cube " + std::to_string(cube.width) + "x" +
                          std::to_string(cube.height));
    Cube out = Cube::zeros(width, height, cube.bands);
    out.normalized = cube.normalized;
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            for (int b = 0; b < cube.bands; ++b)
                out.at(r, c, b) = cube.at(row0 + r, col0 + c, b);
    return out;
}

inline Cube select_bands(const Cube& cube, std::span<const int> bands) {
    if (bands.empty()) throw ConfigError("select_bands: empty band list");
    for (int b : bands)
        if (b < 0 || b >= cube.bands)
            throw ConfigError("band index " + std::to_string(b) + " out of range [0, " +
                              std::to_string(cube.bands) + ")");
    Cube out = Cube::zeros(cube.width, cube.height, static_cast<int>(bands.size()));
    out.normalized = cube.normalized;
    for (int r = 0; r < cube.height; ++r)
        for (int c = 0; c < cube.width; ++c)
            for (std::size_t i = 0; i < bands.size(); ++i)
                out.at(r, c, static_cast<int>(i)) = cube.at(r, c, bands[i]);
    return out;
}

inline std::vector<int> evenly_spaced_bands(int available, int count) {
    if (count <= 0 || count > available)
        throw ConfigError("cannot pick " + std::to_string(count) + " of " +
                          std::to_string(available) + " bands");
    std::vector<int> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] =
            static_cast<int>((std::int64_t(i) * available) / count);
    return out;
}

// Reflection-pads rows/columns at the bottom/right edges so both spatial
// dimensions become multiples of `multiple` and at least `minimum`. Undone by
// crop(out, 0, 0, original_height, original_width).
inline Cube pad_to_multiple(const Cube& cube, int multiple, int minimum = 0) {
    auto target = [&](int n) {
        int t = ((n + multiple - 1) / multiple) * multiple;
        while (t < minimum) t += multiple;
        return t;
    };
    const int th = target(cube.height), tw = target(cube.width);
    if (th == cube.height && tw == cube.width) return cube;
    if (th >= 2 * cube.height || tw >= 2 * cube.width)
        throw ConfigError("cube too small to reflection-pad to a multiple of " +
                          std::to_string(multiple));
    Cube out = Cube::zeros(tw, th, cube.bands);
    out.normalized = cube.normalized;
    auto reflect = [](int i, int n) { return i < n ? i : 2 * n - 2 - i; };
    for (int r = 0; r < th; ++r) {
        const int sr = reflect(r, cube.height);
        for (int c = 0; c < tw; ++c) {
            const int sc = reflect(c, cube.width);
            for (int b = 0; b < cube.bands; ++b) out.at(r, c, b) = cube.at(sr, sc, b);
        }
    }
    return out;
}

} // namespace hsi
