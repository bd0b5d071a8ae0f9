#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsi/error.hpp"
#include "hsi/nn/layers.hpp"
#include "hsi/nn/tensor.hpp"
#include "hsi/rng.hpp"

namespace hsi::nn {

// Encoder-decoder with skip connections, the standard single-image-prior
// backbone: per scale a stride-2 conv block plus a stride-1 conv block going
// down, a 1x1-conv skip branch tapped at the scale input, and going up
// 2x upsampling, concatenation with the skip, and two conv blocks. Spectral
// bands are the input/output channels of the 2-D network.
struct NetworkConfig {
    int depth = 5;
    std::vector<int> channels_down = {128}; // size 1 broadcasts across scales
    std::vector<int> channels_up = {128};
    std::vector<int> channels_skip = {4};
    int kernel_size = 3;
    double leaky_slope = 0.2;
    enum class Up { bilinear, nearest };
    enum class Squash { sigmoid, none };
    Up upsample = Up::bilinear;
    Squash squash = Squash::sigmoid;
    bool channel_norm = true;

    std::vector<int> per_scale(const std::vector<int>& v) const {
        if (static_cast<int>(v.size()) == depth) return v;
        if (v.size() == 1) return std::vector<int>(static_cast<std::size_t>(depth), v[0]);
        throw ConfigError("channel list must have 1 or depth entries");
    }

    void validate() const {
        if (depth < 1) throw ConfigError("network depth must be >= 1");
        if (kernel_size < 1 || kernel_size % 2 == 0)
            throw ConfigError("kernel_size must be odd and positive");
        for (int c : per_scale(channels_down))
            if (c < 1) throw ConfigError("channels_down entries must be positive");
        for (int c : per_scale(channels_up))
            if (c < 1) throw ConfigError("channels_up entries must be positive");
        for (int c : per_scale(channels_skip))
            if (c < 0) throw ConfigError("channels_skip entries must be non-negative");
    }
};

namespace detail {

inline std::vector<int> channels_from_json(const nlohmann::json& j, std::vector<int> fallback) {
    if (j.is_number_integer()) return {j.get<int>()};
    if (j.is_array()) return j.get<std::vector<int>>();
    return fallback;
}

} // namespace detail

inline void to_json(nlohmann::json& j, const NetworkConfig& c) {
    j = nlohmann::json{{"depth", c.depth},
                       {"channels_down", c.channels_down},
                       {"channels_up", c.channels_up},
                       {"channels_skip", c.channels_skip},
                       {"kernel_size", c.kernel_size},
                       {"leaky_slope", c.leaky_slope},
                       {"upsample", c.upsample == NetworkConfig::Up::bilinear ? "bilinear" : "nearest"},
                       {"squash", c.squash == NetworkConfig::Squash::sigmoid ? "sigmoid" : "none"},
                       {"channel_norm", c.channel_norm}};
}

inline void from_json(const nlohmann::json& j, NetworkConfig& c) {
    c.depth = j.value("depth", 5);
    if (j.contains("channels_down"))
        c.channels_down = detail::channels_from_json(j.at("channels_down"), c.channels_down);
    if (j.contains("channels_up"))
        c.channels_up = detail::channels_from_json(j.at("channels_up"), c.channels_up);
    if (j.contains("channels_skip"))
        c.channels_skip = detail::channels_from_json(j.at("channels_skip"), c.channels_skip);
    c.kernel_size = j.value("kernel_size", 3);
    c.leaky_slope = j.value("leaky_slope", 0.2);
    const std::string up = j.value("upsample", "bilinear");
    if (up != "bilinear" && up != "nearest") throw ConfigError("upsample must be bilinear|nearest");
    c.upsample = up == "bilinear" ? NetworkConfig::Up::bilinear : NetworkConfig::Up::nearest;
    const std::string sq = j.value("squash", "sigmoid");
    if (sq != "sigmoid" && sq != "none") throw ConfigError("squash must be sigmoid|none");
    c.squash = sq == "sigmoid" ? NetworkConfig::Squash::sigmoid : NetworkConfig::Squash::none;
    c.channel_norm = j.value("channel_norm", true);
}

template <typename T>
class SkipNet {
public:
    struct ScaleCtx {
        typename Conv2d<T>::Ctx down1, down2, skipc, dec1, dec2;
        typename ChannelNorm<T>::Ctx n_down1, n_down2, n_skip, n_pre, n_dec1, n_dec2;
        typename LeakyRelu<T>::Ctx a_down1, a_down2, a_skip, a_dec1, a_dec2;
        int deeper_h = 0, deeper_w = 0;
    };
    struct Ctx {
        std::vector<ScaleCtx> scales;
        typename Conv2d<T>::Ctx final_conv;
        typename Sigmoid<T>::Ctx squash;
        Workspace<T> ws;
    };

    SkipNet(const NetworkConfig& cfg, int height, int width, int bands, std::uint64_t seed)
        : cfg_(cfg), height_(height), width_(width), bands_(bands) {
        cfg_.validate();
        const int div = 1 << cfg_.depth;
        if (height % div != 0 || width % div != 0)
            throw ShapeError("spatial dims " + std::to_string(width) + "x" + std::to_string(height) +
                             " not divisible by 2^depth = " + std::to_string(div));
        if (height / div < 2 || width / div < 2)
            throw ShapeError("bottom scale would be smaller than 2x2; reduce depth");

        down_ = cfg_.per_scale(cfg_.channels_down);
        up_ = cfg_.per_scale(cfg_.channels_up);
        skip_ = cfg_.per_scale(cfg_.channels_skip);
        act_.slope = static_cast<T>(cfg_.leaky_slope);
        ups_.bilinear = cfg_.upsample == NetworkConfig::Up::bilinear;

        Rng rng(seed);
        scales_.resize(static_cast<std::size_t>(cfg_.depth));
        int ic = bands;
        for (int i = 0; i < cfg_.depth; ++i) {
            Scale& s = scales_[static_cast<std::size_t>(i)];
            const int dn = down_[static_cast<std::size_t>(i)];
            const int upc = up_[static_cast<std::size_t>(i)];
            const int sk = skip_[static_cast<std::size_t>(i)];
            const int deeper_c = (i == cfg_.depth - 1) ? dn : up_[static_cast<std::size_t>(i) + 1];
            s.down1.init(ic, dn, cfg_.kernel_size, 2, rng);
            s.n_down1.init(dn, cfg_.channel_norm);
            s.down2.init(dn, dn, cfg_.kernel_size, 1, rng);
            s.n_down2.init(dn, cfg_.channel_norm);
            if (sk > 0) {
                s.skipc.init(ic, sk, 1, 1, rng);
                s.n_skip.init(sk, cfg_.channel_norm);
            }
            s.n_pre.init(sk + deeper_c, cfg_.channel_norm);
            s.dec1.init(sk + deeper_c, upc, cfg_.kernel_size, 1, rng);
            s.n_dec1.init(upc, cfg_.channel_norm);
            s.dec2.init(upc, upc, 1, 1, rng);
            s.n_dec2.init(upc, cfg_.channel_norm);
            ic = dn;
        }
        final_conv_.init(up_[0], bands, 1, 1, rng);
    }

    const NetworkConfig& config() const { return cfg_; }
    int height() const { return height_; }
    int width() const { return width_; }
    int bands() const { return bands_; }

    Tensor<T> forward(const Tensor<T>& z, Ctx& ctx) const {
        if (z.c != bands_ || z.h != height_ || z.w != width_)
            throw ShapeError("forward: input " + std::to_string(z.c) + "x" + std::to_string(z.h) +
                             "x" + std::to_string(z.w) + " does not match model " +
                             std::to_string(bands_) + "x" + std::to_string(height_) + "x" +
                             std::to_string(width_));
        ctx.scales.resize(scales_.size());
        Tensor<T> body = forward_scale(0, z, ctx);
        Tensor<T> out = final_conv_.forward(body, &ctx.final_conv, ctx.ws);
        if (cfg_.squash == NetworkConfig::Squash::sigmoid)
            out = squash_.forward(out, &ctx.squash);
        return out;
    }

    Tensor<T> forward(const Tensor<T>& z) const {
        Ctx ctx;
        return forward(z, ctx);
    }

    // Accumulates parameter gradients and returns the gradient w.r.t. the
    // input that produced `ctx`.
    Tensor<T> backward(const Tensor<T>& g_out, Ctx& ctx) {
        Tensor<T> g = g_out;
        if (cfg_.squash == NetworkConfig::Squash::sigmoid) g = squash_.backward(g, ctx.squash);
        g = final_conv_.backward(g, ctx.final_conv, ctx.ws);
        return backward_scale(0, g, ctx);
    }

    void zero_grad() {
        for_each_param([](std::vector<T>&, std::vector<T>& grad) {
            std::fill(grad.begin(), grad.end(), T(0));
        });
    }

    template <typename F>
    void for_each_param(F&& f) {
        for (auto& s : scales_) {
            visit_conv(s.down1, f);
            visit_norm(s.n_down1, f);
            visit_conv(s.down2, f);
            visit_norm(s.n_down2, f);
            if (!s.skipc.w.empty()) {
                visit_conv(s.skipc, f);
                visit_norm(s.n_skip, f);
            }
            visit_norm(s.n_pre, f);
            visit_conv(s.dec1, f);
            visit_norm(s.n_dec1, f);
            visit_conv(s.dec2, f);
            visit_norm(s.n_dec2, f);
        }
        visit_conv(final_conv_, f);
    }

    std::int64_t param_count() {
        std::int64_t n = 0;
        for_each_param([&](std::vector<T>& w, std::vector<T>&) {
            n += static_cast<std::int64_t>(w.size());
        });
        return n;
    }

    std::vector<T> flat_params() {
        std::vector<T> out;
        for_each_param([&](std::vector<T>& w, std::vector<T>&) {
            out.insert(out.end(), w.begin(), w.end());
        });
        return out;
    }

    void set_flat_params(std::span<const T> flat) {
        std::size_t off = 0;
        for_each_param([&](std::vector<T>& w, std::vector<T>&) {
            if (off + w.size() > flat.size()) throw ShapeError("snapshot has too few parameters");
            std::copy(flat.begin() + off, flat.begin() + off + w.size(), w.begin());
            off += w.size();
        });
        if (off != flat.size()) throw ShapeError("snapshot has too many parameters");
    }

    // Scalar-level access used by the finite-difference tests and the
    // optimizer: parallel lists of value/grad pointers.
    void collect_params(std::vector<T*>& values, std::vector<T*>& grads) {
        values.clear();
        grads.clear();
        for_each_param([&](std::vector<T>& w, std::vector<T>& g) {
            for (std::size_t i = 0; i < w.size(); ++i) {
                values.push_back(&w[i]);
                grads.push_back(&g[i]);
            }
        });
    }

private:
    struct Scale {
        Conv2d<T> down1, down2, skipc, dec1, dec2;
        ChannelNorm<T> n_down1, n_down2, n_skip, n_pre, n_dec1, n_dec2;
    };

    template <typename F>
    static void visit_conv(Conv2d<T>& c, F& f) {
        f(c.w, c.gw);
        f(c.b, c.gb);
    }
    template <typename F>
    static void visit_norm(ChannelNorm<T>& n, F& f) {
        if (!n.enabled) return;
        f(n.gamma, n.ggamma);
        f(n.beta, n.gbeta);
    }

    Tensor<T> forward_scale(int i, const Tensor<T>& x, Ctx& ctx) const {
        const Scale& s = scales_[static_cast<std::size_t>(i)];
        ScaleCtx& sc = ctx.scales[static_cast<std::size_t>(i)];
        const bool has_skip = !s.skipc.w.empty();

        Tensor<T> skip_out;
        if (has_skip) {
            skip_out = s.skipc.forward(x, &sc.skipc, ctx.ws);
            skip_out = s.n_skip.forward(skip_out, &sc.n_skip);
            skip_out = act_.forward(skip_out, &sc.a_skip);
        }
        Tensor<T> d = s.down1.forward(x, &sc.down1, ctx.ws);
        d = s.n_down1.forward(d, &sc.n_down1);
        d = act_.forward(d, &sc.a_down1);
        d = s.down2.forward(d, &sc.down2, ctx.ws);
        d = s.n_down2.forward(d, &sc.n_down2);
        d = act_.forward(d, &sc.a_down2);

        Tensor<T> deeper = (i + 1 < cfg_.depth) ? forward_scale(i + 1, d, ctx) : std::move(d);
        sc.deeper_h = deeper.h;
        sc.deeper_w = deeper.w;
        Tensor<T> y = ups_.forward(deeper);
        if (has_skip) y = concat_channels(skip_out, y);
        y = s.n_pre.forward(y, &sc.n_pre);
        y = s.dec1.forward(y, &sc.dec1, ctx.ws);
        y = s.n_dec1.forward(y, &sc.n_dec1);
        y = act_.forward(y, &sc.a_dec1);
        y = s.dec2.forward(y, &sc.dec2, ctx.ws);
        y = s.n_dec2.forward(y, &sc.n_dec2);
        y = act_.forward(y, &sc.a_dec2);
        return y;
    }

    Tensor<T> backward_scale(int i, const Tensor<T>& gy, Ctx& ctx) {
        Scale& s = scales_[static_cast<std::size_t>(i)];
        ScaleCtx& sc = ctx.scales[static_cast<std::size_t>(i)];
        const bool has_skip = !s.skipc.w.empty();
        const int sk = has_skip ? skip_[static_cast<std::size_t>(i)] : 0;

        Tensor<T> g = act_.backward(gy, sc.a_dec2);
        g = s.n_dec2.backward(g, sc.n_dec2);
        g = s.dec2.backward(g, sc.dec2, ctx.ws);
        g = act_.backward(g, sc.a_dec1);
        g = s.n_dec1.backward(g, sc.n_dec1);
        g = s.dec1.backward(g, sc.dec1, ctx.ws);
        g = s.n_pre.backward(g, sc.n_pre);

        Tensor<T> g_skip, g_up;
        if (has_skip) {
            auto parts = split_channels(g, sk);
            g_skip = std::move(parts.first);
            g_up = std::move(parts.second);
        } else {
            g_up = std::move(g);
        }
        Tensor<T> g_deeper = ups_.backward(g_up, sc.deeper_h, sc.deeper_w);
        if (i + 1 < cfg_.depth) g_deeper = backward_scale(i + 1, g_deeper, ctx);

        Tensor<T> gd = act_.backward(g_deeper, sc.a_down2);
        gd = s.n_down2.backward(gd, sc.n_down2);
        gd = s.down2.backward(gd, sc.down2, ctx.ws);
        gd = act_.backward(gd, sc.a_down1);
        gd = s.n_down1.backward(gd, sc.n_down1);
        Tensor<T> gx = s.down1.backward(gd, sc.down1, ctx.ws);

        if (has_skip) {
            Tensor<T> gs = act_.backward(g_skip, sc.a_skip);
            gs = s.n_skip.backward(gs, sc.n_skip);
            gs = s.skipc.backward(gs, sc.skipc, ctx.ws);
            for (std::size_t j = 0; j < gx.v.size(); ++j) gx.v[j] += gs.v[j];
        }
        return gx;
    }

    NetworkConfig cfg_;
    int height_, width_, bands_;
    std::vector<int> down_, up_, skip_;
    std::vector<Scale> scales_;
    Conv2d<T> final_conv_;
    LeakyRelu<T> act_;
    Upsample2x<T> ups_;
    Sigmoid<T> squash_;
};

// Opaque single-file snapshot: a small JSON header with the config embedded,
// then the raw parameter payload in traversal order.
template <typename T>
void save_snapshot(SkipNet<T>& model, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FileError("cannot write snapshot: " + path);
    nlohmann::json j{{"network", model.config()},
                     {"height", model.height()},
                     {"width", model.width()},
                     {"bands", model.bands()},
                     {"dtype", sizeof(T) == 4 ? "f32" : "f64"},
                     {"param_count", model.param_count()}};
    f << "HSI_SNAPSHOT 1\n" << j.dump() << "\n";
    const auto flat = model.flat_params();
    f.write(reinterpret_cast<const char*>(flat.data()),
            static_cast<std::streamsize>(flat.size() * sizeof(T)));
}

template <typename T>
SkipNet<T> load_snapshot(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FileError("missing snapshot: " + path);
    std::string magic, header;
    std::getline(f, magic);
    if (magic != "HSI_SNAPSHOT 1") throw FormatError("not a snapshot file: " + path);
    std::getline(f, header);
    const nlohmann::json j = nlohmann::json::parse(header);
    if (j.at("dtype").get<std::string>() != (sizeof(T) == 4 ? "f32" : "f64"))
        throw FormatError("snapshot dtype does not match requested precision");
    SkipNet<T> model(j.at("network").get<NetworkConfig>(), j.at("height").get<int>(),
                     j.at("width").get<int>(), j.at("bands").get<int>(), 0);
    std::vector<T> flat(j.at("param_count").get<std::size_t>());
    f.read(reinterpret_cast<char*>(flat.data()),
           static_cast<std::streamsize>(flat.size() * sizeof(T)));
    if (!f) throw FormatError("snapshot payload truncated: " + path);
    model.set_flat_params(flat);
    return model;
}

} // namespace hsi::nn
