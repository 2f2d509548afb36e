#pragma once

// Small fully-convolutional encoder-decoder with hand-written backward pass.
//
//   stem   conv3x3 s1  in -> w0                 (H)
//   enc1   conv3x3 s2  w0 -> w1                 (H/2)  --+ skip
//   enc2   conv3x3 s2  w1 -> w2                 (H/4)    |
//   enc3   conv3x3 s2  w2 -> w3                 (H/8)    |
//   dec3   up2, conv3x3 w3 -> w2                (H/4)    |
//   dec2   up2, conv3x3 w2 -> w1, + enc1        (H/2)  <-+
//   dec1   up2, conv3x3 w1 -> w0                (H)
//   head   conv1x1 w0 -> classes
//
// Every conv except the head is followed by a rectifier. Inputs are zero-padded
// at the bottom/right to a multiple of 8 and the logits cropped back.

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <random>
#include <type_traits>
#include <string>
#include <vector>

#include "lccount/grid.hpp"

namespace lccount {

/// Planar (channel-major) image with values nominally in [0, 1].
struct InputImage {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<float> data;  // [channel][row][col]

    InputImage() = default;
    InputImage(int c, int h, int w, float fill = 0.0f)
        : channels(c), height(h), width(w), data(static_cast<std::size_t>(c) * h * w, fill) {}

    float& operator()(int ch, int r, int c) {
        return data[(static_cast<std::size_t>(ch) * height + r) * width + c];
    }
    float operator()(int ch, int r, int c) const {
        return data[(static_cast<std::size_t>(ch) * height + r) * width + c];
    }
};

template <class T>
struct ParamTensor {
    std::string name;
    std::vector<int> shape;
    std::vector<T> values;

    std::size_t size() const { return values.size(); }
};

struct FcnShape {
    int in_channels = 1;
    int classes = 2;
    std::array<int, 4> widths{16, 16, 32, 32};

    friend bool operator==(const FcnShape&, const FcnShape&) = default;
};

/// Network parameters in a fixed block order: for each of the eight convs,
/// its weight (cout x cin*k*k) then its bias (cout).
template <class T>
struct FcnParams {
    FcnShape shape;
    std::vector<ParamTensor<T>> blocks;

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& b : blocks) n += b.size();
        return n;
    }

    /// Same structure, all values zero.
    FcnParams zeros_like() const {
        FcnParams out = *this;
        for (auto& b : out.blocks) std::fill(b.values.begin(), b.values.end(), T(0));
        return out;
    }

    template <class U>
    FcnParams<U> cast() const {
        FcnParams<U> out;
        out.shape = shape;
        for (const auto& b : blocks)
            out.blocks.push_back({b.name, b.shape, std::vector<U>(b.values.begin(), b.values.end())});
        return out;
    }
};

namespace fcn_detail {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ConvSpec {
    const char* name;
    int kernel;
    int stride;
};

inline constexpr std::array<ConvSpec, 8> kConvs{{{"stem", 3, 1},
                                                 {"enc1", 3, 2},
                                                 {"enc2", 3, 2},
                                                 {"enc3", 3, 2},
                                                 {"dec3", 3, 1},
                                                 {"dec2", 3, 1},
                                                 {"dec1", 3, 1},
                                                 {"head", 1, 1}}};

inline std::array<std::pair<int, int>, 8> conv_channels(const FcnShape& s) {
    const auto& w = s.widths;
    return {{{s.in_channels, w[0]},
             {w[0], w[1]},
             {w[1], w[2]},
             {w[2], w[3]},
             {w[3], w[2]},
             {w[2], w[1]},
             {w[1], w[0]},
             {w[0], s.classes}}};
}

// Feature map stored as channels x (height * width).
template <class T>
struct Features {
    int height = 0;
    int width = 0;
    Mat<T> data;
};

template <class T>
Mat<T> im2col(const Features<T>& in, int kernel, int stride, int& out_h, int& out_w) {
    const int pad = (kernel - 1) / 2;
    const int channels = static_cast<int>(in.data.rows());
    out_h = (in.height + 2 * pad - kernel) / stride + 1;
    out_w = (in.width + 2 * pad - kernel) / stride + 1;
    Mat<T> cols(channels * kernel * kernel, out_h * out_w);
    for (int ch = 0; ch < channels; ++ch) {
        const T* src = in.data.row(ch).data();
        for (int ky = 0; ky < kernel; ++ky) {
            for (int kx = 0; kx < kernel; ++kx) {
                T* dst = cols.row((ch * kernel + ky) * kernel + kx).data();
                for (int oy = 0; oy < out_h; ++oy) {
                    const int iy = oy * stride + ky - pad;
                    T* drow = dst + static_cast<std::ptrdiff_t>(oy) * out_w;
                    if (iy < 0 || iy >= in.height) {
                        std::fill(drow, drow + out_w, T(0));
                        continue;
                    }
                    const T* srow = src + static_cast<std::ptrdiff_t>(iy) * in.width;
                    for (int ox = 0; ox < out_w; ++ox) {
                        const int ix = ox * stride + kx - pad;
                        drow[ox] = (ix < 0 || ix >= in.width) ? T(0) : srow[ix];
                    }
                }
            }
        }
    }
    return cols;
}

template <class T>
Mat<T> col2im(const Mat<T>& cols, int channels, int height, int width, int kernel, int stride,
              int out_h, int out_w) {
    const int pad = (kernel - 1) / 2;
    Mat<T> out = Mat<T>::Zero(channels, height * width);
    for (int ch = 0; ch < channels; ++ch) {
        T* dst = out.row(ch).data();
        for (int ky = 0; ky < kernel; ++ky) {
            for (int kx = 0; kx < kernel; ++kx) {
                const T* src = cols.row((ch * kernel + ky) * kernel + kx).data();
                for (int oy = 0; oy < out_h; ++oy) {
                    const int iy = oy * stride + ky - pad;
                    if (iy < 0 || iy >= height) continue;
                    T* drow = dst + static_cast<std::ptrdiff_t>(iy) * width;
                    const T* srow = src + static_cast<std::ptrdiff_t>(oy) * out_w;
                    for (int ox = 0; ox < out_w; ++ox) {
                        const int ix = ox * stride + kx - pad;
                        if (ix >= 0 && ix < width) drow[ix] += srow[ox];
                    }
                }
            }
        }
    }
    return out;
}

// Two taps per output index for 2x bilinear upsampling (half-pixel centres,
// edge-clamped).
struct UpsampleTaps {
    std::vector<int> lo, hi;
    std::vector<double> wlo, whi;
};

inline UpsampleTaps upsample_taps(int n) {
    UpsampleTaps t;
    for (int i = 0; i < 2 * n; ++i) {
        const int j = i / 2;
        if (i % 2 == 0) {
            t.lo.push_back(std::max(j - 1, 0));
            t.hi.push_back(j);
            t.wlo.push_back(0.25);
            t.whi.push_back(0.75);
        } else {
            t.lo.push_back(j);
            t.hi.push_back(std::min(j + 1, n - 1));
            t.wlo.push_back(0.75);
            t.whi.push_back(0.25);
        }
    }
    return t;
}

template <class T>
Features<T> upsample2(const Features<T>& in) {
    const UpsampleTaps rt = upsample_taps(in.height);
    const UpsampleTaps ct = upsample_taps(in.width);
    Features<T> out{in.height * 2, in.width * 2, Mat<T>::Zero(in.data.rows(), in.height * in.width * 4)};
    for (Eigen::Index ch = 0; ch < in.data.rows(); ++ch) {
        const T* src = in.data.row(ch).data();
        T* dst = out.data.row(ch).data();
        for (int r = 0; r < out.height; ++r) {
            const T* a = src + static_cast<std::ptrdiff_t>(rt.lo[r]) * in.width;
            const T* b = src + static_cast<std::ptrdiff_t>(rt.hi[r]) * in.width;
            const T wa = T(rt.wlo[r]), wb = T(rt.whi[r]);
            for (int c = 0; c < out.width; ++c) {
                const T va = T(ct.wlo[c]) * a[ct.lo[c]] + T(ct.whi[c]) * a[ct.hi[c]];
                const T vb = T(ct.wlo[c]) * b[ct.lo[c]] + T(ct.whi[c]) * b[ct.hi[c]];
                dst[static_cast<std::ptrdiff_t>(r) * out.width + c] = wa * va + wb * vb;
            }
        }
    }
    return out;
}

// Adjoint of upsample2: gradient on the coarse grid.
template <class T>
Mat<T> upsample2_backward(const Mat<T>& grad_out, int in_h, int in_w) {
    const UpsampleTaps rt = upsample_taps(in_h);
    const UpsampleTaps ct = upsample_taps(in_w);
    const int out_w = in_w * 2;
    Mat<T> grad = Mat<T>::Zero(grad_out.rows(), in_h * in_w);
    for (Eigen::Index ch = 0; ch < grad_out.rows(); ++ch) {
        const T* g = grad_out.row(ch).data();
        T* dst = grad.row(ch).data();
        for (int r = 0; r < in_h * 2; ++r) {
            T* a = dst + static_cast<std::ptrdiff_t>(rt.lo[r]) * in_w;
            T* b = dst + static_cast<std::ptrdiff_t>(rt.hi[r]) * in_w;
            const T wa = T(rt.wlo[r]), wb = T(rt.whi[r]);
            for (int c = 0; c < out_w; ++c) {
                const T v = g[static_cast<std::ptrdiff_t>(r) * out_w + c];
                const T cl = T(ct.wlo[c]) * v, ch2 = T(ct.whi[c]) * v;
                a[ct.lo[c]] += wa * cl;
                a[ct.hi[c]] += wa * ch2;
                b[ct.lo[c]] += wb * cl;
                b[ct.hi[c]] += wb * ch2;
            }
        }
    }
    return grad;
}

template <class T>
Eigen::Map<const Mat<T>> weight_view(const FcnParams<T>& p, std::size_t layer) {
    const auto& w = p.blocks[2 * layer];
    return {w.values.data(), w.shape[0], w.shape[1]};
}

template <class T>
Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> bias_view(const FcnParams<T>& p, std::size_t layer) {
    const auto& b = p.blocks[2 * layer + 1];
    return {b.values.data(), b.shape[0]};
}

}  // namespace fcn_detail

/// Kaiming-normal weights (fan-in), zero biases, from a seeded generator.
template <class T = float>
FcnParams<T> init_params(const FcnShape& shape, std::uint64_t seed) {
    if (shape.in_channels < 1 || shape.classes < 2) throw InvalidInput("invalid network shape");
    std::mt19937_64 rng(seed);
    FcnParams<T> p;
    p.shape = shape;
    const auto channels = fcn_detail::conv_channels(shape);
    for (std::size_t i = 0; i < fcn_detail::kConvs.size(); ++i) {
        const auto& spec = fcn_detail::kConvs[i];
        const auto [cin, cout] = channels[i];
        const int fan_in = cin * spec.kernel * spec.kernel;
        std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
        ParamTensor<T> w{std::string(spec.name) + ".weight", {cout, fan_in}, {}};
        w.values.resize(static_cast<std::size_t>(cout) * fan_in);
        for (auto& v : w.values) v = static_cast<T>(dist(rng));
        ParamTensor<T> b{std::string(spec.name) + ".bias", {cout}, std::vector<T>(static_cast<std::size_t>(cout), T(0))};
        p.blocks.push_back(std::move(w));
        p.blocks.push_back(std::move(b));
    }
    return p;
}

/// Checks block count, shapes and finiteness.
template <class T>
void validate_params(const FcnParams<T>& p) {
    const auto channels = fcn_detail::conv_channels(p.shape);
    if (p.blocks.size() != 2 * fcn_detail::kConvs.size())
        throw InvalidInput("parameter block count does not match the network");
    for (std::size_t i = 0; i < fcn_detail::kConvs.size(); ++i) {
        const int k = fcn_detail::kConvs[i].kernel;
        const auto [cin, cout] = channels[i];
        const auto& w = p.blocks[2 * i];
        const auto& b = p.blocks[2 * i + 1];
        if (w.shape != std::vector<int>{cout, cin * k * k} || w.size() != std::size_t(cout) * cin * k * k ||
            b.shape != std::vector<int>{cout} || b.size() != std::size_t(cout))
            throw InvalidInput("parameter block '" + w.name + "' has an unexpected shape");
        for (const auto& blk : {std::cref(w), std::cref(b)})
            for (T v : blk.get().values)
                if (!std::isfinite(static_cast<double>(v)))
                    throw NumericError("non-finite value in parameter block '" + blk.get().name + "'");
    }
}

/// Cached activations of one forward pass.
template <class T>
struct FcnTrace {
    int height = 0;  // unpadded input size
    int width = 0;
    std::array<fcn_detail::Features<T>, 8> inputs;  // input to each conv (upsampled where applicable)
    std::array<fcn_detail::Mat<T>, 8> cols;         // im2col of each conv input
    std::array<fcn_detail::Features<T>, 8> outputs; // post-activation outputs (head: raw logits)
    LogitMap logits;
};

namespace fcn_detail {

template <class T>
Features<T> conv_forward(const FcnParams<T>& p, std::size_t layer, const Features<T>& in, Mat<T>& cols,
                         bool relu) {
    int oh = 0, ow = 0;
    cols = im2col(in, kConvs[layer].kernel, kConvs[layer].stride, oh, ow);
    Features<T> out{oh, ow, Mat<T>()};
    out.data.noalias() = weight_view(p, layer) * cols;
    out.data.colwise() += bias_view(p, layer);
    if (relu) out.data = out.data.cwiseMax(T(0));
    return out;
}

}  // namespace fcn_detail

template <class T>
FcnTrace<T> forward_trace(const FcnParams<T>& p, const InputImage& image) {
    using namespace fcn_detail;
    if (image.channels != p.shape.in_channels)
        throw InvalidInput("image has " + std::to_string(image.channels) + " channels, network expects " +
                           std::to_string(p.shape.in_channels));
    if (image.height < 1 || image.width < 1) throw InvalidInput("empty input image");
    for (float v : image.data)
        if (!std::isfinite(v)) throw InvalidInput("non-finite input image value");

    const int ph = (image.height + 7) / 8 * 8;
    const int pw = (image.width + 7) / 8 * 8;
    FcnTrace<T> tr;
    tr.height = image.height;
    tr.width = image.width;

    Features<T> x{ph, pw, Mat<T>::Zero(image.channels, ph * pw)};
    for (int ch = 0; ch < image.channels; ++ch)
        for (int r = 0; r < image.height; ++r)
            for (int c = 0; c < image.width; ++c) x.data(ch, r * pw + c) = static_cast<T>(image(ch, r, c));

    const auto run = [&](std::size_t layer, Features<T> in, bool relu) {
        tr.inputs[layer] = std::move(in);
        tr.outputs[layer] = conv_forward(p, layer, tr.inputs[layer], tr.cols[layer], relu);
        return tr.outputs[layer];
    };
    run(0, std::move(x), true);
    run(1, tr.outputs[0], true);
    run(2, tr.outputs[1], true);
    run(3, tr.outputs[2], true);
    run(4, upsample2(tr.outputs[3]), true);
    Features<T> merged = run(5, upsample2(tr.outputs[4]), true);
    merged.data += tr.outputs[1].data;
    run(6, upsample2(merged), true);
    run(7, tr.outputs[6], false);

    const Mat<T>& z = tr.outputs[7].data;
    Volume<double> logits(image.height, image.width, p.shape.classes);
    for (int r = 0; r < image.height; ++r)
        for (int c = 0; c < image.width; ++c)
            for (int k = 0; k < p.shape.classes; ++k) {
                const double v = static_cast<double>(z(k, r * pw + c));
                if (!std::isfinite(v)) throw NumericError("network produced a non-finite logit");
                logits(r, c, k) = v;
            }
    tr.logits = LogitMap(std::move(logits));
    return tr;
}

template <class T>
LogitMap forward(const FcnParams<T>& p, const InputImage& image) {
    return forward_trace(p, image).logits;
}

/// Gradient of sum(logits * upstream) with respect to every parameter.
template <class T>
FcnParams<T> backward(const FcnParams<T>& p, const FcnTrace<T>& tr, const Volume<double>& upstream) {
    using namespace fcn_detail;
    if (upstream.height() != tr.height || upstream.width() != tr.width ||
        upstream.channels() != p.shape.classes)
        throw InvalidInput("upstream gradient shape does not match the logits");

    FcnParams<T> grads = p.zeros_like();
    const int ph = tr.outputs[7].height;
    const int pw = tr.outputs[7].width;
    Mat<T> g = Mat<T>::Zero(p.shape.classes, ph * pw);
    for (int r = 0; r < tr.height; ++r)
        for (int c = 0; c < tr.width; ++c)
            for (int k = 0; k < p.shape.classes; ++k) g(k, r * pw + c) = static_cast<T>(upstream(r, c, k));

    // Gradient w.r.t. the conv's pre-activation in, gradient w.r.t. its input out.
    const auto conv_back = [&](std::size_t layer, const Mat<T>& grad_pre) {
        auto& gw = grads.blocks[2 * layer].values;
        auto& gb = grads.blocks[2 * layer + 1].values;
        Eigen::Map<Mat<T>> gw_view(gw.data(), grads.blocks[2 * layer].shape[0], grads.blocks[2 * layer].shape[1]);
        gw_view.noalias() += grad_pre * tr.cols[layer].transpose();
        Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> gb_view(gb.data(), static_cast<Eigen::Index>(gb.size()));
        gb_view += grad_pre.rowwise().sum();
        const Mat<T> gcols = weight_view(p, layer).transpose() * grad_pre;
        const Features<T>& in = tr.inputs[layer];
        return col2im(gcols, static_cast<int>(in.data.rows()), in.height, in.width, kConvs[layer].kernel,
                      kConvs[layer].stride, tr.outputs[layer].height, tr.outputs[layer].width);
    };
    const auto relu_mask = [&](std::size_t layer, const Mat<T>& grad_out) {
        return Mat<T>(grad_out.array() * (tr.outputs[layer].data.array() > T(0)).template cast<T>());
    };

    Mat<T> g6 = conv_back(7, g);
    Mat<T> g_merged = upsample2_backward(conv_back(6, relu_mask(6, g6)), tr.outputs[5].height, tr.outputs[5].width);
    Mat<T> g4 = upsample2_backward(conv_back(5, relu_mask(5, g_merged)), tr.outputs[4].height, tr.outputs[4].width);
    Mat<T> g3 = upsample2_backward(conv_back(4, relu_mask(4, g4)), tr.outputs[3].height, tr.outputs[3].width);
    Mat<T> g2 = conv_back(3, relu_mask(3, g3));
    Mat<T> g1 = conv_back(2, relu_mask(2, g2));
    g1 += g_merged;  // skip connection
    Mat<T> g0 = conv_back(1, relu_mask(1, g1));
    conv_back(0, relu_mask(0, g0));
    return grads;
}

template <class T>
FcnParams<T> backward(const FcnParams<T>& p, const InputImage& image, const Volume<double>& upstream) {
    return backward(p, forward_trace(p, image), upstream);
}

// -- optimiser ---------------------------------------------------------------

struct AdamConfig {
    double learning_rate = 1e-5;
    double weight_decay = 5e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

template <class T>
struct AdamState {
    FcnParams<T> first_moment;
    FcnParams<T> second_moment;
    long step = 0;

    static AdamState for_params(const FcnParams<T>& p) { return {p.zeros_like(), p.zeros_like(), 0}; }
};

template <class T>
struct AdamUpdate {
    FcnParams<T> params;
    AdamState<T> state;
};

/// Bias-corrected Adam. Weight decay enters as an L2 term added to the
/// gradient.
template <class T>
AdamUpdate<T> adam_step(const FcnParams<T>& params, const FcnParams<T>& grads, const AdamState<T>& state,
                        const AdamConfig& cfg) {
    if (grads.blocks.size() != params.blocks.size()) throw InvalidInput("gradient/parameter structure mismatch");
    AdamUpdate<T> out{params, state};
    if (out.state.first_moment.blocks.empty()) out.state = AdamState<T>::for_params(params);
    const long t = ++out.state.step;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    for (std::size_t b = 0; b < params.blocks.size(); ++b) {
        auto& w = out.params.blocks[b].values;
        auto& m = out.state.first_moment.blocks[b].values;
        auto& v = out.state.second_moment.blocks[b].values;
        const auto& g = grads.blocks[b].values;
        if (g.size() != w.size()) throw InvalidInput("gradient block size mismatch");
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double gi = static_cast<double>(g[i]) + cfg.weight_decay * static_cast<double>(w[i]);
            const double mi = cfg.beta1 * static_cast<double>(m[i]) + (1.0 - cfg.beta1) * gi;
            const double vi = cfg.beta2 * static_cast<double>(v[i]) + (1.0 - cfg.beta2) * gi * gi;
            m[i] = static_cast<T>(mi);
            v[i] = static_cast<T>(vi);
            const double step = cfg.learning_rate * (mi / c1) / (std::sqrt(vi / c2) + cfg.epsilon);
            w[i] = static_cast<T>(static_cast<double>(w[i]) - step);
        }
    }
    return out;
}

// -- checkpoints -------------------------------------------------------------
//
// Layout (all integers little-endian):
//   "LCFCNCKPT1"                      10-byte magic
//   u32 version (1)
//   u32 in_channels, u32 classes, u32 widths[4]
//   u32 block_count
//   per block: u32 name_len, name bytes, u32 ndim, u64 dims[ndim], f64 values[prod(dims)]

inline constexpr char kCheckpointMagic[] = "LCFCNCKPT1";
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace fcn_detail {

template <class U>
void write_le(std::ostream& os, U value) {
    unsigned char bytes[sizeof(U)];
    std::uint64_t bits = 0;
    if constexpr (std::is_floating_point_v<U>) {
        static_assert(sizeof(U) == 8);
        std::memcpy(&bits, &value, 8);
    } else {
        bits = static_cast<std::uint64_t>(value);
    }
    for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
    os.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <class U>
U read_le(std::istream& is) {
    unsigned char bytes[sizeof(U)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(U))) throw InvalidInput("truncated checkpoint");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    if constexpr (std::is_floating_point_v<U>) {
        double d;
        std::memcpy(&d, &bits, 8);
        return d;
    } else {
        return static_cast<U>(bits);
    }
}

}  // namespace fcn_detail

template <class T>
void write_checkpoint(std::ostream& os, const FcnParams<T>& p) {
    using fcn_detail::write_le;
    os.write(kCheckpointMagic, 10);
    write_le<std::uint32_t>(os, kCheckpointVersion);
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.shape.in_channels));
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.shape.classes));
    for (int w : p.shape.widths) write_le<std::uint32_t>(os, static_cast<std::uint32_t>(w));
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.blocks.size()));
    for (const auto& b : p.blocks) {
        write_le<std::uint32_t>(os, static_cast<std::uint32_t>(b.name.size()));
        os.write(b.name.data(), static_cast<std::streamsize>(b.name.size()));
        write_le<std::uint32_t>(os, static_cast<std::uint32_t>(b.shape.size()));
        for (int d : b.shape) write_le<std::uint64_t>(os, static_cast<std::uint64_t>(d));
        for (T v : b.values) write_le<double>(os, static_cast<double>(v));
    }
}

template <class T = float>
FcnParams<T> read_checkpoint(std::istream& is) {
    using fcn_detail::read_le;
    char magic[10];
    if (!is.read(magic, 10) || std::memcmp(magic, kCheckpointMagic, 10) != 0)
        throw InvalidInput("not a checkpoint file (bad magic)");
    const auto version = read_le<std::uint32_t>(is);
    if (version != kCheckpointVersion)
        throw InvalidInput("unsupported checkpoint version " + std::to_string(version));
    FcnParams<T> p;
    p.shape.in_channels = static_cast<int>(read_le<std::uint32_t>(is));
    p.shape.classes = static_cast<int>(read_le<std::uint32_t>(is));
    for (int& w : p.shape.widths) w = static_cast<int>(read_le<std::uint32_t>(is));
    const auto count = read_le<std::uint32_t>(is);
    if (count > 1024) throw InvalidInput("implausible checkpoint block count");
    for (std::uint32_t i = 0; i < count; ++i) {
        ParamTensor<T> b;
        const auto name_len = read_le<std::uint32_t>(is);
        if (name_len > 4096) throw InvalidInput("implausible checkpoint block name");
        b.name.resize(name_len);
        if (!is.read(b.name.data(), name_len)) throw InvalidInput("truncated checkpoint");
        const auto ndim = read_le<std::uint32_t>(is);
        if (ndim > 8) throw InvalidInput("implausible checkpoint tensor rank");
        std::uint64_t n = 1;
        for (std::uint32_t d = 0; d < ndim; ++d) {
            const auto dim = read_le<std::uint64_t>(is);
            if (dim > (1u << 24)) throw InvalidInput("implausible checkpoint tensor dimension");
            b.shape.push_back(static_cast<int>(dim));
            n *= dim;
        }
        if (n > (1u << 26)) throw InvalidInput("implausible checkpoint tensor size");
        b.values.resize(static_cast<std::size_t>(n));
        for (auto& v : b.values) v = static_cast<T>(read_le<double>(is));
        p.blocks.push_back(std::move(b));
    }
    validate_params(p);
    return p;
}

template <class T>
void save_checkpoint(const std::string& path, const FcnParams<T>& p) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidInput("cannot open '" + path + "' for writing");
    write_checkpoint(os, p);
    if (!os) throw InvalidInput("failed writing checkpoint '" + path + "'");
}

template <class T = float>
FcnParams<T> load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidInput("cannot open checkpoint '" + path + "'");
    return read_checkpoint<T>(is);
}

}  // namespace lccount
