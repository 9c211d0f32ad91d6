#include "ists/codec.hpp"

#include <algorithm>
#include <cmath>

#include "ists/random.hpp"

namespace ists {

namespace {
constexpr int kRows = 12;  // 3 colours x 2x2 sub-pixels
constexpr double kBias = 0.5;
constexpr double kTargetPixelStd = 0.12;
}  // namespace

Image ImageCodec::encode_vjp(const Tensor3&) const {
    throw Error(ErrorCode::AttackUnsupported, "image encoder exposes no gradients");
}

ToyCodec::ToyCodec(int latent_channels, int latent_height, int latent_width, std::uint64_t seed, double gain)
    : channels_(latent_channels), height_(latent_height), width_(latent_width), gain_(gain),
      mix_(static_cast<std::size_t>(kRows) * latent_channels) {
    require(latent_channels >= 1 && latent_channels <= 10, "toy codec supports 1..10 latent channels");
    require(gain > 0.0, "toy codec gain must be positive");
    Rng rng(derive_seed(seed, "toy-codec"));
    auto col = [&](int c) { return std::span<double>(mix_.data() + static_cast<std::size_t>(c) * kRows, kRows); };
    for (double& v : mix_) v = rng.normal();

    // Channel 0: remove the per-colour mean over the four sub-pixels.
    auto first = col(0);
    for (int colour = 0; colour < 3; ++colour) {
        double mean = 0.0;
        for (int s = 0; s < 4; ++s) mean += first[colour * 4 + s];
        mean /= 4.0;
        for (int s = 0; s < 4; ++s) first[colour * 4 + s] -= mean;
    }
    // Modified Gram-Schmidt keeps column 0 in that zero-sum subspace.
    for (int c = 0; c < channels_; ++c) {
        auto v = col(c);
        for (int p = 0; p < c; ++p) {
            auto u = col(p);
            double d = 0.0;
            for (int r = 0; r < kRows; ++r) d += u[r] * v[r];
            for (int r = 0; r < kRows; ++r) v[r] -= d * u[r];
        }
        double n = 0.0;
        for (double x : v) n += x * x;
        n = std::sqrt(n);
        require(n > 1e-9, "toy codec mixing matrix is rank deficient");
        for (double& x : v) x /= n;
    }
}

ToyCodec ToyCodec::for_backend(const DiffusionBackend& backend, std::uint64_t seed) {
    const auto& cfg = backend.config();
    double latent_var = 0.0;
    for (int c = 0; c < cfg.channels; ++c) {
        const double s = backend.nominal_scale(0, c);
        latent_var += s * s;
    }
    // Each output pixel mixes all channels through unit columns spread over 12 rows.
    const double pixel_std = std::sqrt(latent_var / kRows);
    return ToyCodec(cfg.channels, cfg.height, cfg.width, seed, kTargetPixelStd / pixel_std);
}

Image ToyCodec::decode_linear(const Tensor3& latent) const {
    require(latent.channels() == channels_ && latent.height() == height_ && latent.width() == width_,
            "latent shape does not match codec");
    Image img(3, 2 * height_, 2 * width_);
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
            for (int r = 0; r < kRows; ++r) {
                double acc = 0.0;
                for (int c = 0; c < channels_; ++c) acc += mix_[static_cast<std::size_t>(c) * kRows + r] * latent(c, y, x);
                const int colour = r / 4, sub = r % 4;
                img(colour, 2 * y + sub / 2, 2 * x + sub % 2) = kBias + gain_ * acc;
            }
    return img;
}

Image ToyCodec::decode(const Tensor3& latent) const { return clamp01(decode_linear(latent)); }

Tensor3 ToyCodec::encode(const Image& image) const {
    require(image.channels() == 3 && image.height() == 2 * height_ && image.width() == 2 * width_,
            "image shape does not match codec");
    Tensor3 z(channels_, height_, width_);
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
            for (int c = 0; c < channels_; ++c) {
                double acc = 0.0;
                for (int r = 0; r < kRows; ++r) {
                    const int colour = r / 4, sub = r % 4;
                    acc += mix_[static_cast<std::size_t>(c) * kRows + r] *
                           (image(colour, 2 * y + sub / 2, 2 * x + sub % 2) - kBias);
                }
                z(c, y, x) = acc / gain_;
            }
    return z;
}

Image ToyCodec::encode_vjp(const Tensor3& v) const {
    require(v.channels() == channels_ && v.height() == height_ && v.width() == width_,
            "latent shape does not match codec");
    Image g(3, 2 * height_, 2 * width_);
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
            for (int r = 0; r < kRows; ++r) {
                double acc = 0.0;
                for (int c = 0; c < channels_; ++c) acc += mix_[static_cast<std::size_t>(c) * kRows + r] * v(c, y, x);
                const int colour = r / 4, sub = r % 4;
                g(colour, 2 * y + sub / 2, 2 * x + sub % 2) = acc / gain_;
            }
    return g;
}

Image ExternalCodec::decode(const Tensor3& latent) const {
    if (!hooks_.decode) throw Error(ErrorCode::Backend, "external codec has no decoder");
    return clamp01(hooks_.decode(latent));
}

Tensor3 ExternalCodec::encode(const Image& image) const {
    if (!hooks_.encode) throw Error(ErrorCode::Backend, "external codec has no encoder");
    return hooks_.encode(image);
}

Image ExternalCodec::encode_vjp(const Tensor3& v) const {
    if (!hooks_.encode_vjp) throw Error(ErrorCode::AttackUnsupported, "external codec exposes no gradients");
    return hooks_.encode_vjp(v);
}

Image clamp01(Image image) {
    for (double& v : image.values()) v = std::clamp(v, 0.0, 1.0);
    return image;
}

Image quantize8(const Image& image) {
    Image out = image;
    for (double& v : out.values()) v = std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0;
    return out;
}

}  // namespace ists
