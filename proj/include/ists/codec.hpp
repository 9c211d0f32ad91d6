#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include "ists/diffusion.hpp"
#include "ists/tensor.hpp"

namespace ists {

/// Latent <-> image mapping (the VAE role).
class ImageCodec {
public:
    virtual ~ImageCodec() = default;

    /// Decoded image, clamped to [0, 1].
    virtual Image decode(const Tensor3& latent) const = 0;
    virtual Tensor3 encode(const Image& image) const = 0;
    /// Transpose of the encoder Jacobian applied to a latent-shaped vector.
    virtual Image encode_vjp(const Tensor3& v) const;
    virtual bool differentiable() const { return false; }
};

/// Each latent pixel becomes a 2x2 block of RGB pixels through a fixed
/// seeded 12 x C matrix with orthonormal columns, plus a mid-gray bias.
/// Latent channel 0 is confined to patterns that sum to zero within every
/// 2x2 block and colour channel, so block averages never see it.
class ToyCodec final : public ImageCodec {
public:
    ToyCodec(int latent_channels, int latent_height, int latent_width, std::uint64_t seed, double gain);

    /// Gain chosen so generated images have pixel std near 0.12.
    static ToyCodec for_backend(const DiffusionBackend& backend, std::uint64_t seed);

    Image decode(const Tensor3& latent) const override;
    /// Decode without clamping (the linear map itself).
    Image decode_linear(const Tensor3& latent) const;
    Tensor3 encode(const Image& image) const override;
    Image encode_vjp(const Tensor3& v) const override;
    bool differentiable() const override { return true; }

    double gain() const noexcept { return gain_; }
    int image_height() const noexcept { return 2 * height_; }
    int image_width() const noexcept { return 2 * width_; }

private:
    int channels_;
    int height_;
    int width_;
    double gain_;
    std::vector<double> mix_;  // 12 x channels_, row = colour * 4 + sub-pixel
};

struct ExternalCodecHooks {
    std::function<Image(const Tensor3&)> decode;
    std::function<Tensor3(const Image&)> encode;
    std::function<Image(const Tensor3&)> encode_vjp;
};

class ExternalCodec final : public ImageCodec {
public:
    explicit ExternalCodec(ExternalCodecHooks hooks) : hooks_(std::move(hooks)) {}

    Image decode(const Tensor3& latent) const override;
    Tensor3 encode(const Image& image) const override;
    Image encode_vjp(const Tensor3& v) const override;
    bool differentiable() const override { return static_cast<bool>(hooks_.encode_vjp); }

private:
    ExternalCodecHooks hooks_;
};

/// Round to the 8-bit grid, as a PNG round trip would.
Image quantize8(const Image& image);

Image clamp01(Image image);

}  // namespace ists
