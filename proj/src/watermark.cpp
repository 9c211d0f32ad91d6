#include "ists/watermark.hpp"

#include <algorithm>
#include <cmath>

#include "ists/random.hpp"

namespace ists {

std::size_t FreqMask::count() const {
    return static_cast<std::size_t>(std::count(support.begin(), support.end(), std::uint8_t{1}));
}

std::vector<std::size_t> FreqMask::indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < support.size(); ++i)
        if (support[i]) out.push_back(i);
    return out;
}

std::vector<Complex> PatternSpec::on_support(const FreqMask& mask) const {
    require(mask.height == height && mask.width == width, "pattern and mask planes differ");
    std::vector<Complex> out;
    for (std::size_t i : mask.indices()) out.push_back(values.values[i]);
    return out;
}

namespace {

int ring_index(int y, int x, int height, int width) {
    const double dy = y - height / 2, dx = x - width / 2;
    return std::max(1, static_cast<int>(std::floor(std::sqrt(dy * dy + dx * dx))));
}

void check_geometry(int radius, int height, int width) {
    require(radius >= 1, "ring radius must be at least 1");
    require(height > 0 && width > 0, "plane dimensions must be positive");
    require(2 * radius < std::min(height, width), "ring radius too large for the plane");
}

int wrap(int i, int n) { return ((i % n) + n) % n; }

}  // namespace

FreqMask make_disc_mask(int radius, int height, int width, int channel) {
    check_geometry(radius, height, width);
    FreqMask mask{height, width, channel, std::vector<std::uint8_t>(static_cast<std::size_t>(height) * width, 0)};
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const double dy = y - height / 2, dx = x - width / 2;
            if (std::floor(std::sqrt(dy * dy + dx * dx)) <= radius)
                mask.support[static_cast<std::size_t>(y) * width + x] = 1;
        }
    return mask;
}

PatternSpec make_ring_pattern(std::uint64_t seed, int radius, int height, int width, int channel,
                              bool conjugate_symmetric) {
    check_geometry(radius, height, width);
    require(channel >= 0, "channel must be non-negative");
    Rng rng(derive_seed(seed, "ring-pattern"));
    const double scale = std::sqrt(static_cast<double>(height) * width);
    std::vector<Complex> rings(static_cast<std::size_t>(radius) + 1);
    for (int r = 1; r <= radius; ++r) {
        const double re = rng.normal(), im = rng.normal();
        rings[r] = conjugate_symmetric ? Complex(re * scale, 0.0)
                                       : Complex(re, im) * (scale / std::sqrt(2.0));
    }
    PatternSpec spec{seed, radius, channel, height, width, conjugate_symmetric, ComplexPlane(height, width)};
    const FreqMask mask = make_disc_mask(radius, height, width, channel);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (mask.contains(y, x)) spec.values.at(y, x) = rings[ring_index(y, x, height, width)];
    return spec;
}

std::pair<PatternSpec, FreqMask> offset_pattern(const PatternSpec& pattern, const FreqMask& mask, Offset l,
                                                OffsetBoundary boundary) {
    require(pattern.height == mask.height && pattern.width == mask.width, "pattern and mask planes differ");
    const int h = mask.height, w = mask.width;
    PatternSpec shifted = pattern;
    shifted.values = ComplexPlane(h, w);
    FreqMask moved{h, w, mask.channel, std::vector<std::uint8_t>(mask.support.size(), 0)};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!mask.contains(y, x)) continue;
            int ty = y - l.lx, tx = x - l.ly;
            if (boundary == OffsetBoundary::Wrap) {
                ty = wrap(ty, h);
                tx = wrap(tx, w);
            } else if (ty < 0 || ty >= h || tx < 0 || tx >= w) {
                throw_argument("offset (" + std::to_string(l.lx) + "," + std::to_string(l.ly) +
                               ") moves the mask outside the plane");
            }
            moved.support[static_cast<std::size_t>(ty) * w + tx] = 1;
            shifted.values.at(ty, tx) = pattern.values.at(y, x);
        }
    return {std::move(shifted), std::move(moved)};
}

ComplexPlane channel_spectrum(const Tensor3& z, int channel) {
    require(channel >= 0 && channel < z.channels(), "mask channel outside latent");
    return fft2_centered(z.plane(channel), z.height(), z.width());
}

Latent inject_scaled(const Latent& z, const PatternSpec& pattern, const FreqMask& mask, double scale) {
    require(mask.height == z.data.height() && mask.width == z.data.width(), "mask plane does not match latent");
    require(pattern.height == mask.height && pattern.width == mask.width, "pattern and mask planes differ");
    ComplexPlane spectrum = channel_spectrum(z.data, mask.channel);
    for (std::size_t i : mask.indices()) spectrum.values[i] = scale * pattern.values.values[i];
    const ComplexPlane spatial = ifft2_centered(spectrum);
    Latent out = z;
    auto dst = out.data.plane(mask.channel);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = spatial.values[i].real();
    return out;
}

Latent inject(const Latent& z, const PatternSpec& pattern, const FreqMask& mask) {
    return inject_scaled(z, pattern, mask, 1.0);
}

std::vector<Complex> extract(const Latent& z, const FreqMask& mask) {
    require(mask.height == z.data.height() && mask.width == z.data.width(), "mask plane does not match latent");
    const ComplexPlane spectrum = channel_spectrum(z.data, mask.channel);
    std::vector<Complex> out;
    for (std::size_t i : mask.indices()) out.push_back(spectrum.values[i]);
    return out;
}

}  // namespace ists
