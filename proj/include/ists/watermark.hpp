#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ists/fft.hpp"
#include "ists/tensor.hpp"

namespace ists {

/// Boolean support in the centered Fourier plane of one latent channel.
struct FreqMask {
    int height = 0;
    int width = 0;
    int channel = 0;
    std::vector<std::uint8_t> support;

    bool contains(int y, int x) const { return support[static_cast<std::size_t>(y) * width + x] != 0; }
    std::size_t count() const;
    /// Flat row-major indices of the support, the canonical value order.
    std::vector<std::size_t> indices() const;
};

/// Pattern location offset l = (l_x, l_y); l_x acts on the row index.
struct Offset {
    int lx = 0;
    int ly = 0;

    friend bool operator==(const Offset&, const Offset&) = default;
};

/// Strict rejects shifts that push support out of the plane; Wrap treats the
/// spectrum as periodic and shifts cyclically.
enum class OffsetBoundary { Strict, Wrap };

/// Ring pattern W. Values live on the full centered plane and are zero off
/// the mask support.
struct PatternSpec {
    std::uint64_t seed = 0;
    int radius = 20;
    int channel = 0;
    int height = 0;
    int width = 0;
    bool conjugate_symmetric = false;
    ComplexPlane values;

    /// Values on `mask` in its canonical order.
    std::vector<Complex> on_support(const FreqMask& mask) const;
};

/// Filled disc {floor(dist) <= radius} around the plane center.
FreqMask make_disc_mask(int radius, int height, int width, int channel);

/// Concentric rings: pixels with the same ring index max(1, floor(dist))
/// share one seeded complex normal value, scaled by sqrt(h*w) so the pattern
/// has the spectral magnitude of unit white noise under the unnormalized DFT.
/// With `conjugate_symmetric` the ring values are real, which makes the
/// pattern Hermitian about the zero frequency.
PatternSpec make_ring_pattern(std::uint64_t seed, int radius, int height, int width, int channel,
                              bool conjugate_symmetric = false);

/// Offset(W,l)_{i,j} = W_{i+l_x, j+l_y} and likewise for the mask, i.e. a
/// rigid translation of both by -l.
std::pair<PatternSpec, FreqMask> offset_pattern(const PatternSpec& pattern, const FreqMask& mask, Offset l,
                                                OffsetBoundary boundary = OffsetBoundary::Strict);

/// Replace the centered spectrum of the mask channel by the pattern on the
/// mask support, inverse transform and keep the real part.
Latent inject(const Latent& z, const PatternSpec& pattern, const FreqMask& mask);

/// Same as inject but with every pattern value multiplied by `scale`.
Latent inject_scaled(const Latent& z, const PatternSpec& pattern, const FreqMask& mask, double scale);

/// Centered spectrum of the mask channel restricted to the support.
std::vector<Complex> extract(const Latent& z, const FreqMask& mask);

/// Full centered spectrum of one channel.
ComplexPlane channel_spectrum(const Tensor3& z, int channel);

}  // namespace ists
