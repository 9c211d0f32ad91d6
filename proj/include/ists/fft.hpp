#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ists {

using Complex = std::complex<double>;

/// Row-major complex plane. In the centered layout the zero frequency sits
/// at (height/2, width/2).
struct ComplexPlane {
    int height = 0;
    int width = 0;
    std::vector<Complex> values;

    ComplexPlane() = default;
    ComplexPlane(int h, int w) : height(h), width(w), values(static_cast<std::size_t>(h) * w) {}

    Complex& at(int y, int x) { return values[static_cast<std::size_t>(y) * width + x]; }
    const Complex& at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Unnormalized forward 2-D DFT of a real plane, zero frequency moved to the center.
ComplexPlane fft2_centered(std::span<const double> plane, int height, int width);

/// Inverse of fft2_centered (scaled by 1/(h*w)); returns the complex spatial plane.
ComplexPlane ifft2_centered(const ComplexPlane& spectrum);

/// Plain (uncentered) transforms used by the convolution solver.
ComplexPlane fft2(const ComplexPlane& plane);
ComplexPlane ifft2(const ComplexPlane& spectrum);

}  // namespace ists
