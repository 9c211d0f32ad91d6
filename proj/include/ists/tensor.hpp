#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ists/error.hpp"

namespace ists {

/// Dense channel-major real tensor of shape (channels, height, width).
class Tensor3 {
public:
    Tensor3() = default;
    Tensor3(int channels, int height, int width, double fill = 0.0)
        : channels_(channels), height_(height), width_(width),
          data_(static_cast<std::size_t>(channels) * height * width, fill) {
        require(channels > 0 && height > 0 && width > 0, "tensor dimensions must be positive");
    }

    int channels() const noexcept { return channels_; }
    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t plane_size() const noexcept { return static_cast<std::size_t>(height_) * width_; }

    bool same_shape(const Tensor3& other) const noexcept {
        return channels_ == other.channels_ && height_ == other.height_ && width_ == other.width_;
    }

    double& operator()(int c, int y, int x) { return data_[index(c, y, x)]; }
    double operator()(int c, int y, int x) const { return data_[index(c, y, x)]; }

    std::span<double> plane(int c) { return {data_.data() + c * plane_size(), plane_size()}; }
    std::span<const double> plane(int c) const { return {data_.data() + c * plane_size(), plane_size()}; }

    std::vector<double>& values() noexcept { return data_; }
    const std::vector<double>& values() const noexcept { return data_; }

    Tensor3& operator+=(const Tensor3& other);
    Tensor3& operator-=(const Tensor3& other);
    Tensor3& operator*=(double s);

    double dot(const Tensor3& other) const;
    double norm() const;
    double max_abs_diff(const Tensor3& other) const;
    bool all_finite() const;

private:
    std::size_t index(int c, int y, int x) const noexcept {
        return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
    }

    int channels_ = 0;
    int height_ = 0;
    int width_ = 0;
    std::vector<double> data_;
};

Tensor3 operator+(Tensor3 a, const Tensor3& b);
Tensor3 operator-(Tensor3 a, const Tensor3& b);
Tensor3 operator*(double s, Tensor3 a);

/// Diffusion state at a timestep.
struct Latent {
    Tensor3 data;
    int timestep = 0;
};

/// RGB image in [0,1], stored as a (3, height, width) tensor.
using Image = Tensor3;

}  // namespace ists
