#include "ists/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace ists {

namespace {
void check_shape(const Tensor3& a, const Tensor3& b) {
    require(a.same_shape(b), "tensor shape mismatch");
}
}  // namespace

Tensor3& Tensor3::operator+=(const Tensor3& other) {
    check_shape(*this, other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& other) {
    check_shape(*this, other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Tensor3& Tensor3::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

double Tensor3::dot(const Tensor3& other) const {
    check_shape(*this, other);
    double acc = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) acc += data_[i] * other.data_[i];
    return acc;
}

double Tensor3::norm() const { return std::sqrt(dot(*this)); }

double Tensor3::max_abs_diff(const Tensor3& other) const {
    check_shape(*this, other);
    double m = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) m = std::max(m, std::abs(data_[i] - other.data_[i]));
    return m;
}

bool Tensor3::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
Tensor3 operator*(double s, Tensor3 a) { return a *= s; }

}  // namespace ists
