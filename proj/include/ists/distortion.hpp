#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ists/tensor.hpp"

namespace ists {

enum class DistortionKind { Rotation, Noise, Blur, Crop, Jpeg };

std::string to_string(DistortionKind kind);
DistortionKind distortion_kind_from_string(const std::string& name);

/// Crop magnitude is a fraction of the image area, or of each side.
enum class CropMeasure { Area, Side };

struct DistortionSpec {
    DistortionKind kind = DistortionKind::Noise;
    double magnitude = 0.0;  // degrees, sigma, support, fraction or quality
    CropMeasure crop_measure = CropMeasure::Area;

    /// Standard settings: 75 deg, sigma 0.1, 8x8 blur, 75% crop, JPEG 25.
    static DistortionSpec standard(DistortionKind kind);
    void validate() const;
    std::string label() const;
};

const std::vector<DistortionKind>& all_distortions();

/// Applies the distortion; the result is clamped and quantized to 8 bits.
Image distort(const Image& image, const DistortionSpec& spec, std::uint64_t seed);

}  // namespace ists
