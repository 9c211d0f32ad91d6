#pragma once

#include <opencv2/core.hpp>

#include "ists/tensor.hpp"

namespace ists::detail {

/// (3,h,w) RGB in [0,1] to a CV_64FC3 BGR matrix, and back.
cv::Mat to_mat(const Image& image);
Image from_mat(const cv::Mat& mat);

/// 8-bit BGR conversions with rounding and clamping.
cv::Mat to_mat8(const Image& image);
Image from_mat8(const cv::Mat& mat);

}  // namespace ists::detail
