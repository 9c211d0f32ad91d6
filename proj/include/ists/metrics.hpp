#pragma once

#include <limits>
#include <vector>

#include "ists/tensor.hpp"

namespace ists {

/// Detection scores; lower means "more watermarked".
struct ScoreSet {
    std::vector<double> positives;  // watermarked (or forged) images
    std::vector<double> negatives;  // benign images
};

/// Mann-Whitney AUC, ties count one half.
double auc(const ScoreSet& scores);

/// Fraction of positives strictly below the threshold calibrated on negatives.
double tpr_at_fpr(const ScoreSet& scores, double fpr);

inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

/// PSNR with peak 1.0; identical images give kInfinitePsnr.
double psnr(const Image& a, const Image& b);

/// Mean SSIM over channels, 11x11 Gaussian window (sigma 1.5), valid region.
double ssim(const Image& a, const Image& b);

double median(std::vector<double> values);

}  // namespace ists
