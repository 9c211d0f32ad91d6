#include "ists/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ists/pipeline.hpp"

namespace ists {

namespace {

void check_scores(const ScoreSet& s) {
    require(!s.positives.empty() && !s.negatives.empty(), "score set needs positives and negatives");
    for (double v : s.positives) require(!std::isnan(v), "scores must not be NaN");
    for (double v : s.negatives) require(std::isfinite(v), "negative scores must be finite");
}

}  // namespace

double auc(const ScoreSet& scores) {
    check_scores(scores);
    std::vector<double> neg = scores.negatives;
    std::sort(neg.begin(), neg.end());
    // For each positive: negatives strictly above count 1, ties count 1/2.
    // Accumulate in half-units to stay exact.
    long long half_units = 0;
    for (double p : scores.positives) {
        const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
        const auto hi = std::upper_bound(neg.begin(), neg.end(), p);
        half_units += 2 * (neg.end() - hi) + (hi - lo);
    }
    const double pairs = static_cast<double>(scores.positives.size()) * static_cast<double>(neg.size());
    return static_cast<double>(half_units) / (2.0 * pairs);
}

double tpr_at_fpr(const ScoreSet& scores, double fpr) {
    check_scores(scores);
    const double tau = empirical_threshold(scores.negatives, fpr);
    std::size_t hits = 0;
    for (double p : scores.positives)
        if (p < tau) ++hits;
    return static_cast<double>(hits) / static_cast<double>(scores.positives.size());
}

double psnr(const Image& a, const Image& b) {
    require(a.same_shape(b), "psnr needs images of equal shape");
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.values()[i] - b.values()[i];
        sq += d * d;
    }
    if (sq == 0.0) return kInfinitePsnr;
    const double mse = sq / static_cast<double>(a.size());
    return -10.0 * std::log10(mse);
}

double ssim(const Image& a, const Image& b) {
    require(a.same_shape(b), "ssim needs images of equal shape");
    constexpr int kRadius = 5;
    constexpr double kSigma = 1.5;
    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;
    const int h = a.height();
    const int w = a.width();
    require(h > 2 * kRadius && w > 2 * kRadius, "ssim needs images larger than the 11x11 window");

    double window[2 * kRadius + 1][2 * kRadius + 1];
    double total = 0.0;
    for (int dy = -kRadius; dy <= kRadius; ++dy)
        for (int dx = -kRadius; dx <= kRadius; ++dx)
            total += window[dy + kRadius][dx + kRadius] = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
    for (auto& row : window)
        for (double& v : row) v /= total;

    double sum = 0.0;
    long count = 0;
    for (int c = 0; c < a.channels(); ++c) {
        for (int y = kRadius; y < h - kRadius; ++y) {
            for (int x = kRadius; x < w - kRadius; ++x) {
                double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
                for (int dy = -kRadius; dy <= kRadius; ++dy) {
                    for (int dx = -kRadius; dx <= kRadius; ++dx) {
                        const double g = window[dy + kRadius][dx + kRadius];
                        const double va = a(c, y + dy, x + dx);
                        const double vb = b(c, y + dy, x + dx);
                        ma += g * va;
                        mb += g * vb;
                        saa += g * (va * va);
                        sbb += g * (vb * vb);
                        sab += g * (va * vb);
                    }
                }
                const double var_a = saa - ma * ma;
                const double var_b = sbb - mb * mb;
                const double cov = sab - ma * mb;
                sum += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
                ++count;
            }
        }
    }
    return sum / static_cast<double>(count);
}

double median(std::vector<double> values) {
    require(!values.empty(), "median of an empty list");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    const double lo = values[n / 2 - 1];
    const double hi = values[n / 2];
    if (std::isinf(lo) && lo == hi) return lo;
    return 0.5 * (lo + hi);
}

}  // namespace ists
