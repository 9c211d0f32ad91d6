#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ists/codec.hpp"
#include "ists/diffusion.hpp"
#include "ists/selector.hpp"
#include "ists/watermark.hpp"

namespace ists {

/// Which ISTS components are active. All true is ISTS; all false with
/// static_timestep = T is the Tree-Ring baseline.
struct SchemeConfig {
    bool dynamic_pattern = true;
    bool dynamic_injection = true;
    bool two_sided = true;
    int static_timestep = -1;  // -1 means T
    Offset static_offset;

    static SchemeConfig ists() { return {}; }
    static SchemeConfig tree_ring() { return {false, false, false, -1, {}}; }
    static SchemeConfig without_dynamic_pattern() { return {false, true, true, -1, {}}; }
    static SchemeConfig without_dynamic_injection() { return {true, false, true, -1, {}}; }
    static SchemeConfig without_two_sided() { return {true, true, false, -1, {}}; }

    bool needs_selector() const { return dynamic_pattern || dynamic_injection; }
};

/// Short row label used in result tables.
std::string scheme_name(const SchemeConfig& scheme);

/// |.| in the deviation statistic: complex modulus, or |re| + |im|.
enum class Modulus { Complex, Componentwise };

enum class Side { Plus, Minus };

std::string to_string(Side side);

struct SidedStatistic {
    double d = 0.0;
    Side side = Side::Plus;
    double plus = 0.0;   // (1/|M|) sum |W - F|
    double minus = 0.0;  // (1/|M|) sum |W + F|
};

/// (1/|M|) sum_i |W_i - sign * F_i|.
double deviation(const std::vector<Complex>& pattern, const std::vector<Complex>& spectrum, double sign,
                 Modulus modulus = Modulus::Complex);

/// One-sided statistic is the plus branch; two-sided takes the minimum.
SidedStatistic sided_statistic(const std::vector<Complex>& pattern, const std::vector<Complex>& spectrum,
                               bool two_sided, Modulus modulus = Modulus::Complex);

struct DetectionResult {
    double d = 0.0;
    Side side = Side::Plus;
    double threshold = 0.0;
    bool decision = false;
    InjectionParams params_used;
};

/// Secret watermark material: the pattern seed and the label permutation key.
struct WatermarkKey {
    std::uint64_t pattern_seed = 0;
    int radius = 20;
    int channel = 0;
    std::string permutation_key;
    bool conjugate_symmetric = false;
    OffsetBoundary boundary = OffsetBoundary::Strict;
};

struct GeneratedPair {
    Image plain;
    Image watermarked;
    InjectionParams params;
};

/// Injection and detection for one backend, codec, key and scheme.
/// Immutable; every method is a pure function of its inputs.
class Watermarker {
public:
    Watermarker(std::shared_ptr<const DiffusionBackend> backend, std::shared_ptr<const ImageCodec> codec,
                const WatermarkKey& key, std::shared_ptr<const SelectorModel> selector, SchemeConfig scheme,
                Modulus modulus = Modulus::Complex);

    const SchemeConfig& scheme() const noexcept { return scheme_; }
    const PatternSpec& pattern() const noexcept { return pattern_; }
    const FreqMask& mask() const noexcept { return mask_; }
    const DiffusionBackend& backend() const noexcept { return *backend_; }
    const ImageCodec& codec() const noexcept { return *codec_; }
    const SelectorModel* selector() const noexcept { return selector_.get(); }

    Image generate_plain(const PromptContext& ctx) const;
    GeneratedPair generate_pair(const PromptContext& ctx) const;

    /// (t, l) for an image under this scheme.
    InjectionParams params_for(const Image& image) const;
    int static_timestep() const;

    /// Offset pattern and mask for l.
    std::pair<PatternSpec, FreqMask> placed(Offset l) const;

    /// Inject at z.timestep with offset l, scaled to the latent's nominal magnitude.
    Latent embed(const Latent& z, Offset l) const;

    /// Statistic of a latent already at the injection step.
    SidedStatistic latent_statistic(const Latent& z_t, Offset l) const;

    DetectionResult detect(const Image& image, double threshold) const;
    /// Detection statistic d (lower is more watermark-like).
    double score(const Image& image) const;
    /// Score with explicitly supplied parameters instead of the selector's.
    SidedStatistic score_with(const Image& image, const InjectionParams& params) const;

    /// Decoded and 8-bit quantized image of a latent at t = 0.
    Image render(const Tensor3& latent) const;

private:
    std::shared_ptr<const DiffusionBackend> backend_;
    std::shared_ptr<const ImageCodec> codec_;
    std::shared_ptr<const SelectorModel> selector_;
    SchemeConfig scheme_;
    Modulus modulus_;
    OffsetBoundary boundary_;
    PatternSpec pattern_;
    FreqMask mask_;
    PromptContext detection_ctx_;
};

/// Largest tau such that the fraction of benign scores strictly below tau
/// is at most target_fpr; +inf when every score may fall below.
double empirical_threshold(std::vector<double> benign_scores, double target_fpr);

/// empirical_threshold with at least 1/target_fpr benign scores required.
double calibrate_threshold(std::vector<double> benign_scores, double target_fpr);

}  // namespace ists
