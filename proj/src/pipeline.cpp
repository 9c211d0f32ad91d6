#include "ists/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ists {

std::string scheme_name(const SchemeConfig& s) {
    if (s.dynamic_pattern && s.dynamic_injection && s.two_sided) return "ists";
    if (!s.dynamic_pattern && !s.dynamic_injection && !s.two_sided) return "tree-ring";
    if (!s.dynamic_pattern && s.dynamic_injection && s.two_sided) return "wo-dyn-pattern";
    if (s.dynamic_pattern && !s.dynamic_injection && s.two_sided) return "wo-dyn-injection";
    if (s.dynamic_pattern && s.dynamic_injection && !s.two_sided) return "wo-two-sided";
    std::string name = "custom";
    name += s.dynamic_pattern ? "-p" : "";
    name += s.dynamic_injection ? "-i" : "";
    name += s.two_sided ? "-2" : "-1";
    return name;
}

std::string to_string(Side side) { return side == Side::Plus ? "plus" : "minus"; }

double deviation(const std::vector<Complex>& pattern, const std::vector<Complex>& spectrum, double sign,
                 Modulus modulus) {
    require(pattern.size() == spectrum.size(), "pattern and spectrum sizes differ");
    require(!pattern.empty(), "empty mask support");
    double acc = 0.0;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        const Complex diff = pattern[i] - sign * spectrum[i];
        acc += modulus == Modulus::Complex ? std::abs(diff) : std::abs(diff.real()) + std::abs(diff.imag());
    }
    return acc / static_cast<double>(pattern.size());
}

SidedStatistic sided_statistic(const std::vector<Complex>& pattern, const std::vector<Complex>& spectrum,
                               bool two_sided, Modulus modulus) {
    SidedStatistic s;
    s.plus = deviation(pattern, spectrum, 1.0, modulus);
    s.minus = deviation(pattern, spectrum, -1.0, modulus);
    s.d = s.plus;
    if (two_sided && s.minus < s.plus) {
        s.d = s.minus;
        s.side = Side::Minus;
    }
    return s;
}

Watermarker::Watermarker(std::shared_ptr<const DiffusionBackend> backend, std::shared_ptr<const ImageCodec> codec,
                         const WatermarkKey& key, std::shared_ptr<const SelectorModel> selector,
                         SchemeConfig scheme, Modulus modulus)
    : backend_(std::move(backend)), codec_(std::move(codec)), selector_(std::move(selector)), scheme_(scheme),
      modulus_(modulus), boundary_(key.boundary) {
    require(backend_ != nullptr && codec_ != nullptr, "watermarker needs a backend and a codec");
    const auto& cfg = backend_->config();
    require(key.channel >= 0 && key.channel < cfg.channels, "watermark channel outside the latent");
    if (scheme_.needs_selector()) {
        require(selector_ != nullptr, "dynamic schemes need a trained selector");
        selector_->mapping.validate(backend_->steps());
    }
    pattern_ = make_ring_pattern(key.pattern_seed, key.radius, cfg.height, cfg.width, key.channel,
                                 key.conjugate_symmetric);
    mask_ = make_disc_mask(key.radius, cfg.height, cfg.width, key.channel);
    const int st = static_timestep();
    require(st >= 1 && st <= backend_->steps(), "static timestep must lie in [1, T]");
    detection_ctx_ = PromptContext{"", 0};
}

int Watermarker::static_timestep() const {
    return scheme_.static_timestep < 0 ? backend_->steps() : scheme_.static_timestep;
}

InjectionParams Watermarker::params_for(const Image& image) const {
    InjectionParams p{static_timestep(), scheme_.static_offset};
    if (!scheme_.needs_selector()) return p;
    const InjectionParams chosen = select(*selector_, image);
    if (scheme_.dynamic_injection) p.t = chosen.t;
    if (scheme_.dynamic_pattern) p.l = chosen.l;
    return p;
}

std::pair<PatternSpec, FreqMask> Watermarker::placed(Offset l) const {
    return offset_pattern(pattern_, mask_, l, boundary_);
}

Image Watermarker::render(const Tensor3& latent) const { return quantize8(codec_->decode(latent)); }

Image Watermarker::generate_plain(const PromptContext& ctx) const {
    Latent z = backend_->denoise(ctx, backend_->sample_initial_noise(ctx), 0);
    return render(z.data);
}

Latent Watermarker::embed(const Latent& z, Offset l) const {
    auto [pattern, mask] = placed(l);
    return inject_scaled(z, pattern, mask, backend_->nominal_scale(z.timestep, mask.channel));
}

GeneratedPair Watermarker::generate_pair(const PromptContext& ctx) const {
    GeneratedPair out;
    const Latent noise = backend_->sample_initial_noise(ctx);
    out.plain = render(backend_->denoise(ctx, noise, 0).data);
    out.params = params_for(out.plain);
    Latent z = out.params.t == noise.timestep ? noise : backend_->denoise(ctx, noise, out.params.t);
    z = embed(z, out.params.l);
    if (z.timestep > 0) z = backend_->denoise(ctx, z, 0);
    out.watermarked = render(z.data);
    return out;
}

SidedStatistic Watermarker::latent_statistic(const Latent& z_t, Offset l) const {
    auto [pattern, mask] = placed(l);
    std::vector<Complex> spectrum = extract(z_t, mask);
    const double scale = backend_->nominal_scale(z_t.timestep, mask.channel);
    for (Complex& v : spectrum) v /= scale;
    return sided_statistic(pattern.on_support(mask), spectrum, scheme_.two_sided, modulus_);
}

SidedStatistic Watermarker::score_with(const Image& image, const InjectionParams& params) const {
    Latent z{codec_->encode(image), 0};
    if (params.t > 0) z = backend_->invert(detection_ctx_, z, params.t);
    return latent_statistic(z, params.l);
}

double Watermarker::score(const Image& image) const { return score_with(image, params_for(image)).d; }

DetectionResult Watermarker::detect(const Image& image, double threshold) const {
    DetectionResult r;
    r.params_used = params_for(image);
    const SidedStatistic s = score_with(image, r.params_used);
    r.d = s.d;
    r.side = s.side;
    r.threshold = threshold;
    r.decision = r.d < threshold;
    return r;
}

double empirical_threshold(std::vector<double> benign, double target_fpr) {
    require(target_fpr >= 0.0 && target_fpr <= 1.0, "target FPR must lie in [0, 1]");
    require(!benign.empty(), "threshold needs benign scores");
    for (double s : benign) require(std::isfinite(s), "benign scores must be finite");
    std::sort(benign.begin(), benign.end());
    // At most `allowed` benign scores may fall strictly below tau; the
    // supremum of such tau is the next order statistic.
    const auto allowed = static_cast<std::size_t>(std::floor(static_cast<double>(benign.size()) * target_fpr + 1e-9));
    if (allowed >= benign.size()) return std::numeric_limits<double>::infinity();
    return benign[allowed];
}

double calibrate_threshold(std::vector<double> benign, double target_fpr) {
    require(target_fpr > 0.0 && target_fpr <= 1.0, "target FPR must lie in (0, 1]");
    const double n = static_cast<double>(benign.size());
    require(n * target_fpr >= 1.0 - 1e-9,
            "calibration at FPR " + std::to_string(target_fpr) + " needs at least " +
                std::to_string(static_cast<long>(std::ceil(1.0 / target_fpr - 1e-9))) + " benign scores");
    return empirical_threshold(std::move(benign), target_fpr);
}

}  // namespace ists
