#include "ists/attacks.hpp"

#include <cmath>

#include "ists/random.hpp"

namespace ists {

std::string to_string(AttackKind kind) {
    switch (kind) {
    case AttackKind::ImpRemoval: return "imp-removal";
    case AttackKind::ImpForgery: return "imp-forgery";
    case AttackKind::AvgRemoval: return "avg-removal";
    case AttackKind::AvgForgery: return "avg-forgery";
    case AttackKind::VaeRemoval: return "vae-removal";
    case AttackKind::VaeForgery: return "vae-forgery";
    }
    return "unknown";
}

AttackKind attack_kind_from_string(const std::string& name) {
    for (AttackKind k : all_attacks())
        if (to_string(k) == name) return k;
    throw_argument("unknown attack kind '" + name + "'");
}

bool is_removal(AttackKind kind) {
    return kind == AttackKind::ImpRemoval || kind == AttackKind::AvgRemoval || kind == AttackKind::VaeRemoval;
}

const std::vector<AttackKind>& all_attacks() {
    static const std::vector<AttackKind> kinds{AttackKind::ImpRemoval, AttackKind::AvgRemoval,
                                               AttackKind::VaeRemoval, AttackKind::ImpForgery,
                                               AttackKind::AvgForgery, AttackKind::VaeForgery};
    return kinds;
}

std::string to_string(StepRule rule) { return rule == StepRule::Curvature ? "curvature" : "absolute"; }

StepRule step_rule_from_string(const std::string& name) {
    if (name == "absolute") return StepRule::Absolute;
    if (name == "curvature") return StepRule::Curvature;
    throw_argument("unknown step rule '" + name + "'");
}

void AttackConfig::validate() const {
    require(steps >= 1, "attack steps must be at least 1");
    require(lr >= 0.0 && std::isfinite(lr), "attack learning rate must be finite and non-negative");
    require(lambda >= 0.0, "attack lambda must be non-negative");
    require(n_pairs >= 1, "attack n_pairs must be at least 1");
}

namespace {

void require_surrogate(const Surrogate& s) {
    require(s.backend != nullptr && s.codec != nullptr, "attack needs a surrogate backend and codec");
}

Tensor3 random_like(const Tensor3& like, std::uint64_t seed) {
    Rng rng(seed);
    Tensor3 v(like.channels(), like.height(), like.width());
    for (double& x : v.values()) x = rng.normal();
    return v;
}

template <typename Apply>
double power_iteration(Tensor3 v, Apply&& normal_op) {
    double eig = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double n = v.norm();
        if (n == 0.0) return 0.0;
        v *= 1.0 / n;
        Tensor3 w = normal_op(v);
        eig = v.dot(w);
        v = std::move(w);
    }
    return eig;
}

double effective_lr(const AttackConfig& cfg, double curvature) {
    if (cfg.step_rule == StepRule::Absolute) return cfg.lr;
    require(curvature > 0.0, "surrogate curvature must be positive");
    return cfg.lr / curvature;
}

/// Gradient descent on 1/2 ||Inv(z0 + delta) - target||^2.
AttackResult imprint(const Image& source, const Tensor3& target, const PromptContext& ctx,
                     const Surrogate& surrogate, const AttackConfig& cfg) {
    const auto& backend = *surrogate.backend;
    if (!backend.differentiable() )
        throw Error(ErrorCode::AttackUnsupported, "surrogate backend is not differentiable");
    const int top = backend.steps();
    const Tensor3 z0 = surrogate.codec->encode(source);
    const double lr = cfg.step_rule == StepRule::Absolute ? cfg.lr
                                                          : effective_lr(cfg, inversion_curvature(surrogate, ctx));
    AttackResult result;
    result.delta = Tensor3(z0.channels(), z0.height(), z0.width());
    for (int step = 0; step < cfg.steps; ++step) {
        Tensor3 residual = backend.invert(ctx, Latent{z0 + result.delta, 0}, top).data - target;
        result.loss_trace.push_back(0.5 * residual.dot(residual));
        Tensor3 grad = backend.invert_vjp(ctx, residual, 0, top);
        grad *= lr;
        result.delta -= grad;
    }
    result.attacked = quantize8(surrogate.codec->decode(z0 + result.delta));
    result.perturbation_norm = (result.attacked - source).norm();
    return result;
}

/// Proximal gradient on 1/2 ||E(x + delta) - target||^2 + lambda/2 ||delta||^2.
AttackResult encoder_attack(const Image& source, const Tensor3& target, const Surrogate& surrogate,
                            const AttackConfig& cfg) {
    const auto& codec = *surrogate.codec;
    if (!codec.differentiable()) throw Error(ErrorCode::AttackUnsupported, "surrogate encoder is not differentiable");
    const double lr = cfg.step_rule == StepRule::Absolute ? cfg.lr
                                                          : effective_lr(cfg, encoder_curvature(surrogate, source));
    AttackResult result;
    result.delta = Image(source.channels(), source.height(), source.width());
    const double shrink = 1.0 / (1.0 + lr * cfg.lambda);
    for (int step = 0; step < cfg.steps; ++step) {
        Tensor3 residual = codec.encode(source + result.delta) - target;
        result.loss_trace.push_back(0.5 * residual.dot(residual) + 0.5 * cfg.lambda * result.delta.dot(result.delta));
        Image grad = codec.encode_vjp(residual);
        grad *= lr;
        result.delta -= grad;
        result.delta *= shrink;
    }
    result.attacked = quantize8(source + result.delta);
    result.perturbation_norm = (result.attacked - source).norm();
    return result;
}

}  // namespace

double inversion_curvature(const Surrogate& surrogate, const PromptContext& ctx) {
    require_surrogate(surrogate);
    const auto& backend = *surrogate.backend;
    const auto& cfg = backend.config();
    const int top = backend.steps();
    Tensor3 start = random_like(Tensor3(cfg.channels, cfg.height, cfg.width), derive_seed(7, "curvature"));
    return power_iteration(std::move(start), [&](const Tensor3& v) {
        return backend.invert_vjp(ctx, backend.invert(ctx, Latent{v, 0}, top).data, 0, top);
    });
}

double encoder_curvature(const Surrogate& surrogate, const Image& like) {
    require_surrogate(surrogate);
    const auto& codec = *surrogate.codec;
    // The encoder is affine; its linear part is E(x) - E(0).
    const Image zero(like.channels(), like.height(), like.width());
    const Tensor3 bias = codec.encode(zero);
    Tensor3 start = random_like(like, derive_seed(7, "encoder-curvature"));
    return power_iteration(std::move(start), [&](const Image& v) { return codec.encode_vjp(codec.encode(v) - bias); });
}

AttackResult imp_removal(const Image& watermarked, const PromptContext& ctx, const Surrogate& surrogate,
                         const AttackConfig& cfg) {
    cfg.validate();
    require_surrogate(surrogate);
    const auto& backend = *surrogate.backend;
    Tensor3 target = backend.invert(ctx, Latent{surrogate.codec->encode(watermarked), 0}, backend.steps()).data;
    target *= -1.0;
    return imprint(watermarked, target, ctx, surrogate, cfg);
}

AttackResult imp_forgery(const Image& clean, const Image& reference, const PromptContext& ctx,
                         const Surrogate& surrogate, const AttackConfig& cfg) {
    cfg.validate();
    require_surrogate(surrogate);
    require(clean.same_shape(reference), "clean and reference images differ in shape");
    const auto& backend = *surrogate.backend;
    const Tensor3 target = backend.invert(ctx, Latent{surrogate.codec->encode(reference), 0}, backend.steps()).data;
    return imprint(clean, target, ctx, surrogate, cfg);
}

Image avg_residual(const std::vector<Image>& watermarked, const std::vector<Image>& clean) {
    require(!watermarked.empty(), "residual needs at least one pair");
    require(watermarked.size() == clean.size(), "residual needs equally many watermarked and clean images");
    Image acc(watermarked[0].channels(), watermarked[0].height(), watermarked[0].width());
    for (std::size_t i = 0; i < watermarked.size(); ++i) {
        acc += watermarked[i];
        acc -= clean[i];
    }
    acc *= 1.0 / static_cast<double>(watermarked.size());
    return acc;
}

Image avg_removal(const Image& watermarked, const Image& residual) {
    require(watermarked.same_shape(residual), "residual shape does not match image");
    return clamp01(watermarked - residual);
}

Image avg_forgery(const Image& clean, const Image& residual) {
    require(clean.same_shape(residual), "residual shape does not match image");
    return clamp01(clean + residual);
}

AttackResult vae_removal(const Image& watermarked, const Surrogate& surrogate, const AttackConfig& cfg) {
    cfg.validate();
    require_surrogate(surrogate);
    double mean = 0.0;
    for (double v : watermarked.values()) mean += v;
    mean /= static_cast<double>(watermarked.size());
    const Image flat(watermarked.channels(), watermarked.height(), watermarked.width(), mean);
    return encoder_attack(watermarked, surrogate.codec->encode(flat), surrogate, cfg);
}

AttackResult vae_forgery(const Image& clean, const Image& reference, const Surrogate& surrogate,
                         const AttackConfig& cfg) {
    cfg.validate();
    require_surrogate(surrogate);
    require(clean.same_shape(reference), "clean and reference images differ in shape");
    return encoder_attack(clean, surrogate.codec->encode(reference), surrogate, cfg);
}

Image sign_flip_oracle(const Image& watermarked, const ImageCodec& codec, int channel) {
    Tensor3 z = codec.encode(watermarked);
    require(channel >= 0 && channel < z.channels(), "sign flip channel out of range");
    for (double& v : z.plane(channel)) v = -v;
    return quantize8(codec.decode(z));
}

}  // namespace ists
