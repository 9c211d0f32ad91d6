#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ists/codec.hpp"
#include "ists/diffusion.hpp"

namespace ists {

enum class AttackKind { ImpRemoval, ImpForgery, AvgRemoval, AvgForgery, VaeRemoval, VaeForgery };

std::string to_string(AttackKind kind);
AttackKind attack_kind_from_string(const std::string& name);
bool is_removal(AttackKind kind);
const std::vector<AttackKind>& all_attacks();

/// How `lr` is interpreted. Absolute uses it as the raw gradient step;
/// Curvature divides it by the largest curvature of the data term, which
/// makes the step independent of the surrogate's latent scale.
enum class StepRule { Absolute, Curvature };

std::string to_string(StepRule rule);
StepRule step_rule_from_string(const std::string& name);

struct AttackConfig {
    AttackKind kind = AttackKind::ImpRemoval;
    int steps = 150;
    double lr = 0.01;
    double lambda = 5e4;
    int n_pairs = 100;
    StepRule step_rule = StepRule::Absolute;

    void validate() const;
};

/// White-box surrogate: the diffusion model and its image codec.
struct Surrogate {
    std::shared_ptr<const DiffusionBackend> backend;
    std::shared_ptr<const ImageCodec> codec;
};

struct AttackResult {
    Image attacked;
    double perturbation_norm = 0.0;  // L2 distance to the input image
    std::vector<double> loss_trace;  // objective before each step
    Tensor3 delta;                   // optimised perturbation (latent for Imp, pixels for VAE)
};

/// Minimises 1/2 ||Inv_{0->T}(z0 + delta) + z_T^w||^2 and decodes z0 + delta.
AttackResult imp_removal(const Image& watermarked, const PromptContext& ctx, const Surrogate& surrogate,
                         const AttackConfig& cfg);

/// Minimises 1/2 ||Inv_{0->T}(z0^c + delta) - z_T^w||^2 toward a reference image.
AttackResult imp_forgery(const Image& clean, const Image& reference, const PromptContext& ctx,
                         const Surrogate& surrogate, const AttackConfig& cfg);

/// delta = mean(watermarked) - mean(clean), pixelwise.
Image avg_residual(const std::vector<Image>& watermarked, const std::vector<Image>& clean);
Image avg_removal(const Image& watermarked, const Image& residual);
Image avg_forgery(const Image& clean, const Image& residual);

/// min 1/2 ||E(x + delta) - E(mu_x)||^2 + lambda/2 ||delta||^2 with mu_x the
/// constant image at the mean pixel value; proximal gradient steps.
AttackResult vae_removal(const Image& watermarked, const Surrogate& surrogate, const AttackConfig& cfg);

/// min 1/2 ||E(x_c + delta) - E(x_ref)||^2 + lambda/2 ||delta||^2.
AttackResult vae_forgery(const Image& clean, const Image& reference, const Surrogate& surrogate,
                         const AttackConfig& cfg);

/// Oracle attack: negates one latent channel (the watermark carrier) and
/// decodes. Inverts the sign of the embedded pattern without touching
/// the other channels.
Image sign_flip_oracle(const Image& watermarked, const ImageCodec& codec, int channel);

/// Largest eigenvalue of J^T J for the inversion map 0 -> T (power iteration).
double inversion_curvature(const Surrogate& surrogate, const PromptContext& ctx);
/// Largest eigenvalue of E^T E for the encoder.
double encoder_curvature(const Surrogate& surrogate, const Image& like);

}  // namespace ists
