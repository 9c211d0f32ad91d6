#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ists/fft.hpp"
#include "ists/tensor.hpp"

namespace ists {

/// Cumulative noise coefficients alpha_t for t = 0..T, alpha_0 = 1,
/// strictly decreasing, all in (0, 1].
class NoiseSchedule {
public:
    NoiseSchedule() : NoiseSchedule(linear(50)) {}
    explicit NoiseSchedule(std::vector<double> alphas);

    /// alpha_t decays linearly from 1 at t=0 to `final_alpha` at t=T.
    static NoiseSchedule linear(int steps, double final_alpha = 0.01);

    int steps() const noexcept { return static_cast<int>(alphas_.size()) - 1; }
    double alpha(int t) const;
    const std::vector<double>& alphas() const noexcept { return alphas_; }

private:
    std::vector<double> alphas_;
};

enum class BackendKind { ToyScale, ToyLinear, ExternalAdapter };

std::string to_string(BackendKind kind);
BackendKind backend_kind_from_string(const std::string& name);

struct BackendConfig {
    BackendKind kind = BackendKind::ToyScale;
    int channels = 4;
    int height = 16;
    int width = 16;
    NoiseSchedule schedule;
    std::uint64_t linear_op_seed = 0;
};

/// Same (prompt, seed) always yields identical backend behaviour.
struct PromptContext {
    std::string prompt;
    std::uint64_t seed = 0;

    static PromptContext make(const std::string& prompt, std::uint64_t run_seed);
};

/// Deterministic DDIM sampler and inversion. Implementations are immutable
/// after construction and safe to share between threads.
class DiffusionBackend {
public:
    explicit DiffusionBackend(BackendConfig config);
    virtual ~DiffusionBackend() = default;

    const BackendConfig& config() const noexcept { return config_; }
    int steps() const noexcept { return config_.schedule.steps(); }

    /// i.i.d. standard normal latent at t = T drawn from the context seed.
    Latent sample_initial_noise(const PromptContext& ctx) const;

    /// Noise prediction epsilon(z, t), 0 < t <= T.
    virtual Tensor3 predict_noise(const PromptContext& ctx, const Latent& z, int t) const = 0;

    /// Iterates the DDIM update from z.timestep down to `target`.
    virtual Latent denoise(const PromptContext& ctx, Latent z, int target) const;

    /// Inverse of denoise: maps z at z.timestep up to `target`.
    virtual Latent invert(const PromptContext& ctx, Latent z, int target) const = 0;

    /// Transpose of the inversion map from t1 to t2 applied to `v`
    /// (vector-Jacobian product). Used by gradient attacks.
    virtual Tensor3 invert_vjp(const PromptContext& ctx, const Tensor3& v, int t1, int t2) const;

    virtual bool differentiable() const { return false; }

    /// Expected per-entry standard deviation of `channel` at step t for a
    /// trajectory started from unit-variance noise at T.
    virtual double nominal_scale(int t, int channel) const;

protected:
    void check_latent(const Latent& z) const;
    void check_range(int from, int to, bool upward) const;

    /// DDIM coefficients for the step t -> t-1: z' = a z + b eps.
    std::pair<double, double> step_coefficients(int t) const;

private:
    BackendConfig config_;
};

/// epsilon = 0, so every DDIM step is a pure rescale.
class ToyScaleBackend final : public DiffusionBackend {
public:
    explicit ToyScaleBackend(BackendConfig config);

    Tensor3 predict_noise(const PromptContext& ctx, const Latent& z, int t) const override;
    Latent invert(const PromptContext& ctx, Latent z, int target) const override;
    Tensor3 invert_vjp(const PromptContext& ctx, const Tensor3& v, int t1, int t2) const override;
    bool differentiable() const override { return true; }
    double nominal_scale(int t, int channel) const override;
};

/// epsilon = L z for a seeded depthwise circular 3x3 convolution L.
/// The step operator (a + b L) is diagonal in the Fourier basis, which is
/// how inversion solves it exactly.
class ToyLinearBackend final : public DiffusionBackend {
public:
    explicit ToyLinearBackend(BackendConfig config);

    Tensor3 predict_noise(const PromptContext& ctx, const Latent& z, int t) const override;
    Latent invert(const PromptContext& ctx, Latent z, int target) const override;
    Tensor3 invert_vjp(const PromptContext& ctx, const Tensor3& v, int t1, int t2) const override;
    bool differentiable() const override { return true; }
    double nominal_scale(int t, int channel) const override;

    /// Apply L directly in the spatial domain.
    Tensor3 apply_operator(const Tensor3& z) const;

    /// Largest ratio max|a+bK|/min|a+bK| over all steps and frequencies.
    double condition_number() const noexcept { return condition_; }

private:
    Tensor3 solve_steps(const Tensor3& z, int from, int to, bool adjoint) const;

    std::vector<std::array<double, 9>> kernels_;  // per channel, row-major 3x3
    std::vector<ComplexPlane> symbols_;           // DFT of each kernel, uncentered
    // prefix_[c][t * n + i] = prod_{u=1..t} (a_u + b_u K_c(i)), n = plane size
    std::vector<std::vector<Complex>> prefix_;
    std::vector<std::vector<double>> nominal_;  // [c][t]
    double condition_ = 1.0;
};

/// Hooks supplied by an external latent diffusion model.
struct ExternalAdapter {
    std::function<Tensor3(const PromptContext&, const Latent&, int)> predict_noise;
    std::function<Latent(const PromptContext&, const Latent&, int)> invert;
    std::function<Tensor3(const PromptContext&, const Tensor3&, int, int)> invert_vjp;
    double guidance_scale = 1.0;
};

class ExternalAdapterBackend final : public DiffusionBackend {
public:
    ExternalAdapterBackend(BackendConfig config, ExternalAdapter adapter);

    Tensor3 predict_noise(const PromptContext& ctx, const Latent& z, int t) const override;
    Latent invert(const PromptContext& ctx, Latent z, int target) const override;
    Tensor3 invert_vjp(const PromptContext& ctx, const Tensor3& v, int t1, int t2) const override;
    bool differentiable() const override { return static_cast<bool>(adapter_.invert_vjp); }
    double nominal_scale(int, int) const override { return 1.0; }

private:
    ExternalAdapter adapter_;
};

/// Builds a toy backend; the external kind needs an adapter.
std::shared_ptr<const DiffusionBackend> make_backend(const BackendConfig& config);
std::shared_ptr<const DiffusionBackend> make_backend(const BackendConfig& config, ExternalAdapter adapter);

}  // namespace ists
