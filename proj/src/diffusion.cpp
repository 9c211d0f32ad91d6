#include "ists/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ists/random.hpp"

namespace ists {

NoiseSchedule::NoiseSchedule(std::vector<double> alphas) : alphas_(std::move(alphas)) {
    require(alphas_.size() >= 2, "noise schedule needs at least one step");
    require(alphas_.front() == 1.0, "noise schedule must start at alpha_0 = 1");
    for (std::size_t t = 1; t < alphas_.size(); ++t) {
        require(alphas_[t] > 0.0 && alphas_[t] <= 1.0, "noise schedule values must lie in (0, 1]");
        require(alphas_[t] < alphas_[t - 1], "noise schedule must be strictly decreasing");
    }
}

NoiseSchedule NoiseSchedule::linear(int steps, double final_alpha) {
    require(steps >= 1, "schedule needs a positive step count");
    require(final_alpha > 0.0 && final_alpha < 1.0, "final alpha must lie in (0, 1)");
    std::vector<double> alphas(static_cast<std::size_t>(steps) + 1);
    for (int t = 0; t <= steps; ++t)
        alphas[t] = 1.0 - (1.0 - final_alpha) * static_cast<double>(t) / steps;
    return NoiseSchedule(std::move(alphas));
}

double NoiseSchedule::alpha(int t) const {
    require(t >= 0 && t <= steps(), "timestep outside schedule");
    return alphas_[t];
}

std::string to_string(BackendKind kind) {
    switch (kind) {
    case BackendKind::ToyScale: return "toy-scale";
    case BackendKind::ToyLinear: return "toy-linear";
    case BackendKind::ExternalAdapter: return "external-adapter";
    }
    return "unknown";
}

BackendKind backend_kind_from_string(const std::string& name) {
    if (name == "toy-scale") return BackendKind::ToyScale;
    if (name == "toy-linear") return BackendKind::ToyLinear;
    if (name == "external-adapter") return BackendKind::ExternalAdapter;
    throw_argument("unknown backend kind '" + name + "'");
}

PromptContext PromptContext::make(const std::string& prompt, std::uint64_t run_seed) {
    return {prompt, derive_seed(run_seed, "prompt:" + prompt)};
}

// ---------------------------------------------------------------------------

DiffusionBackend::DiffusionBackend(BackendConfig config) : config_(std::move(config)) {
    require(config_.channels > 0 && config_.height > 0 && config_.width > 0,
            "latent dimensions must be positive");
}

Latent DiffusionBackend::sample_initial_noise(const PromptContext& ctx) const {
    Rng rng(derive_seed(ctx.seed, "initial-noise"));
    Latent z{Tensor3(config_.channels, config_.height, config_.width), steps()};
    for (double& v : z.data.values()) v = rng.normal();
    return z;
}

void DiffusionBackend::check_latent(const Latent& z) const {
    require(z.data.channels() == config_.channels && z.data.height() == config_.height &&
                z.data.width() == config_.width,
            "latent shape does not match backend configuration");
}

void DiffusionBackend::check_range(int from, int to, bool upward) const {
    require(from >= 0 && from <= steps() && to >= 0 && to <= steps(), "timestep outside [0, T]");
    if (upward)
        require(from < to, "inversion needs t1 < t2");
    else
        require(to < from, "denoising needs t1 < t2");
}

std::pair<double, double> DiffusionBackend::step_coefficients(int t) const {
    const double a_t = config_.schedule.alpha(t);
    const double a_prev = config_.schedule.alpha(t - 1);
    const double scale = std::sqrt(a_prev / a_t);
    return {scale, std::sqrt(1.0 - a_prev) - scale * std::sqrt(1.0 - a_t)};
}

Latent DiffusionBackend::denoise(const PromptContext& ctx, Latent z, int target) const {
    check_latent(z);
    check_range(z.timestep, target, false);
    for (int t = z.timestep; t > target; --t) {
        Tensor3 eps = predict_noise(ctx, z, t);
        auto [a, b] = step_coefficients(t);
        z.data *= a;
        eps *= b;
        z.data += eps;
        z.timestep = t - 1;
    }
    return z;
}

Tensor3 DiffusionBackend::invert_vjp(const PromptContext&, const Tensor3&, int, int) const {
    throw Error(ErrorCode::AttackUnsupported, "backend '" + to_string(config_.kind) + "' is not differentiable");
}

double DiffusionBackend::nominal_scale(int, int) const { return 1.0; }

// ---------------------------------------------------------------------------

ToyScaleBackend::ToyScaleBackend(BackendConfig config) : DiffusionBackend(std::move(config)) {}

Tensor3 ToyScaleBackend::predict_noise(const PromptContext&, const Latent& z, int t) const {
    check_latent(z);
    require(t > 0 && t <= steps(), "predict_noise needs 0 < t <= T");
    return Tensor3(z.data.channels(), z.data.height(), z.data.width());
}

Latent ToyScaleBackend::invert(const PromptContext&, Latent z, int target) const {
    check_latent(z);
    check_range(z.timestep, target, true);
    for (int t = z.timestep + 1; t <= target; ++t) z.data *= 1.0 / step_coefficients(t).first;
    z.timestep = target;
    return z;
}

Tensor3 ToyScaleBackend::invert_vjp(const PromptContext& ctx, const Tensor3& v, int t1, int t2) const {
    return invert(ctx, Latent{v, t1}, t2).data;
}

double ToyScaleBackend::nominal_scale(int t, int) const {
    const auto& s = config().schedule;
    return std::sqrt(s.alpha(t) / s.alpha(steps()));
}

// ---------------------------------------------------------------------------

namespace {
constexpr double kMaxSymbol = 0.5;
constexpr double kMaxCondition = 1e8;
}  // namespace

ToyLinearBackend::ToyLinearBackend(BackendConfig config) : DiffusionBackend(std::move(config)) {
    const auto& cfg = this->config();
    require(cfg.height >= 3 && cfg.width >= 3, "toy-linear backend needs planes of at least 3x3");
    Rng rng(derive_seed(cfg.linear_op_seed, "toy-linear-operator"));
    for (int c = 0; c < cfg.channels; ++c) {
        std::array<double, 9> k{};
        for (double& v : k) v = rng.normal();
        ComplexPlane embedded(cfg.height, cfg.width);
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
                embedded.at((dy + cfg.height) % cfg.height, (dx + cfg.width) % cfg.width) +=
                    k[(dy + 1) * 3 + (dx + 1)];
        ComplexPlane symbol = fft2(embedded);
        double peak = 0.0;
        for (const Complex& s : symbol.values) peak = std::max(peak, std::abs(s));
        const double scale = peak > 0.0 ? kMaxSymbol / peak : 0.0;
        for (double& v : k) v *= scale;
        for (Complex& s : symbol.values) s *= scale;
        kernels_.push_back(k);
        symbols_.push_back(std::move(symbol));
    }

    double worst = 1.0;
    for (int t = 1; t <= steps(); ++t) {
        auto [a, b] = step_coefficients(t);
        for (const auto& symbol : symbols_) {
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            for (const Complex& s : symbol.values) {
                const double m = std::abs(a + b * s);
                lo = std::min(lo, m);
                hi = std::max(hi, m);
            }
            if (!(lo > 0.0)) throw Error(ErrorCode::Backend, "toy-linear step operator is singular");
            worst = std::max(worst, hi / lo);
        }
    }
    if (!std::isfinite(worst) || worst > kMaxCondition)
        throw Error(ErrorCode::Backend, "toy-linear step operator is ill-conditioned");
    condition_ = worst;

    const std::size_t n = static_cast<std::size_t>(cfg.height) * cfg.width;
    const int top = steps();
    for (const auto& symbol : symbols_) {
        std::vector<Complex> prefix((static_cast<std::size_t>(top) + 1) * n, Complex(1.0));
        for (int t = 1; t <= top; ++t) {
            auto [a, b] = step_coefficients(t);
            for (std::size_t i = 0; i < n; ++i)
                prefix[t * n + i] = prefix[(t - 1) * n + i] * (a + b * symbol.values[i]);
        }
        std::vector<double> nominal(static_cast<std::size_t>(top) + 1);
        for (int t = 0; t <= top; ++t) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += std::norm(prefix[top * n + i] / prefix[t * n + i]);
            nominal[t] = std::sqrt(acc / static_cast<double>(n));
        }
        prefix_.push_back(std::move(prefix));
        nominal_.push_back(std::move(nominal));
    }
}

Tensor3 ToyLinearBackend::apply_operator(const Tensor3& z) const {
    const int h = z.height(), w = z.width();
    Tensor3 out(z.channels(), h, w);
    for (int c = 0; c < z.channels(); ++c) {
        const auto& k = kernels_[c];
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx)
                        acc += k[(dy + 1) * 3 + (dx + 1)] * z(c, (y - dy + h) % h, (x - dx + w) % w);
                out(c, y, x) = acc;
            }
    }
    return out;
}

Tensor3 ToyLinearBackend::predict_noise(const PromptContext&, const Latent& z, int t) const {
    check_latent(z);
    require(t > 0 && t <= steps(), "predict_noise needs 0 < t <= T");
    return apply_operator(z.data);
}

Tensor3 ToyLinearBackend::solve_steps(const Tensor3& z, int from, int to, bool adjoint) const {
    const int h = z.height(), w = z.width();
    Tensor3 out(z.channels(), h, w);
    for (int c = 0; c < z.channels(); ++c) {
        ComplexPlane plane(h, w);
        auto src = z.plane(c);
        for (std::size_t i = 0; i < src.size(); ++i) plane.values[i] = src[i];
        ComplexPlane spec = fft2(plane);
        const std::size_t n = spec.values.size();
        const auto& prefix = prefix_[c];
        for (std::size_t i = 0; i < n; ++i) {
            const Complex transfer = prefix[to * n + i] / prefix[from * n + i];
            spec.values[i] /= adjoint ? std::conj(transfer) : transfer;
        }
        ComplexPlane back = ifft2(spec);
        auto dst = out.plane(c);
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = back.values[i].real();
    }
    return out;
}

Latent ToyLinearBackend::invert(const PromptContext&, Latent z, int target) const {
    check_latent(z);
    check_range(z.timestep, target, true);
    return Latent{solve_steps(z.data, z.timestep, target, false), target};
}

Tensor3 ToyLinearBackend::invert_vjp(const PromptContext&, const Tensor3& v, int t1, int t2) const {
    check_range(t1, t2, true);
    return solve_steps(v, t1, t2, true);
}

double ToyLinearBackend::nominal_scale(int t, int channel) const {
    require(channel >= 0 && channel < config().channels, "channel out of range");
    require(t >= 0 && t <= steps(), "timestep outside [0, T]");
    return nominal_[channel][t];
}

// ---------------------------------------------------------------------------

namespace {

template <class F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::Backend, std::string("external model ") + what + " failed: " + e.what());
    }
}

}  // namespace

ExternalAdapterBackend::ExternalAdapterBackend(BackendConfig config, ExternalAdapter adapter)
    : DiffusionBackend(std::move(config)), adapter_(std::move(adapter)) {}

Tensor3 ExternalAdapterBackend::predict_noise(const PromptContext& ctx, const Latent& z, int t) const {
    if (!adapter_.predict_noise) throw Error(ErrorCode::Backend, "external adapter has no noise predictor");
    check_latent(z);
    return guarded("noise prediction", [&] { return adapter_.predict_noise(ctx, z, t); });
}

Latent ExternalAdapterBackend::invert(const PromptContext& ctx, Latent z, int target) const {
    if (!adapter_.invert) throw Error(ErrorCode::Backend, "external adapter has no inversion");
    check_latent(z);
    check_range(z.timestep, target, true);
    return guarded("inversion", [&] { return adapter_.invert(ctx, z, target); });
}

Tensor3 ExternalAdapterBackend::invert_vjp(const PromptContext& ctx, const Tensor3& v, int t1, int t2) const {
    if (!adapter_.invert_vjp)
        throw Error(ErrorCode::AttackUnsupported, "external adapter exposes no gradients");
    return guarded("inversion gradient", [&] { return adapter_.invert_vjp(ctx, v, t1, t2); });
}

std::shared_ptr<const DiffusionBackend> make_backend(const BackendConfig& config) {
    switch (config.kind) {
    case BackendKind::ToyScale: return std::make_shared<ToyScaleBackend>(config);
    case BackendKind::ToyLinear: return std::make_shared<ToyLinearBackend>(config);
    case BackendKind::ExternalAdapter: break;
    }
    throw Error(ErrorCode::Backend, "external-adapter backend requested but no adapter is registered");
}

std::shared_ptr<const DiffusionBackend> make_backend(const BackendConfig& config, ExternalAdapter adapter) {
    if (config.kind != BackendKind::ExternalAdapter) return make_backend(config);
    return std::make_shared<ExternalAdapterBackend>(config, std::move(adapter));
}

}  // namespace ists
