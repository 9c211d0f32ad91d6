#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ists/diffusion.hpp"

using namespace ists;
using ists::test::error_code_of;
using ists::test::random_tensor;

namespace {

BackendConfig config(BackendKind kind, int side = 8) {
    BackendConfig bc;
    bc.kind = kind;
    bc.height = bc.width = side;
    bc.linear_op_seed = 3;
    return bc;
}

const PromptContext kCtx = PromptContext::make("a photo", 1);

}  // namespace

TEST_CASE("linear schedule") {
    const NoiseSchedule s = NoiseSchedule::linear(50);
    CHECK(s.steps() == 50);
    CHECK(s.alpha(0) == 1.0);
    CHECK(s.alpha(50) == doctest::Approx(0.01));
    CHECK(s.alpha(25) == doctest::Approx(1.0 - 0.99 * 0.5));
    for (int t = 1; t <= 50; ++t) CHECK(s.alpha(t) < s.alpha(t - 1));
    CHECK(error_code_of([] { NoiseSchedule({1.0, 1.2}); }) == ErrorCode::Argument);
    CHECK(error_code_of([] { NoiseSchedule({0.9, 0.5}); }) == ErrorCode::Argument);
}

TEST_CASE("toy-linear operator matches its materialized convolution") {
    const auto backend = make_backend(config(BackendKind::ToyLinear));
    const auto& linear = dynamic_cast<const ToyLinearBackend&>(*backend);
    const Tensor3 z = random_tensor(4, 8, 8, 2);
    const Latent latent{z, 10};
    const Tensor3 eps = backend->predict_noise(kCtx, latent, 10);
    CHECK(eps.max_abs_diff(linear.apply_operator(z)) < 1e-12);

    // Linearity and circular shift equivariance.
    Tensor3 shifted(4, 8, 8);
    for (int c = 0; c < 4; ++c)
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) shifted(c, (y + 1) % 8, (x + 3) % 8) = z(c, y, x);
    const Tensor3 eps_shifted = linear.apply_operator(shifted);
    for (int c = 0; c < 4; ++c)
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) CHECK(std::abs(eps_shifted(c, (y + 1) % 8, (x + 3) % 8) - eps(c, y, x)) < 1e-12);
    CHECK(linear.condition_number() > 1.0);
}

TEST_CASE("denoise step follows the DDIM update") {
    for (BackendKind kind : {BackendKind::ToyScale, BackendKind::ToyLinear}) {
        const auto backend = make_backend(config(kind));
        const Tensor3 z = random_tensor(4, 8, 8, 4);
        const int t = 30;
        const double at = backend->config().schedule.alpha(t), ap = backend->config().schedule.alpha(t - 1);
        const Tensor3 eps = backend->predict_noise(kCtx, Latent{z, t}, t);
        Tensor3 want = std::sqrt(ap) * (1.0 / std::sqrt(at)) * (z - std::sqrt(1.0 - at) * eps) + std::sqrt(1.0 - ap) * eps;
        const Latent got = backend->denoise(kCtx, Latent{z, t}, t - 1);
        CHECK(got.timestep == t - 1);
        CHECK(got.data.max_abs_diff(want) < 1e-12);
    }
}

TEST_CASE("inversion is exact and telescopes") {
    for (BackendKind kind : {BackendKind::ToyScale, BackendKind::ToyLinear}) {
        CAPTURE(to_string(kind));
        const auto backend = make_backend(config(kind));
        const Tensor3 z = random_tensor(4, 8, 8, 6);
        const Latent top{z, backend->steps()};
        const Latent z0 = backend->denoise(kCtx, top, 0);
        CHECK(backend->invert(kCtx, z0, backend->steps()).data.max_abs_diff(z) < 1e-9);
        const Latent mid = backend->invert(kCtx, z0, 17);
        CHECK(mid.timestep == 17);
        CHECK(backend->invert(kCtx, mid, backend->steps()).data.max_abs_diff(z) < 1e-9);
        CHECK(backend->denoise(kCtx, top, 17).data.max_abs_diff(mid.data) < 1e-9);
    }
}

TEST_CASE("inversion vector-Jacobian product is the adjoint") {
    for (BackendKind kind : {BackendKind::ToyScale, BackendKind::ToyLinear}) {
        const auto backend = make_backend(config(kind));
        const Tensor3 u = random_tensor(4, 8, 8, 7), v = random_tensor(4, 8, 8, 8);
        const double lhs = backend->invert(kCtx, Latent{u, 5}, 40).data.dot(v);
        const double rhs = u.dot(backend->invert_vjp(kCtx, v, 5, 40));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("nominal scale tracks the empirical trajectory spread") {
    const auto backend = make_backend(config(BackendKind::ToyLinear, 32));
    double sum_sq = 0.0;
    std::size_t n = 0;
    for (int i = 0; i < 20; ++i) {
        const auto ctx = PromptContext::make("p" + std::to_string(i), 2);
        const Latent z = backend->denoise(ctx, backend->sample_initial_noise(ctx), 12);
        for (double v : z.data.plane(1)) sum_sq += v * v;
        n += z.data.plane_size();
    }
    CHECK(std::sqrt(sum_sq / double(n)) == doctest::Approx(backend->nominal_scale(12, 1)).epsilon(0.05));
}

TEST_CASE("initial noise is a function of the prompt context") {
    const auto backend = make_backend(config(BackendKind::ToyScale));
    const auto a = backend->sample_initial_noise(kCtx);
    CHECK(a.timestep == backend->steps());
    CHECK(a.data.values() == backend->sample_initial_noise(kCtx).data.values());
    CHECK(a.data.values() != backend->sample_initial_noise(PromptContext::make("other", 1)).data.values());
}

TEST_CASE("backend argument errors") {
    const auto backend = make_backend(config(BackendKind::ToyScale));
    const Tensor3 z = random_tensor(4, 8, 8, 1);
    CHECK(error_code_of([&] { backend->denoise(kCtx, Latent{z, 10}, 20); }) == ErrorCode::Argument);
    CHECK(error_code_of([&] { backend->invert(kCtx, Latent{z, 10}, 5); }) == ErrorCode::Argument);
    CHECK(error_code_of([&] { backend->invert(kCtx, Latent{random_tensor(4, 4, 4, 1), 0}, 5); }) ==
          ErrorCode::Argument);
    CHECK(error_code_of([] { make_backend(config(BackendKind::ExternalAdapter)); }) == ErrorCode::Backend);
    CHECK(backend_kind_from_string("toy-linear") == BackendKind::ToyLinear);
    CHECK(error_code_of([] { backend_kind_from_string("sd-2.1"); }) == ErrorCode::Argument);
}

TEST_CASE("external adapter surfaces model failures as backend errors") {
    ExternalAdapter adapter;
    adapter.predict_noise = [](const PromptContext&, const Latent&, int) -> Tensor3 {
        throw std::runtime_error("out of memory");
    };
    adapter.invert = [](const PromptContext&, const Latent& z, int target) { return Latent{z.data, target}; };
    const auto backend = make_backend(config(BackendKind::ExternalAdapter), adapter);
    CHECK_FALSE(backend->differentiable());
    const Tensor3 z = random_tensor(4, 8, 8, 1);
    CHECK(error_code_of([&] { backend->denoise(kCtx, Latent{z, 3}, 0); }) == ErrorCode::Backend);
    CHECK(backend->invert(kCtx, Latent{z, 0}, 4).timestep == 4);
}
