#pragma once

#include <doctest.h>

#include "ists/error.hpp"
#include "ists/random.hpp"
#include "ists/tensor.hpp"

namespace ists::test {

inline Tensor3 random_tensor(int c, int h, int w, std::uint64_t seed) {
    Rng rng(seed);
    Tensor3 t(c, h, w);
    for (double& v : t.values()) v = rng.normal();
    return t;
}

inline Image random_image(int h, int w, std::uint64_t seed) {
    Rng rng(seed);
    Image img(3, h, w);
    for (double& v : img.values()) v = rng.uniform();
    return img;
}

template <class F>
ErrorCode error_code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an ists::Error");
    return ErrorCode::Argument;
}

}  // namespace ists::test

#include "ists/session.hpp"

namespace ists::test {

/// Small desk-style configuration that builds in well under a second.
inline RunConfig small_config() {
    RunConfig cfg = RunConfig::desk();
    cfg.backend.height = cfg.backend.width = 16;
    cfg.pattern.radius = 4;
    cfg.mapping.clusters = 8;
    cfg.mapping.lx_lo = cfg.mapping.ly_lo = -3;
    cfg.mapping.lx_hi = cfg.mapping.ly_hi = 3;
    cfg.evaluation.n_pairs = 16;
    cfg.evaluation.train_images = 16;
    cfg.seed = 5;
    return cfg;
}

inline const Lab& small_lab() {
    static const Lab lab = [] {
        const RunConfig cfg = small_config();
        return make_lab(cfg, KeyFile::from_seed(7, cfg.mapping));
    }();
    return lab;
}

}  // namespace ists::test
