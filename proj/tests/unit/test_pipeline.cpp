#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "ists/metrics.hpp"
#include "ists/pipeline.hpp"

using namespace ists;
using ists::test::error_code_of;
using ists::test::small_lab;

TEST_CASE("sided statistic") {
    const std::vector<Complex> w{{1, 2}, {-3, 0.5}, {0, -1}};
    std::vector<Complex> neg(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) neg[i] = -w[i];
    const double mean_abs = (std::abs(w[0]) + std::abs(w[1]) + std::abs(w[2])) / 3.0;

    CHECK(sided_statistic(w, w, true).d == 0.0);
    const SidedStatistic flipped = sided_statistic(w, neg, true);
    CHECK(flipped.d == 0.0);
    CHECK(flipped.side == Side::Minus);
    CHECK(sided_statistic(w, neg, false).d == doctest::Approx(2.0 * mean_abs));
    CHECK(deviation(w, neg, 1.0) == doctest::Approx(2.0 * mean_abs));

    const std::vector<Complex> s{{0.5, 0}, {1, 1}, {2, -2}};
    CHECK(deviation(w, s, 1.0, Modulus::Componentwise) == doctest::Approx((0.5 + 2 + 4 + 0.5 + 2 + 1) / 3.0));
    for (Modulus mod : {Modulus::Complex, Modulus::Componentwise}) {
        std::vector<Complex> ns(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) ns[i] = -s[i];
        CHECK(sided_statistic(w, s, true, mod).d == sided_statistic(w, ns, true, mod).d);
        CHECK(sided_statistic(w, s, true, mod).d <= sided_statistic(w, s, false, mod).d);
    }
}

TEST_CASE("empirical threshold follows the strict-below convention") {
    std::vector<double> scores(100);
    std::iota(scores.begin(), scores.end(), 1.0);
    CHECK(calibrate_threshold(scores, 0.01) == 2.0);
    CHECK(calibrate_threshold(scores, 0.5) == 51.0);
    CHECK(std::isinf(empirical_threshold(scores, 1.0)));
    CHECK(calibrate_threshold(std::vector<double>(100, 3.0), 0.01) == 3.0);
    CHECK(error_code_of([] { calibrate_threshold(std::vector<double>(99, 1.0), 0.01); }) == ErrorCode::Argument);
    CHECK(error_code_of([] { calibrate_threshold(std::vector<double>(100, 1.0), 0.0); }) == ErrorCode::Argument);

    // Brute-force oracle: the largest benign value tau with #{s < tau} <= fpr*n.
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> s(200);
        for (double& v : s) v = static_cast<double>(rng.below(50));
        for (double fpr : {0.01, 0.05, 0.2}) {
            double best = -1;
            for (double tau : s) {
                const auto below = std::count_if(s.begin(), s.end(), [&](double v) { return v < tau; });
                if (below <= std::floor(fpr * 200 + 1e-9)) best = std::max(best, tau);
            }
            CHECK(calibrate_threshold(s, fpr) == best);
        }
    }
}

TEST_CASE("scheme names") {
    CHECK(scheme_name(SchemeConfig::ists()) == "ists");
    CHECK(scheme_name(SchemeConfig::tree_ring()) == "tree-ring");
    CHECK(scheme_name(SchemeConfig::without_dynamic_pattern()) == "wo-dyn-pattern");
    CHECK(scheme_name(SchemeConfig::without_dynamic_injection()) == "wo-dyn-injection");
    CHECK(scheme_name(SchemeConfig::without_two_sided()) == "wo-two-sided");
}

TEST_CASE("generation is deterministic and in range") {
    const Watermarker wm = small_lab().watermarker(SchemeConfig::ists());
    const auto ctx = PromptContext::make("a cat", 3);
    const GeneratedPair a = wm.generate_pair(ctx), b = wm.generate_pair(ctx);
    CHECK(a.plain.values() == b.plain.values());
    CHECK(a.watermarked.values() == b.watermarked.values());
    CHECK(a.params == b.params);
    CHECK(a.plain.values() == wm.generate_plain(ctx).values());
    CHECK(a.params == wm.params_for(a.plain));
    for (double v : a.watermarked.values()) CHECK((v >= 0.0 && v <= 1.0));
    CHECK(psnr(a.watermarked, a.plain) > 20.0);
}

TEST_CASE("codec round trip stays within one gray level") {
    const Watermarker wm = small_lab().watermarker(SchemeConfig::ists());
    const Image img = wm.generate_plain(PromptContext::make("a dog", 3));
    const Image back = wm.codec().decode(wm.codec().encode(img));
    CHECK(back.max_abs_diff(img) < 1.0 / 255.0);
}

TEST_CASE("exact pattern at the injection step scores zero") {
    // A Hermitian pattern at l = 0 survives real-part truncation unchanged.
    Lab lab = small_lab();
    lab.key.conjugate_symmetric = true;
    const Watermarker wm = lab.watermarker(SchemeConfig::ists());
    const Offset l{0, 0};
    const auto z = wm.backend().sample_initial_noise(PromptContext::make("x", 1));
    const Latent embedded = wm.embed(Latent{z.data, 12}, l);
    CHECK(wm.latent_statistic(embedded, l).d < 1e-6);
    Tensor3 neg = embedded.data;
    neg *= -1.0;
    CHECK(wm.latent_statistic(Latent{neg, 12}, l).d < 1e-6);
}

TEST_CASE("detection separates watermarked from plain images") {
    const Watermarker wm = small_lab().watermarker(SchemeConfig::ists());
    ScoreSet s;
    for (int i = 0; i < 12; ++i) {
        const GeneratedPair p = wm.generate_pair(PromptContext::make("d" + std::to_string(i), 9));
        s.positives.push_back(wm.score(p.watermarked));
        s.negatives.push_back(wm.score(p.plain));
        const DetectionResult r = wm.detect(p.watermarked, 1e300);
        CHECK(r.decision);
        CHECK(r.d == s.positives.back());
        CHECK(r.params_used == wm.params_for(p.watermarked));
    }
    CHECK(auc(s) > 0.95);
}

TEST_CASE("tree-ring scheme injects at T with zero offset") {
    const Watermarker wm = small_lab().watermarker(SchemeConfig::tree_ring());
    CHECK(wm.static_timestep() == wm.backend().steps());
    const GeneratedPair p = wm.generate_pair(PromptContext::make("s", 1));
    CHECK(p.params.t == wm.backend().steps());
    CHECK(p.params.l == Offset{0, 0});
    CHECK(wm.score(p.watermarked) < wm.score(p.plain));
}

TEST_CASE("dynamic schemes require a selector") {
    const Lab& lab = small_lab();
    CHECK(error_code_of([&] {
              Watermarker(lab.backend, lab.codec, lab.key, nullptr, SchemeConfig::ists());
          }) == ErrorCode::Argument);
}
