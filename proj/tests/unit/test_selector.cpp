#include <doctest.h>

#include <algorithm>
#include <limits>
#include <set>

#include "helpers.hpp"
#include "ists/selector.hpp"

using namespace ists;
using ists::test::error_code_of;

namespace {

std::vector<FeatureVector> two_clouds(int per_cloud, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<FeatureVector> pts;
    for (int cloud = 0; cloud < 2; ++cloud)
        for (int i = 0; i < per_cloud; ++i) {
            FeatureVector v(3);
            v << (cloud ? 5.0 : -5.0) + 0.3 * rng.normal(), 0.3 * rng.normal(), 0.3 * rng.normal();
            pts.push_back(v);
        }
    return pts;
}

std::vector<FeatureVector> separable_clusters(int k, int per_cluster, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<FeatureVector> pts;
    for (int c = 0; c < k; ++c)
        for (int i = 0; i < per_cluster; ++i) {
            FeatureVector v = FeatureVector::Zero(k);
            v(c) = 10.0;
            for (int j = 0; j < k; ++j) v(j) += 0.1 * rng.normal();
            pts.push_back(v);
        }
    return pts;
}

double sse(const std::vector<FeatureVector>& pts, const std::vector<int>& labels, int k) {
    double total = 0.0;
    for (int c = 0; c < k; ++c) {
        FeatureVector mean = FeatureVector::Zero(pts[0].size());
        int n = 0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (labels[i] == c) mean += pts[i], ++n;
        if (n == 0) continue;
        mean /= n;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (labels[i] == c) total += (pts[i] - mean).squaredNorm();
    }
    return total;
}

/// Unit-norm features around random directions, like the image encoder output.
std::vector<FeatureVector> normalized_clusters(int k, int per_cluster, int d, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<FeatureVector> pts;
    for (int c = 0; c < k; ++c) {
        FeatureVector center(d);
        for (double& v : center) v = rng.normal();
        center.normalize();
        for (int i = 0; i < per_cluster; ++i) {
            FeatureVector v = center;
            for (double& x : v) x += 0.02 * rng.normal() / std::sqrt(double(d));
            pts.push_back(v.normalized());
        }
    }
    return pts;
}

}  // namespace

TEST_CASE("parameter mapping arithmetic") {
    const MappingConfig m;
    CHECK(map_params(0, m) == InjectionParams{10, {-12, -12}});
    CHECK(map_params(25, m) == InjectionParams{15, {-11, -11}});
    for (int y = 0; y < m.clusters; ++y) {
        const InjectionParams p = map_params(y, m);
        CHECK(p.t == 10 + y % 10);
        CHECK(p.l.lx == -12 + y % 24);
        CHECK(p.l.ly == -12 + (y / 24) % 24);
    }
    MappingConfig rm = m;
    rm.lx_hi = 4;  // l_x width 16
    rm.row_major_unfold = true;
    CHECK(map_params(40, rm).l.ly == -12 + (40 / 16) % 24);
    CHECK(error_code_of([&] { map_params(m.clusters, m); }) == ErrorCode::Argument);
    CHECK(error_code_of([&] { map_params(-1, m); }) == ErrorCode::Argument);
}

TEST_CASE("mapping validation") {
    MappingConfig m;
    CHECK_NOTHROW(m.validate(50));
    m.t_hi = 51;
    CHECK(error_code_of([&] { m.validate(50); }) == ErrorCode::Argument);
    m = MappingConfig{};
    m.lx_hi = m.lx_lo;
    CHECK(error_code_of([&] { m.validate(50); }) == ErrorCode::Argument);
    m = MappingConfig{};
    m.clusters = 0;
    CHECK(error_code_of([&] { m.validate(50); }) == ErrorCode::Argument);
}

TEST_CASE("k-means finds the optimal 2-partition") {
    const auto pts = two_clouds(6, 3);
    const KMeansResult r = kmeans(pts, 2, KMeansOptions{1});
    double best = std::numeric_limits<double>::infinity();
    for (int mask = 1; mask < (1 << 12) - 1; ++mask) {
        std::vector<int> labels(12);
        for (int i = 0; i < 12; ++i) labels[i] = (mask >> i) & 1;
        best = std::min(best, sse(pts, labels, 2));
    }
    CHECK(sse(pts, r.labels, 2) == doctest::Approx(best));
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
        CHECK(r.objective_trace[i] <= r.objective_trace[i - 1] + 1e-12);
}

TEST_CASE("k-means edge cases") {
    const auto pts = two_clouds(5, 4);
    const KMeansResult one = kmeans(pts, 1, KMeansOptions{});
    CHECK(std::all_of(one.labels.begin(), one.labels.end(), [](int l) { return l == 0; }));
    CHECK(error_code_of([&] { kmeans(pts, 11, KMeansOptions{}); }) == ErrorCode::Argument);
    CHECK(error_code_of([&] { kmeans({}, 1, KMeansOptions{}); }) == ErrorCode::Argument);
    const KMeansResult a = kmeans(pts, 3, KMeansOptions{9}), b = kmeans(pts, 3, KMeansOptions{9});
    CHECK(a.labels == b.labels);
}

TEST_CASE("key permutation is a seeded bijection") {
    const auto p = key_permutation("secret", 64);
    std::set<int> seen(p.begin(), p.end());
    CHECK(seen.size() == 64);
    CHECK(*seen.begin() == 0);
    CHECK(*seen.rbegin() == 63);
    CHECK(key_permutation("secret", 64) == p);
    CHECK(key_permutation("other", 64) != p);
    CHECK(key_fingerprint("secret") == key_fingerprint("secret"));
    CHECK(key_fingerprint("secret").find("secret") == std::string::npos);
}

TEST_CASE("image features are normalized block means") {
    Image img(3, 16, 16, 0.25);
    const FeatureVector f = encode_features(img);
    CHECK(f.size() == 3 * 64);
    CHECK(f.norm() == doctest::Approx(1.0));
    CHECK((f.array() == f(0)).all());
    CHECK(error_code_of([] { encode_features(Image(3, 12, 16)); }) == ErrorCode::Argument);
}

TEST_CASE("nearest-centroid selector reproduces its training labels") {
    const auto pts = separable_clusters(16, 6, 2);
    MappingConfig m;
    m.clusters = 16;
    const SelectorModel model = train_selector(pts, m, "k");
    std::set<int> raw;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(raw_label(model, pts[i]) == model.training_labels[i]);
        CHECK(assign_label(model, pts[i]) == model.permutation[static_cast<std::size_t>(model.training_labels[i])]);
        raw.insert(model.training_labels[i]);
    }
    CHECK(raw.size() == 16);
    for (int k = 0; k < 16; ++k) CHECK(raw_label(model, model.centroids.row(k).transpose()) == k);
}

TEST_CASE("network selector learns separable clusters") {
    const auto pts = normalized_clusters(16, 6, 192, 5);
    MappingConfig m;
    m.clusters = 16;
    SelectorTraining opts;
    opts.mode = ClassifierMode::Network;
    const SelectorModel model = train_selector(pts, m, "k", opts);
    int correct = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) correct += raw_label(model, pts[i]) == model.training_labels[i];
    CHECK(correct >= 96 * 99 / 100);
    CHECK(model.network.logits(pts[0]).size() == 16);
}

TEST_CASE("nearest-centroid ties go to the lower index") {
    MappingConfig m;
    m.clusters = 2;
    SelectorModel model;
    model.mapping = m;
    model.centroids = Eigen::MatrixXd(2, 1);
    model.centroids << -1.0, 1.0;
    model.install_key("k");
    CHECK(raw_label(model, FeatureVector::Zero(1)) == 0);
}

TEST_CASE("select maps through the permutation") {
    const Lab& lab = ists::test::small_lab();
    const SelectorModel& model = *lab.selector;
    const Image img = lab.watermarker(SchemeConfig::ists()).generate_plain(PromptContext::make("q", 1));
    const int y = assign_label(model, encode_features(img));
    CHECK(select(model, img) == map_params(y, model.mapping));
    CHECK(classifier_mode_from_string("network") == ClassifierMode::Network);
    CHECK(error_code_of([] { classifier_mode_from_string("svm"); }) == ErrorCode::Argument);
}
