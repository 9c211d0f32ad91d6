#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "ists/tensor.hpp"
#include "ists/watermark.hpp"

namespace ists {

/// L2-normalized image feature.
using FeatureVector = Eigen::VectorXd;

/// Instance-specific injection parameters (t, l).
struct InjectionParams {
    int t = 0;
    Offset l;

    friend bool operator==(const InjectionParams&, const InjectionParams&) = default;
};

/// Label -> (t, l) mapping ranges. Upper ends are exclusive in practice
/// because the mapping is a modulo.
struct MappingConfig {
    int clusters = 1024;
    int t_lo = 10;
    int t_hi = 20;
    int lx_lo = -12;
    int lx_hi = 12;
    int ly_lo = -12;
    int ly_hi = 12;
    /// Divide by the l_x width in the l_y formula instead of the l_y width.
    bool row_major_unfold = false;

    void validate(int total_steps) const;
    bool operator==(const MappingConfig&) const = default;
};

InjectionParams map_params(int label, const MappingConfig& cfg);

/// Toy semantic encoder: per-channel 8x8 grid of block means, flattened and
/// L2-normalized. Image sides must be multiples of 8.
FeatureVector encode_features(const Image& image);

enum class ClassifierMode { NearestCentroid, Network };

std::string to_string(ClassifierMode mode);
ClassifierMode classifier_mode_from_string(const std::string& name);

struct KMeansOptions {
    std::uint64_t seed = 0;
    int max_iterations = 300;
    double tolerance = 1e-4;  // relative centroid shift
};

struct KMeansResult {
    Eigen::MatrixXd centroids;  // k x d
    std::vector<int> labels;
    std::vector<double> objective_trace;
    int iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding. Ties go to the lower index.
KMeansResult kmeans(const std::vector<FeatureVector>& points, int k, const KMeansOptions& options);

/// affine(d->d) -> ReLU -> batch-norm -> dropout -> affine(d->C).
struct SelectorNetwork {
    Eigen::MatrixXd w1;
    Eigen::VectorXd b1;
    Eigen::VectorXd gamma;
    Eigen::VectorXd beta;
    Eigen::VectorXd running_mean;
    Eigen::VectorXd running_var;
    Eigen::MatrixXd w2;
    Eigen::VectorXd b2;

    Eigen::VectorXd logits(const FeatureVector& x) const;
};

struct NetworkTraining {
    int epochs = 200;
    double learning_rate = 1e-2;
    double dropout = 0.5;
    std::uint64_t seed = 0;
};

SelectorNetwork train_network(const std::vector<FeatureVector>& features, const std::vector<int>& labels,
                              int classes, const NetworkTraining& options);

/// Key-seeded bijection on [0, n).
std::vector<int> key_permutation(const std::string& key, int n);
std::string key_fingerprint(const std::string& key);

struct SelectorModel {
    MappingConfig mapping;
    ClassifierMode mode = ClassifierMode::NearestCentroid;
    Eigen::MatrixXd centroids;
    SelectorNetwork network;
    std::vector<int> training_labels;
    std::vector<int> permutation;
    std::string key_fingerprint;

    int clusters() const noexcept { return mapping.clusters; }
    /// Re-installs the permutation for `key` (after loading from disk).
    void install_key(const std::string& key);
};

struct SelectorTraining {
    ClassifierMode mode = ClassifierMode::NearestCentroid;
    KMeansOptions kmeans;
    NetworkTraining network;
};

SelectorModel train_selector(const std::vector<FeatureVector>& features, const MappingConfig& cfg,
                             const std::string& key, const SelectorTraining& options = {});

/// Raw classifier label before the key permutation.
int raw_label(const SelectorModel& model, const FeatureVector& feature);
int assign_label(const SelectorModel& model, const FeatureVector& feature);
InjectionParams select(const SelectorModel& model, const Image& image);

}  // namespace ists
