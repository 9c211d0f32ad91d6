#include "ists/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ists/random.hpp"

namespace ists {

namespace {

int floor_mod(int a, int n) { return ((a % n) + n) % n; }
int floor_div(int a, int n) { return (a - floor_mod(a, n)) / n; }

constexpr int kGrid = 8;
constexpr double kBatchNormEps = 1e-5;

}  // namespace

void MappingConfig::validate(int total_steps) const {
    require(clusters >= 1, "cluster count must be at least 1");
    require(t_lo < t_hi, "timestep range needs T1 < T2");
    require(t_lo >= 1 && t_hi <= total_steps, "timestep range must lie within [1, T]");
    require(lx_lo < lx_hi && ly_lo < ly_hi, "offset ranges need lower < upper");
}

InjectionParams map_params(int label, const MappingConfig& cfg) {
    require(label >= 0 && label < cfg.clusters, "label outside [0, C)");
    const int t_width = cfg.t_hi - cfg.t_lo;
    const int x_width = cfg.lx_hi - cfg.lx_lo;
    const int y_width = cfg.ly_hi - cfg.ly_lo;
    const int unfold = cfg.row_major_unfold ? x_width : y_width;
    InjectionParams p;
    p.t = cfg.t_lo + floor_mod(label, t_width);
    p.l.lx = cfg.lx_lo + floor_mod(label, x_width);
    p.l.ly = cfg.ly_lo + floor_mod(floor_div(label, unfold), y_width);
    return p;
}

FeatureVector encode_features(const Image& image) {
    require(image.height() % kGrid == 0 && image.width() % kGrid == 0,
            "image sides must be multiples of 8 for the block-mean encoder");
    const int bh = image.height() / kGrid, bw = image.width() / kGrid;
    FeatureVector f(image.channels() * kGrid * kGrid);
    int k = 0;
    for (int c = 0; c < image.channels(); ++c)
        for (int gy = 0; gy < kGrid; ++gy)
            for (int gx = 0; gx < kGrid; ++gx) {
                double acc = 0.0;
                for (int y = gy * bh; y < (gy + 1) * bh; ++y)
                    for (int x = gx * bw; x < (gx + 1) * bw; ++x) acc += image(c, y, x);
                f[k++] = acc / (bh * bw);
            }
    const double n = f.norm();
    if (n > 0.0) f /= n;
    return f;
}

std::string to_string(ClassifierMode mode) {
    return mode == ClassifierMode::Network ? "network" : "nearest-centroid";
}

ClassifierMode classifier_mode_from_string(const std::string& name) {
    if (name == "network") return ClassifierMode::Network;
    if (name == "nearest-centroid") return ClassifierMode::NearestCentroid;
    throw_argument("unknown classifier mode '" + name + "'");
}

// --- K-Means ---------------------------------------------------------------

namespace {

int nearest(const Eigen::MatrixXd& centroids, const FeatureVector& x, double* distance = nullptr) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < centroids.rows(); ++c) {
        const double d = (centroids.row(c).transpose() - x).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (distance) *distance = best_d;
    return best;
}

Eigen::MatrixXd kmeanspp_init(const std::vector<FeatureVector>& pts, int k, Rng& rng) {
    const int n = static_cast<int>(pts.size());
    const int d = static_cast<int>(pts[0].size());
    Eigen::MatrixXd centroids(k, d);
    centroids.row(0) = pts[rng.below(n)].transpose();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            dist[i] = std::min(dist[i], (pts[i] - centroids.row(c - 1).transpose()).squaredNorm());
            total += dist[i];
        }
        int pick = n - 1;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            for (int i = 0; i < n; ++i) {
                target -= dist[i];
                if (target < 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<int>(rng.below(n));
        }
        centroids.row(c) = pts[pick].transpose();
    }
    return centroids;
}

}  // namespace

KMeansResult kmeans(const std::vector<FeatureVector>& points, int k, const KMeansOptions& options) {
    require(k >= 1, "k must be at least 1");
    require(static_cast<int>(points.size()) >= k, "fewer samples than clusters");
    const int n = static_cast<int>(points.size());
    const int d = static_cast<int>(points[0].size());
    for (const auto& p : points) require(p.size() == d, "feature dimensions differ");

    Rng rng(derive_seed(options.seed, "kmeans++"));
    KMeansResult result;
    result.centroids = kmeanspp_init(points, k, rng);
    result.labels.assign(n, 0);

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        double objective = 0.0;
        for (int i = 0; i < n; ++i) {
            double dist = 0.0;
            result.labels[i] = nearest(result.centroids, points[i], &dist);
            objective += dist;
        }
        if (!result.objective_trace.empty() &&
            objective > result.objective_trace.back() * (1.0 + 1e-12) + 1e-15)
            throw std::logic_error("k-means objective increased between Lloyd iterations");
        result.objective_trace.push_back(objective);

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
        std::vector<int> counts(k, 0);
        for (int i = 0; i < n; ++i) {
            sums.row(result.labels[i]) += points[i].transpose();
            ++counts[result.labels[i]];
        }
        Eigen::MatrixXd updated = result.centroids;
        for (int c = 0; c < k; ++c)
            if (counts[c] > 0) updated.row(c) = sums.row(c) / counts[c];
        const double shift = (updated - result.centroids).norm();
        const double scale = result.centroids.norm();
        result.centroids = std::move(updated);
        result.iterations = iter + 1;
        if (shift <= options.tolerance * std::max(scale, 1e-300)) break;
    }
    // Final assignment against the converged centroids.
    for (int i = 0; i < n; ++i) result.labels[i] = nearest(result.centroids, points[i]);
    return result;
}

// --- classifier network ----------------------------------------------------

namespace {

int argmax_lowest(const Eigen::VectorXd& v) {
    int best = 0;
    for (int i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

Eigen::MatrixXd relu(const Eigen::MatrixXd& a) { return a.cwiseMax(0.0); }

}  // namespace

Eigen::VectorXd SelectorNetwork::logits(const FeatureVector& x) const {
    Eigen::VectorXd h = relu(w1 * x + b1);
    Eigen::VectorXd normed = (h - running_mean).cwiseQuotient((running_var.array() + kBatchNormEps).sqrt().matrix());
    Eigen::VectorXd y = gamma.cwiseProduct(normed) + beta;
    return w2 * y + b2;
}

SelectorNetwork train_network(const std::vector<FeatureVector>& features, const std::vector<int>& labels,
                              int classes, const NetworkTraining& options) {
    require(!features.empty() && features.size() == labels.size(), "network training needs labelled features");
    require(options.dropout >= 0.0 && options.dropout < 1.0, "dropout must lie in [0, 1)");
    const int n = static_cast<int>(features.size());
    const int d = static_cast<int>(features[0].size());

    Eigen::MatrixXd x(d, n);
    for (int i = 0; i < n; ++i) x.col(i) = features[i];
    Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(classes, n);
    for (int i = 0; i < n; ++i) {
        require(labels[i] >= 0 && labels[i] < classes, "training label out of range");
        onehot(labels[i], i) = 1.0;
    }

    Rng rng(derive_seed(options.seed, "selector-network"));
    SelectorNetwork net;
    net.w1 = Eigen::MatrixXd(d, d);
    for (double& v : net.w1.reshaped()) v = rng.normal() * std::sqrt(2.0 / d);
    net.b1 = Eigen::VectorXd::Zero(d);
    net.gamma = Eigen::VectorXd::Ones(d);
    net.beta = Eigen::VectorXd::Zero(d);
    net.w2 = Eigen::MatrixXd(classes, d);
    for (double& v : net.w2.reshaped()) v = rng.normal() * std::sqrt(1.0 / d);
    net.b2 = Eigen::VectorXd::Zero(classes);

    const double keep = 1.0 - options.dropout;
    auto batch_stats = [&](const Eigen::MatrixXd& h, Eigen::VectorXd& mean, Eigen::VectorXd& var) {
        mean = h.rowwise().mean();
        var = (h.colwise() - mean).array().square().rowwise().mean();
    };

    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        Eigen::MatrixXd a1 = (net.w1 * x).colwise() + net.b1;
        Eigen::MatrixXd h = relu(a1);
        Eigen::VectorXd mean, var;
        batch_stats(h, mean, var);
        Eigen::VectorXd inv_std = (var.array() + kBatchNormEps).rsqrt();
        Eigen::MatrixXd hat = (h.colwise() - mean).array().colwise() * inv_std.array();
        Eigen::MatrixXd y = (hat.array().colwise() * net.gamma.array()).colwise() + net.beta.array();
        Eigen::MatrixXd mask(d, n);
        for (double& v : mask.reshaped()) v = (rng.uniform() < keep) ? 1.0 / keep : 0.0;
        Eigen::MatrixXd dropped = y.cwiseProduct(mask);
        Eigen::MatrixXd z = (net.w2 * dropped).colwise() + net.b2;

        Eigen::MatrixXd p = (z.rowwise() - z.colwise().maxCoeff()).array().exp();
        p = p.array().rowwise() / p.colwise().sum().array();

        Eigen::MatrixXd dz = (p - onehot) / n;
        Eigen::MatrixXd dw2 = dz * dropped.transpose();
        Eigen::VectorXd db2 = dz.rowwise().sum();
        Eigen::MatrixXd dy = (net.w2.transpose() * dz).cwiseProduct(mask);
        Eigen::VectorXd dgamma = dy.cwiseProduct(hat).rowwise().sum();
        Eigen::VectorXd dbeta = dy.rowwise().sum();
        Eigen::MatrixXd dhat = dy.array().colwise() * net.gamma.array();
        Eigen::VectorXd sum_dhat = dhat.rowwise().sum();
        Eigen::VectorXd sum_dhat_hat = dhat.cwiseProduct(hat).rowwise().sum();
        Eigen::MatrixXd dh = ((dhat * n).colwise() - sum_dhat - (hat.array().colwise() * sum_dhat_hat.array()).matrix());
        dh = (dh.array().colwise() * (inv_std.array() / n)).matrix();
        Eigen::MatrixXd da1 = dh.cwiseProduct((a1.array() > 0.0).cast<double>().matrix());
        Eigen::MatrixXd dw1 = da1 * x.transpose();
        Eigen::VectorXd db1 = da1.rowwise().sum();

        const double lr = options.learning_rate;
        net.w1 -= lr * dw1;
        net.b1 -= lr * db1;
        net.gamma -= lr * dgamma;
        net.beta -= lr * dbeta;
        net.w2 -= lr * dw2;
        net.b2 -= lr * db2;
    }

    Eigen::MatrixXd h = relu((net.w1 * x).colwise() + net.b1);
    batch_stats(h, net.running_mean, net.running_var);
    return net;
}

// --- key permutation ---------------------------------------------------------

std::vector<int> key_permutation(const std::string& key, int n) {
    require(n >= 1, "permutation size must be positive");
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(derive_seed(0, "label-permutation:" + key));
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    return perm;
}

std::string key_fingerprint(const std::string& key) { return sha256_hex("ists-key:" + key).substr(0, 16); }

void SelectorModel::install_key(const std::string& key) {
    permutation = key_permutation(key, clusters());
    key_fingerprint = ists::key_fingerprint(key);
}

SelectorModel train_selector(const std::vector<FeatureVector>& features, const MappingConfig& cfg,
                             const std::string& key, const SelectorTraining& options) {
    require(static_cast<int>(features.size()) >= cfg.clusters,
            "fewer training samples (" + std::to_string(features.size()) + ") than clusters (" +
                std::to_string(cfg.clusters) + ")");
    SelectorModel model;
    model.mapping = cfg;
    model.mode = options.mode;
    KMeansResult clusters = kmeans(features, cfg.clusters, options.kmeans);
    model.centroids = std::move(clusters.centroids);
    model.training_labels = std::move(clusters.labels);
    if (options.mode == ClassifierMode::Network)
        model.network = train_network(features, model.training_labels, cfg.clusters, options.network);
    model.install_key(key);
    return model;
}

int raw_label(const SelectorModel& model, const FeatureVector& feature) {
    require(model.centroids.rows() == model.clusters(), "selector model is not trained");
    if (model.mode == ClassifierMode::Network) return argmax_lowest(model.network.logits(feature));
    return nearest(model.centroids, feature);
}

int assign_label(const SelectorModel& model, const FeatureVector& feature) {
    require(static_cast<int>(model.permutation.size()) == model.clusters(), "selector key is not installed");
    return model.permutation[raw_label(model, feature)];
}

InjectionParams select(const SelectorModel& model, const Image& image) {
    return map_params(assign_label(model, encode_features(image)), model.mapping);
}

}  // namespace ists
