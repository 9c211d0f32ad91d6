#include "ists/session.hpp"

#include "ists/parallel.hpp"
#include "ists/random.hpp"

namespace ists {

std::shared_ptr<const DiffusionBackend> make_backend(const RunConfig& cfg) {
    cfg.validate();
    return ists::make_backend(cfg.backend);
}

std::shared_ptr<const ImageCodec> make_codec(const RunConfig& cfg, const DiffusionBackend& backend) {
    return std::make_shared<ToyCodec>(ToyCodec::for_backend(backend, cfg.codec_seed));
}

std::vector<Image> generate_training_images(const RunConfig& cfg, const std::shared_ptr<const DiffusionBackend>& backend,
                                            const std::shared_ptr<const ImageCodec>& codec, int n) {
    require(n >= 1, "need at least one training image");
    WatermarkKey unused;
    unused.radius = cfg.pattern.radius;
    unused.channel = cfg.pattern.channel;
    const Watermarker plain(backend, codec, unused, nullptr, SchemeConfig::tree_ring(), cfg.modulus);
    std::vector<Image> images(static_cast<std::size_t>(n));
    parallel_for(images.size(), cfg.evaluation.workers, [&](std::size_t i) {
        images[i] = plain.generate_plain(PromptContext::make("train-" + std::to_string(i), cfg.seed));
    });
    return images;
}

SelectorModel train_selector_on(const RunConfig& cfg, const KeyFile& key, const std::vector<Image>& images) {
    std::vector<FeatureVector> features;
    features.reserve(images.size());
    for (const Image& image : images) features.push_back(encode_features(image));
    SelectorTraining options;
    options.mode = cfg.classifier;
    options.kmeans.seed = derive_seed(cfg.seed, "kmeans");
    options.network.seed = derive_seed(cfg.seed, "selector-network");
    return train_selector(features, cfg.mapping, key.permutation_key, options);
}

Lab make_lab(const RunConfig& cfg, const KeyFile& key, std::shared_ptr<const SelectorModel> selector) {
    Lab lab;
    lab.backend = make_backend(cfg);
    lab.codec = make_codec(cfg, *lab.backend);
    lab.key = make_watermark_key(key, cfg.pattern);
    lab.modulus = cfg.modulus;
    if (!selector) {
        const auto images = generate_training_images(cfg, lab.backend, lab.codec, cfg.evaluation.train_images);
        selector = std::make_shared<SelectorModel>(train_selector_on(cfg, key, images));
    }
    lab.selector = std::move(selector);
    return lab;
}

EvalOptions eval_options(const RunConfig& cfg, const std::string& run_id) {
    EvalOptions options;
    options.n_pairs = cfg.evaluation.n_pairs;
    options.seed = cfg.seed;
    options.fpr = cfg.evaluation.fpr;
    options.attack = cfg.attack;
    options.workers = cfg.evaluation.workers;
    options.run_id = run_id;
    return options;
}

std::vector<int> cluster_histogram(const SelectorModel& model) {
    std::vector<int> sizes(static_cast<std::size_t>(model.clusters()), 0);
    for (int label : model.training_labels) ++sizes[static_cast<std::size_t>(label)];
    return sizes;
}

}  // namespace ists
