#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ists/config.hpp"
#include "ists/evaluation.hpp"

namespace ists {

std::shared_ptr<const DiffusionBackend> make_backend(const RunConfig& cfg);
std::shared_ptr<const ImageCodec> make_codec(const RunConfig& cfg, const DiffusionBackend& backend);

/// Plain images for selector training, prompts "train-<i>".
std::vector<Image> generate_training_images(const RunConfig& cfg, const std::shared_ptr<const DiffusionBackend>& backend,
                                            const std::shared_ptr<const ImageCodec>& codec, int n);

SelectorModel train_selector_on(const RunConfig& cfg, const KeyFile& key, const std::vector<Image>& images);

/// Backend, codec and (unless the scheme is static) a selector trained on
/// cfg.evaluation.train_images generated plain images.
Lab make_lab(const RunConfig& cfg, const KeyFile& key, std::shared_ptr<const SelectorModel> selector = nullptr);

EvalOptions eval_options(const RunConfig& cfg, const std::string& run_id);

/// Cluster sizes of the training labels.
std::vector<int> cluster_histogram(const SelectorModel& model);

}  // namespace ists
