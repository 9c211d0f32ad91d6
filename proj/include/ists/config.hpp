#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ists/attacks.hpp"
#include "ists/diffusion.hpp"
#include "ists/pipeline.hpp"
#include "ists/selector.hpp"

namespace ists {

using Json = nlohmann::ordered_json;

/// Public pattern geometry. The pattern seed lives in the key file.
struct PatternConfig {
    int radius = 20;
    int channel = 0;
    bool conjugate_symmetric = false;
    OffsetBoundary boundary = OffsetBoundary::Strict;
};

struct EvaluationConfig {
    int n_pairs = 100;
    int train_images = 1024;
    double fpr = 0.01;
    int workers = 1;
};

struct RunConfig {
    std::string profile = "paper";
    std::uint64_t seed = 0;
    BackendConfig backend;
    double final_alpha = 0.01;
    std::uint64_t codec_seed = 0;
    MappingConfig mapping;
    ClassifierMode classifier = ClassifierMode::NearestCentroid;
    SchemeConfig scheme;
    Modulus modulus = Modulus::Complex;
    PatternConfig pattern;
    AttackConfig attack;
    EvaluationConfig evaluation;

    /// Full-scale defaults on a 64x64 latent: C=1024, t in [10,20), offsets
    /// [-12,12)^2, radius 20 (wrapping), 150 steps at lr 0.01, lambda 5e4, N=100.
    static RunConfig paper();
    /// Desk-scale profile used by the acceptance suite: toy-linear 4x32x32,
    /// radius 8, offsets [-6,6)^2, C=64, 64 pairs, curvature-relative steps.
    static RunConfig desk();
    static RunConfig profile_named(const std::string& name);

    void validate() const;
};

Json to_json(const RunConfig& cfg);
/// Starts from the named profile (key "profile", default "paper") and
/// overlays the given fields. Unknown keys are a format-error.
RunConfig run_config_from_json(const Json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// ISTS_SEED and ISTS_WORKERS override the seed and worker count.
void apply_env_overrides(RunConfig& cfg);

/// Secret material. Never logged; only the fingerprint is.
struct KeyFile {
    static constexpr const char* kMagic = "ISTS-KEY";
    static constexpr int kVersion = 1;

    std::uint64_t pattern_seed = 0;
    std::string permutation_key;
    MappingConfig mapping;
    std::string created_utc;

    /// Hash of the secret fields and mapping; independent of timestamp and layout.
    std::string fingerprint() const;
    /// New key from the system entropy source.
    static KeyFile generate(const MappingConfig& mapping);
    /// Reproducible key derived from a seed (for tests and demos).
    static KeyFile from_seed(std::uint64_t seed, const MappingConfig& mapping);
};

void save_key_file(const std::filesystem::path& path, const KeyFile& key);
KeyFile load_key_file(const std::filesystem::path& path);

WatermarkKey make_watermark_key(const KeyFile& key, const PatternConfig& pattern);

/// Selector without its key: the permutation is re-derived at load time.
void save_selector(const std::filesystem::path& path, const SelectorModel& model);
Json selector_to_json(const SelectorModel& model);
/// Loads and installs the key's permutation; the fingerprints must match.
SelectorModel load_selector(const std::filesystem::path& path, const KeyFile& key);

struct RunManifest {
    static constexpr const char* kMagic = "ISTS-MANIFEST";
    static constexpr int kVersion = 1;

    std::string run_id;
    std::string command;
    std::vector<std::string> arguments;
    Json resolved_config;
    std::string key_fingerprint;
    std::map<std::string, std::string> inputs;
    std::map<std::string, std::string> outputs;
    std::map<std::string, std::uint64_t> seeds;
    Json records = Json::array();
    std::string started_utc;
    double seconds = 0.0;
    std::string tool_version;
};

void save_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest load_manifest(const std::filesystem::path& path);

/// Short stable id for a command and its resolved config.
std::string make_run_id(const std::string& command, const Json& resolved_config);

std::string utc_timestamp();
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace ists
