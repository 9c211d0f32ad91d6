#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ists::cli {

namespace fs = std::filesystem;

/// Options shared by every command that needs a resolved RunConfig.
struct Common {
    std::string config;           // JSON config or manifest; empty means the profile defaults
    std::string profile = "desk";
    std::vector<std::string> arguments;  // recorded verbatim in manifests
};

struct KeygenArgs {
    Common common;
    fs::path out;
    std::optional<std::uint64_t> seed;
};

struct TrainSelectorArgs {
    Common common;
    fs::path key;
    fs::path out;
    std::string corpus;
    std::optional<int> n;
};

struct GenerateArgs {
    Common common;
    fs::path key;
    std::string selector;
    fs::path out;
    std::string prompts;
    std::optional<int> n;
    bool watermark = false;
};

struct DetectArgs {
    Common common;
    fs::path key;
    std::string selector;
    std::vector<std::string> images;
    std::optional<double> tau;
    std::string calibrate_dir;
    std::optional<double> fpr;
    std::string out;
};

struct AttackArgs {
    Common common;
    std::string kind;
    std::vector<std::string> inputs;
    fs::path out;
    std::string reference;
    std::string pairs_watermarked;
    std::string pairs_clean;
};

struct DistortArgs {
    Common common;
    std::string kind;
    std::optional<double> magnitude;
    std::string crop_measure = "area";
    std::vector<std::string> inputs;
    fs::path out;
};

struct EvaluateArgs {
    Common common;
    std::string key;
    std::optional<std::uint64_t> key_seed;
    std::string selector;
    fs::path out;
    bool matrix = false;
    bool sweep = false;
    bool ablation = false;
    std::vector<std::string> schemes;
};

struct ReportArgs {
    fs::path in;
};

int cmd_keygen(const KeygenArgs& args);
int cmd_train_selector(const TrainSelectorArgs& args);
int cmd_generate(const GenerateArgs& args);
int cmd_detect(const DetectArgs& args);
int cmd_attack(const AttackArgs& args);
int cmd_distort(const DistortArgs& args);
int cmd_evaluate(const EvaluateArgs& args);
int cmd_report(const ReportArgs& args);

}  // namespace ists::cli
