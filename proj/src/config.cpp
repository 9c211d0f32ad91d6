#include "ists/config.hpp"

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include "ists/random.hpp"

namespace ists {

namespace {

[[noreturn]] void format_error(const std::string& msg) { throw Error(ErrorCode::Format, msg); }

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) format_error(where + " must be an object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : allowed) known = known || item.key() == key;
        if (!known) format_error("unknown key '" + item.key() + "' in " + where);
    }
}

template <typename T>
void read(const Json& j, const char* key, T& out, const std::string& where) {
    const auto it = j.find(key);
    if (it == j.end()) return;
    try {
        out = it->get<T>();
    } catch (const nlohmann::json::exception&) {
        format_error("'" + std::string(key) + "' in " + where + " has the wrong type");
    }
}

std::string boundary_name(OffsetBoundary b) { return b == OffsetBoundary::Wrap ? "wrap" : "strict"; }

OffsetBoundary boundary_from(const std::string& s) {
    if (s == "wrap") return OffsetBoundary::Wrap;
    if (s == "strict") return OffsetBoundary::Strict;
    throw_argument("unknown offset boundary '" + s + "'");
}

std::string modulus_name(Modulus m) { return m == Modulus::Componentwise ? "componentwise" : "complex"; }

Modulus modulus_from(const std::string& s) {
    if (s == "complex") return Modulus::Complex;
    if (s == "componentwise") return Modulus::Componentwise;
    throw_argument("unknown modulus '" + s + "'");
}

Json mapping_json(const MappingConfig& m) {
    return Json{{"clusters", m.clusters},   {"t_lo", m.t_lo},   {"t_hi", m.t_hi},
                {"lx_lo", m.lx_lo},         {"lx_hi", m.lx_hi}, {"ly_lo", m.ly_lo},
                {"ly_hi", m.ly_hi},         {"row_major_unfold", m.row_major_unfold}};
}

void read_mapping(const Json& j, MappingConfig& m, const std::string& where) {
    check_keys(j, {"clusters", "t_lo", "t_hi", "lx_lo", "lx_hi", "ly_lo", "ly_hi", "row_major_unfold"}, where);
    read(j, "clusters", m.clusters, where);
    read(j, "t_lo", m.t_lo, where);
    read(j, "t_hi", m.t_hi, where);
    read(j, "lx_lo", m.lx_lo, where);
    read(j, "lx_hi", m.lx_hi, where);
    read(j, "ly_lo", m.ly_lo, where);
    read(j, "ly_hi", m.ly_hi, where);
    read(j, "row_major_unfold", m.row_major_unfold, where);
}

SchemeConfig scheme_preset(const std::string& name) {
    if (name == "ists") return SchemeConfig::ists();
    if (name == "tree-ring") return SchemeConfig::tree_ring();
    if (name == "wo-dyn-pattern") return SchemeConfig::without_dynamic_pattern();
    if (name == "wo-dyn-injection") return SchemeConfig::without_dynamic_injection();
    if (name == "wo-two-sided") return SchemeConfig::without_two_sided();
    throw_argument("unknown scheme preset '" + name + "'");
}

std::string hex_from_entropy(std::random_device& rd, int bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (int i = 0; i < bytes; ++i) {
        const unsigned v = rd() & 0xffu;
        out += digits[v >> 4];
        out += digits[v & 0xfu];
    }
    return out;
}

}  // namespace

RunConfig RunConfig::paper() {
    RunConfig cfg;
    cfg.profile = "paper";
    cfg.backend.kind = BackendKind::ToyLinear;
    cfg.backend.height = cfg.backend.width = 64;
    cfg.pattern.boundary = OffsetBoundary::Wrap;
    return cfg;
}

RunConfig RunConfig::desk() {
    RunConfig cfg;
    cfg.profile = "desk";
    cfg.backend.kind = BackendKind::ToyLinear;
    cfg.backend.height = cfg.backend.width = 32;
    cfg.backend.linear_op_seed = 3;
    cfg.codec_seed = 11;
    cfg.mapping.clusters = 64;
    cfg.mapping.lx_lo = cfg.mapping.ly_lo = -6;
    cfg.mapping.lx_hi = cfg.mapping.ly_hi = 6;
    cfg.pattern.radius = 8;
    cfg.attack.step_rule = StepRule::Curvature;
    cfg.evaluation.n_pairs = 64;
    cfg.evaluation.train_images = 64;
    return cfg;
}

RunConfig RunConfig::profile_named(const std::string& name) {
    if (name == "paper") return paper();
    if (name == "desk") return desk();
    throw_argument("unknown profile '" + name + "' (expected paper or desk)");
}

void RunConfig::validate() const {
    require(backend.channels >= 1 && backend.height >= 8 && backend.width >= 8,
            "backend latent must have at least one channel and 8x8 planes");
    require(backend.height % 4 == 0 && backend.width % 4 == 0, "latent sides must be multiples of 4");
    require(final_alpha > 0.0 && final_alpha < 1.0, "final_alpha must lie in (0, 1)");
    require(backend.schedule.steps() >= 2, "schedule needs at least two steps");
    const int top = backend.schedule.steps();
    mapping.validate(top);
    require(pattern.channel >= 0 && pattern.channel < backend.channels, "pattern channel out of range");
    require(pattern.radius >= 1 && 2 * pattern.radius < std::min(backend.height, backend.width),
            "pattern radius must satisfy 1 <= 2*radius < latent side");
    require(scheme.static_timestep == -1 || (scheme.static_timestep >= 1 && scheme.static_timestep <= top),
            "static timestep must be -1 (meaning T) or lie in [1, T]");
    if (pattern.boundary == OffsetBoundary::Strict) {
        const int cy = backend.height / 2, cx = backend.width / 2;
        auto fits = [&](int lx, int ly) {
            return cy - pattern.radius - lx >= 0 && cy + pattern.radius - lx <= backend.height - 1 &&
                   cx - pattern.radius - ly >= 0 && cx + pattern.radius - ly <= backend.width - 1;
        };
        if (scheme.dynamic_pattern) {
            require(fits(mapping.lx_hi - 1, mapping.ly_hi - 1) && fits(mapping.lx_lo, mapping.ly_lo),
                    "offset range moves the pattern outside the latent plane; shrink the range or use "
                    "boundary \"wrap\"");
        } else {
            require(fits(scheme.static_offset.lx, scheme.static_offset.ly),
                    "static offset moves the pattern outside the latent plane");
        }
    }
    attack.validate();
    require(evaluation.n_pairs >= 2, "evaluation needs at least two pairs");
    require(evaluation.fpr > 0.0 && evaluation.fpr <= 1.0, "evaluation fpr must lie in (0, 1]");
    require(evaluation.workers >= 1, "worker count must be at least 1");
    require(evaluation.train_images >= mapping.clusters,
            "train_images (" + std::to_string(evaluation.train_images) + ") must be at least the cluster count (" +
                std::to_string(mapping.clusters) + ")");
}

Json to_json(const RunConfig& cfg) {
    Json scheme{{"name", scheme_name(cfg.scheme)},
                {"dynamic_pattern", cfg.scheme.dynamic_pattern},
                {"dynamic_injection", cfg.scheme.dynamic_injection},
                {"two_sided", cfg.scheme.two_sided},
                {"static_timestep", cfg.scheme.static_timestep},
                {"static_offset", {cfg.scheme.static_offset.lx, cfg.scheme.static_offset.ly}}};
    return Json{
        {"profile", cfg.profile},
        {"seed", cfg.seed},
        {"backend",
         {{"kind", to_string(cfg.backend.kind)},
          {"channels", cfg.backend.channels},
          {"height", cfg.backend.height},
          {"width", cfg.backend.width},
          {"steps", cfg.backend.schedule.steps()},
          {"final_alpha", cfg.final_alpha},
          {"linear_op_seed", cfg.backend.linear_op_seed}}},
        {"codec_seed", cfg.codec_seed},
        {"mapping", mapping_json(cfg.mapping)},
        {"classifier", to_string(cfg.classifier)},
        {"scheme", scheme},
        {"modulus", modulus_name(cfg.modulus)},
        {"pattern",
         {{"radius", cfg.pattern.radius},
          {"channel", cfg.pattern.channel},
          {"conjugate_symmetric", cfg.pattern.conjugate_symmetric},
          {"boundary", boundary_name(cfg.pattern.boundary)}}},
        {"attack",
         {{"steps", cfg.attack.steps},
          {"lr", cfg.attack.lr},
          {"lambda", cfg.attack.lambda},
          {"n_pairs", cfg.attack.n_pairs},
          {"step_rule", to_string(cfg.attack.step_rule)}}},
        {"evaluation",
         {{"n_pairs", cfg.evaluation.n_pairs},
          {"train_images", cfg.evaluation.train_images},
          {"fpr", cfg.evaluation.fpr},
          {"workers", cfg.evaluation.workers}}}};
}

RunConfig run_config_from_json(const Json& j) {
    check_keys(j, {"profile", "seed", "backend", "codec_seed", "mapping", "classifier", "scheme", "modulus", "pattern",
                   "attack", "evaluation"},
               "config");
    std::string profile = "paper";
    read(j, "profile", profile, "config");
    RunConfig cfg = RunConfig::profile_named(profile);
    read(j, "seed", cfg.seed, "config");
    read(j, "codec_seed", cfg.codec_seed, "config");

    if (const auto it = j.find("backend"); it != j.end()) {
        const Json& b = *it;
        check_keys(b, {"kind", "channels", "height", "width", "steps", "final_alpha", "linear_op_seed"}, "backend");
        std::string kind = to_string(cfg.backend.kind);
        int steps = cfg.backend.schedule.steps();
        read(b, "kind", kind, "backend");
        cfg.backend.kind = backend_kind_from_string(kind);
        read(b, "channels", cfg.backend.channels, "backend");
        read(b, "height", cfg.backend.height, "backend");
        read(b, "width", cfg.backend.width, "backend");
        read(b, "steps", steps, "backend");
        read(b, "final_alpha", cfg.final_alpha, "backend");
        read(b, "linear_op_seed", cfg.backend.linear_op_seed, "backend");
        require(steps >= 2, "backend steps must be at least 2");
        require(cfg.final_alpha > 0.0 && cfg.final_alpha < 1.0, "final_alpha must lie in (0, 1)");
        cfg.backend.schedule = NoiseSchedule::linear(steps, cfg.final_alpha);
    }
    if (const auto it = j.find("mapping"); it != j.end()) read_mapping(*it, cfg.mapping, "mapping");
    if (const auto it = j.find("classifier"); it != j.end()) {
        std::string mode;
        read(j, "classifier", mode, "config");
        cfg.classifier = classifier_mode_from_string(mode);
    }
    if (const auto it = j.find("scheme"); it != j.end()) {
        const Json& s = *it;
        check_keys(s, {"name", "dynamic_pattern", "dynamic_injection", "two_sided", "static_timestep", "static_offset"},
                   "scheme");
        if (s.contains("name")) {
            std::string name;
            read(s, "name", name, "scheme");
            if (name != "custom") cfg.scheme = scheme_preset(name);
        }
        read(s, "dynamic_pattern", cfg.scheme.dynamic_pattern, "scheme");
        read(s, "dynamic_injection", cfg.scheme.dynamic_injection, "scheme");
        read(s, "two_sided", cfg.scheme.two_sided, "scheme");
        read(s, "static_timestep", cfg.scheme.static_timestep, "scheme");
        if (s.contains("static_offset")) {
            std::vector<int> l;
            read(s, "static_offset", l, "scheme");
            if (l.size() != 2) format_error("scheme.static_offset must be [lx, ly]");
            cfg.scheme.static_offset = Offset{l[0], l[1]};
        }
    }
    if (j.contains("modulus")) {
        std::string m;
        read(j, "modulus", m, "config");
        cfg.modulus = modulus_from(m);
    }
    if (const auto it = j.find("pattern"); it != j.end()) {
        const Json& p = *it;
        check_keys(p, {"radius", "channel", "conjugate_symmetric", "boundary"}, "pattern");
        read(p, "radius", cfg.pattern.radius, "pattern");
        read(p, "channel", cfg.pattern.channel, "pattern");
        read(p, "conjugate_symmetric", cfg.pattern.conjugate_symmetric, "pattern");
        if (p.contains("boundary")) {
            std::string b;
            read(p, "boundary", b, "pattern");
            cfg.pattern.boundary = boundary_from(b);
        }
    }
    if (const auto it = j.find("attack"); it != j.end()) {
        const Json& a = *it;
        check_keys(a, {"steps", "lr", "lambda", "n_pairs", "step_rule"}, "attack");
        read(a, "steps", cfg.attack.steps, "attack");
        read(a, "lr", cfg.attack.lr, "attack");
        read(a, "lambda", cfg.attack.lambda, "attack");
        read(a, "n_pairs", cfg.attack.n_pairs, "attack");
        if (a.contains("step_rule")) {
            std::string r;
            read(a, "step_rule", r, "attack");
            cfg.attack.step_rule = step_rule_from_string(r);
        }
    }
    if (const auto it = j.find("evaluation"); it != j.end()) {
        const Json& e = *it;
        check_keys(e, {"n_pairs", "train_images", "fpr", "workers"}, "evaluation");
        read(e, "n_pairs", cfg.evaluation.n_pairs, "evaluation");
        read(e, "train_images", cfg.evaluation.train_images, "evaluation");
        read(e, "fpr", cfg.evaluation.fpr, "evaluation");
        read(e, "workers", cfg.evaluation.workers, "evaluation");
    }
    cfg.validate();
    return cfg;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        format_error("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error(ErrorCode::Io, "write to '" + path.string() + "' failed");
}

RunConfig load_run_config(const std::filesystem::path& path) {
    Json j = read_json_file(path);
    // A manifest can stand in for a config.
    if (j.is_object() && j.value("magic", "") == RunManifest::kMagic) j = j.at("resolved_config");
    return run_config_from_json(j);
}

void apply_env_overrides(RunConfig& cfg) {
    auto parse = [](const char* name, const char* text) {
        char* end = nullptr;
        errno = 0;
        const unsigned long long v = std::strtoull(text, &end, 10);
        if (errno != 0 || end == text || *end != '\0')
            throw_argument(std::string(name) + " must be a non-negative integer");
        return v;
    };
    if (const char* s = std::getenv("ISTS_SEED")) cfg.seed = parse("ISTS_SEED", s);
    if (const char* w = std::getenv("ISTS_WORKERS")) {
        const auto v = parse("ISTS_WORKERS", w);
        require(v >= 1 && v <= 1024, "ISTS_WORKERS must lie in [1, 1024]");
        cfg.evaluation.workers = static_cast<int>(v);
    }
}

std::string KeyFile::fingerprint() const {
    return sha256_hex("ists-keyfile|" + std::to_string(pattern_seed) + "|" + permutation_key + "|" +
                      mapping_json(mapping).dump())
        .substr(0, 16);
}

KeyFile KeyFile::generate(const MappingConfig& mapping) {
    std::random_device rd;
    KeyFile key;
    key.pattern_seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    key.permutation_key = hex_from_entropy(rd, 32);
    key.mapping = mapping;
    key.created_utc = utc_timestamp();
    return key;
}

KeyFile KeyFile::from_seed(std::uint64_t seed, const MappingConfig& mapping) {
    KeyFile key;
    key.pattern_seed = derive_seed(seed, "key:pattern");
    key.permutation_key = sha256_hex("ists-seeded-key:" + std::to_string(seed)).substr(0, 64);
    key.mapping = mapping;
    key.created_utc = utc_timestamp();
    return key;
}

void save_key_file(const std::filesystem::path& path, const KeyFile& key) {
    const Json j{{"magic", KeyFile::kMagic},
                 {"version", KeyFile::kVersion},
                 {"created_utc", key.created_utc},
                 {"fingerprint", key.fingerprint()},
                 {"pattern_seed", key.pattern_seed},
                 {"permutation_key", key.permutation_key},
                 {"mapping", mapping_json(key.mapping)}};
    write_text_file(path, j.dump(2) + "\n");
    std::filesystem::permissions(path, std::filesystem::perms::owner_read | std::filesystem::perms::owner_write,
                                 std::filesystem::perm_options::replace);
}

KeyFile load_key_file(const std::filesystem::path& path) {
    const Json j = read_json_file(path);
    if (!j.is_object() || j.value("magic", "") != KeyFile::kMagic) format_error("'" + path.string() + "' is not a key file");
    if (j.value("version", 0) != KeyFile::kVersion) format_error("unsupported key file version");
    check_keys(j, {"magic", "version", "created_utc", "fingerprint", "pattern_seed", "permutation_key", "mapping"},
               "key file");
    KeyFile key;
    read(j, "created_utc", key.created_utc, "key file");
    read(j, "pattern_seed", key.pattern_seed, "key file");
    read(j, "permutation_key", key.permutation_key, "key file");
    if (key.permutation_key.empty()) format_error("key file has an empty permutation key");
    if (j.contains("mapping")) read_mapping(j.at("mapping"), key.mapping, "key file mapping");
    std::string recorded;
    read(j, "fingerprint", recorded, "key file");
    if (recorded != key.fingerprint()) format_error("key file fingerprint does not match its contents");
    return key;
}

WatermarkKey make_watermark_key(const KeyFile& key, const PatternConfig& pattern) {
    WatermarkKey wk;
    wk.pattern_seed = key.pattern_seed;
    wk.radius = pattern.radius;
    wk.channel = pattern.channel;
    wk.permutation_key = key.permutation_key;
    wk.conjugate_symmetric = pattern.conjugate_symmetric;
    wk.boundary = pattern.boundary;
    return wk;
}

namespace {

Json matrix_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json vector_json(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::MatrixXd matrix_from(const Json& j, const std::string& what) {
    if (!j.is_array()) format_error(what + " must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) format_error(what + " is ragged");
        for (Eigen::Index c = 0; c < cols; ++c) {
            if (!row[static_cast<std::size_t>(c)].is_number()) format_error(what + " holds a non-number");
            m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
        }
    }
    return m;
}

Eigen::VectorXd vector_from(const Json& j, const std::string& what) {
    if (!j.is_array()) format_error(what + " must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) format_error(what + " holds a non-number");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

constexpr const char* kSelectorMagic = "ISTS-SELECTOR";
constexpr int kSelectorVersion = 1;

}  // namespace

Json selector_to_json(const SelectorModel& model) {
    Json j{{"magic", kSelectorMagic},
           {"version", kSelectorVersion},
           {"key_fingerprint", model.key_fingerprint},
           {"mapping", mapping_json(model.mapping)},
           {"mode", to_string(model.mode)},
           {"centroids", matrix_json(model.centroids)},
           {"training_labels", model.training_labels}};
    if (model.mode == ClassifierMode::Network) {
        const auto& n = model.network;
        j["network"] = Json{{"w1", matrix_json(n.w1)},
                            {"b1", vector_json(n.b1)},
                            {"gamma", vector_json(n.gamma)},
                            {"beta", vector_json(n.beta)},
                            {"running_mean", vector_json(n.running_mean)},
                            {"running_var", vector_json(n.running_var)},
                            {"w2", matrix_json(n.w2)},
                            {"b2", vector_json(n.b2)}};
    }
    return j;
}

void save_selector(const std::filesystem::path& path, const SelectorModel& model) {
    write_text_file(path, selector_to_json(model).dump() + "\n");
}

SelectorModel load_selector(const std::filesystem::path& path, const KeyFile& key) {
    const Json j = read_json_file(path);
    if (!j.is_object() || j.value("magic", "") != kSelectorMagic)
        format_error("'" + path.string() + "' is not a selector file");
    if (j.value("version", 0) != kSelectorVersion) format_error("unsupported selector file version");
    check_keys(j, {"magic", "version", "key_fingerprint", "mapping", "mode", "centroids", "training_labels", "network"},
               "selector file");
    SelectorModel model;
    std::string fingerprint, mode;
    read(j, "key_fingerprint", fingerprint, "selector file");
    if (fingerprint != key_fingerprint(key.permutation_key))
        throw_argument("selector was trained with a different permutation key");
    if (!j.contains("mapping") || !j.contains("centroids")) format_error("selector file is incomplete");
    read_mapping(j.at("mapping"), model.mapping, "selector mapping");
    read(j, "mode", mode, "selector file");
    model.mode = classifier_mode_from_string(mode);
    model.centroids = matrix_from(j.at("centroids"), "centroids");
    if (model.centroids.rows() != model.mapping.clusters) format_error("centroid count does not match the mapping");
    read(j, "training_labels", model.training_labels, "selector file");
    if (model.mode == ClassifierMode::Network) {
        if (!j.contains("network")) format_error("network selector file has no network weights");
        const Json& n = j.at("network");
        model.network.w1 = matrix_from(n.at("w1"), "w1");
        model.network.b1 = vector_from(n.at("b1"), "b1");
        model.network.gamma = vector_from(n.at("gamma"), "gamma");
        model.network.beta = vector_from(n.at("beta"), "beta");
        model.network.running_mean = vector_from(n.at("running_mean"), "running_mean");
        model.network.running_var = vector_from(n.at("running_var"), "running_var");
        model.network.w2 = matrix_from(n.at("w2"), "w2");
        model.network.b2 = vector_from(n.at("b2"), "b2");
    }
    model.install_key(key.permutation_key);
    return model;
}

void save_manifest(const std::filesystem::path& path, const RunManifest& m) {
    Json j{{"magic", RunManifest::kMagic},
           {"version", RunManifest::kVersion},
           {"run_id", m.run_id},
           {"tool_version", m.tool_version},
           {"command", m.command},
           {"arguments", m.arguments},
           {"key_fingerprint", m.key_fingerprint},
           {"resolved_config", m.resolved_config},
           {"seeds", m.seeds},
           {"inputs", m.inputs},
           {"outputs", m.outputs},
           {"records", m.records},
           {"started_utc", m.started_utc},
           {"seconds", m.seconds}};
    write_text_file(path, j.dump(2) + "\n");
}

RunManifest load_manifest(const std::filesystem::path& path) {
    const Json j = read_json_file(path);
    if (!j.is_object() || j.value("magic", "") != RunManifest::kMagic)
        format_error("'" + path.string() + "' is not a run manifest");
    if (j.value("version", 0) != RunManifest::kVersion) format_error("unsupported manifest version");
    RunManifest m;
    read(j, "run_id", m.run_id, "manifest");
    read(j, "tool_version", m.tool_version, "manifest");
    read(j, "command", m.command, "manifest");
    read(j, "arguments", m.arguments, "manifest");
    read(j, "key_fingerprint", m.key_fingerprint, "manifest");
    read(j, "seeds", m.seeds, "manifest");
    read(j, "inputs", m.inputs, "manifest");
    read(j, "outputs", m.outputs, "manifest");
    read(j, "started_utc", m.started_utc, "manifest");
    read(j, "seconds", m.seconds, "manifest");
    if (j.contains("resolved_config")) m.resolved_config = j.at("resolved_config");
    if (j.contains("records")) m.records = j.at("records");
    return m;
}

std::string make_run_id(const std::string& command, const Json& resolved_config) {
    return command + "-" + sha256_hex(command + "|" + resolved_config.dump()).substr(0, 12);
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace ists
