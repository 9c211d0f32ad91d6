#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "ists/imageio.hpp"
#include "ists/parallel.hpp"
#include "ists/random.hpp"
#include "ists/session.hpp"
#include "plot.hpp"

namespace ists::cli {

namespace {

using Clock = std::chrono::steady_clock;

RunConfig resolve_config(const Common& common) {
    RunConfig cfg = common.config.empty() ? RunConfig::profile_named(common.profile) : load_run_config(common.config);
    apply_env_overrides(cfg);
    cfg.validate();
    return cfg;
}

std::vector<fs::path> png_files(const std::vector<std::string>& specs) {
    std::vector<fs::path> files;
    for (const std::string& spec : specs) {
        const fs::path p(spec);
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto& entry : fs::directory_iterator(p))
                if (entry.is_regular_file() && entry.path().extension() == ".png") found.push_back(entry.path());
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else if (fs::exists(p)) {
            files.push_back(p);
        } else {
            throw Error(ErrorCode::Io, "no such file or directory '" + spec + "'");
        }
    }
    return files;
}

std::vector<Image> read_all(const std::vector<fs::path>& files, int workers) {
    std::vector<Image> images(files.size());
    parallel_for(files.size(), workers, [&](std::size_t i) { images[i] = read_png(files[i]); });
    return images;
}

KeyFile load_key_for(const fs::path& path, const RunConfig& cfg) {
    KeyFile key = load_key_file(path);
    if (!(key.mapping == cfg.mapping))
        throw_argument("key file was generated for a different mapping config than this run");
    return key;
}

std::shared_ptr<const SelectorModel> selector_for(const std::string& path, const KeyFile& key, const RunConfig& cfg) {
    if (!cfg.scheme.needs_selector()) return nullptr;
    if (path.empty()) throw_argument("scheme '" + scheme_name(cfg.scheme) + "' needs --selector");
    auto model = std::make_shared<SelectorModel>(load_selector(path, key));
    if (!(model->mapping == cfg.mapping)) throw_argument("selector mapping differs from the run config");
    return model;
}

RunManifest start_manifest(const std::string& command, const RunConfig& cfg, const Common& common) {
    RunManifest m;
    m.command = command;
    m.arguments = common.arguments;
    m.resolved_config = to_json(cfg);
    m.run_id = make_run_id(command, m.resolved_config);
    m.started_utc = utc_timestamp();
    m.tool_version = kToolVersion;
    m.seeds["run"] = cfg.seed;
    m.seeds["codec"] = cfg.codec_seed;
    m.seeds["linear_operator"] = cfg.backend.linear_op_seed;
    return m;
}

void finish_manifest(RunManifest& m, const fs::path& path, Clock::time_point started) {
    m.seconds = std::chrono::duration<double>(Clock::now() - started).count();
    save_manifest(path, m);
}

std::string csv_number(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    if (rows.empty()) throw Error(ErrorCode::Format, "'" + path.string() + "' has no header");
    return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name, const fs::path& path) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorCode::Format, "'" + path.string() + "' has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

double to_double(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw Error(ErrorCode::Format, "not a number: '" + s + "'");
    }
}

std::string padded(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "img-%04d", i);
    return buf;
}

void write_stream_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ostringstream out;
    body(out);
    write_text_file(path, out.str());
}

/// Tables 1/2 layout printed from cells.csv, plots rendered next to it.
void render_report(const fs::path& dir, std::ostream& log) {
    bool any = false;
    const fs::path cells_path = dir / "cells.csv";
    if (fs::exists(cells_path)) {
        any = true;
        const auto rows = read_csv(cells_path);
        const auto& h = rows[0];
        const auto c_scheme = column(h, "scheme", cells_path), c_attack = column(h, "attack", cells_path),
                   c_dist = column(h, "distortion", cells_path), c_auc = column(h, "auc", cells_path),
                   c_tpr = column(h, "tpr_at_1fpr", cells_path);
        std::vector<std::string> schemes, conditions;
        std::map<std::pair<std::string, std::string>, std::pair<double, double>> value;
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            if (row.size() < h.size()) throw Error(ErrorCode::Format, "short row in '" + cells_path.string() + "'");
            const std::string cond = row[c_dist] == "none" ? row[c_attack] : row[c_dist];
            if (std::find(schemes.begin(), schemes.end(), row[c_scheme]) == schemes.end()) schemes.push_back(row[c_scheme]);
            if (std::find(conditions.begin(), conditions.end(), cond) == conditions.end()) conditions.push_back(cond);
            value[{row[c_scheme], cond}] = {to_double(row[c_auc]), to_double(row[c_tpr])};
        }
        log << "AUC / TPR@1%FPR\n" << "scheme";
        for (const auto& c : conditions) log << " | " << (c == "none" ? "original" : c);
        log << '\n';
        for (const auto& s : schemes) {
            log << s;
            for (const auto& c : conditions) {
                const auto it = value.find({s, c});
                char buf[48];
                if (it == value.end()) std::snprintf(buf, sizeof buf, " | -");
                else std::snprintf(buf, sizeof buf, " | %.4f/%.2f", it->second.first, it->second.second);
                log << buf;
            }
            log << '\n';
        }
        std::vector<BarGroup> groups;
        for (const auto& c : conditions) {
            BarGroup g{c == "none" ? "original" : c, {}};
            for (const auto& s : schemes) {
                const auto it = value.find({s, c});
                g.values.push_back(it == value.end() ? std::numeric_limits<double>::quiet_NaN() : it->second.first);
            }
            groups.push_back(std::move(g));
        }
        plot_bars(dir / "auc_bars.png", "Detection AUC", schemes, groups);
    }
    const fs::path agg_path = dir / "aggregates.csv";
    if (fs::exists(agg_path)) {
        const auto rows = read_csv(agg_path);
        const auto& h = rows[0];
        const auto c_scheme = column(h, "scheme", agg_path), c_family = column(h, "family", agg_path),
                   c_avg = column(h, "average_auc", agg_path), c_worst = column(h, "worst_case_auc", agg_path),
                   c_avg_tpr = column(h, "average_tpr_at_1fpr", agg_path),
                   c_worst_tpr = column(h, "worst_case_tpr_at_1fpr", agg_path);
        log << "\nscheme | family | Average | Worst-Case\n";
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s | %s | %.4f/%.2f | %.4f/%.2f\n", row[c_scheme].c_str(),
                          row[c_family].c_str(), to_double(row[c_avg]), to_double(row[c_avg_tpr]),
                          to_double(row[c_worst]), to_double(row[c_worst_tpr]));
            log << buf;
        }
    }
    const fs::path sweep_path = dir / "sweep.csv";
    if (fs::exists(sweep_path)) {
        any = true;
        const auto rows = read_csv(sweep_path);
        const auto& h = rows[0];
        const auto c_lo = column(h, "t_lo", sweep_path), c_hi = column(h, "t_hi", sweep_path);
        const auto c_o = column(h, "original_auc", sweep_path), c_r = column(h, "imp_removal_auc", sweep_path),
                   c_f = column(h, "imp_forgery_auc", sweep_path);
        std::vector<std::string> labels;
        Curve original{"original", {}}, removal{"imp-removal", {}}, forgery{"imp-forgery", {}};
        log << "\nrange | original | imp-removal | imp-forgery\n";
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            labels.push_back("[" + row[c_lo] + "," + row[c_hi] + "]");
            original.y.push_back(to_double(row[c_o]));
            removal.y.push_back(to_double(row[c_r]));
            forgery.y.push_back(to_double(row[c_f]));
            char buf[128];
            std::snprintf(buf, sizeof buf, "%s | %.4f | %.4f | %.4f\n", labels.back().c_str(), original.y.back(),
                          removal.y.back(), forgery.y.back());
            log << buf;
        }
        plot_curves(dir / "sweep_auc.png", "AUC vs injection step range", labels, {original, removal, forgery});
    }
    if (!any) throw Error(ErrorCode::Io, "no result CSVs in '" + dir.string() + "'");
}

}  // namespace

int cmd_keygen(const KeygenArgs& args) {
    const RunConfig cfg = resolve_config(args.common);
    if (fs::exists(args.out)) throw Error(ErrorCode::Io, "refusing to overwrite existing key file '" + args.out.string() + "'");
    const KeyFile key = args.seed ? KeyFile::from_seed(*args.seed, cfg.mapping) : KeyFile::generate(cfg.mapping);
    save_key_file(args.out, key);
    std::cout << "key written to " << args.out.string() << " (fingerprint " << key.fingerprint() << ")\n";
    if (args.seed) std::cerr << "warning: seeded keys are reproducible and not secret\n";
    return 0;
}

int cmd_train_selector(const TrainSelectorArgs& args) {
    const auto started = Clock::now();
    const RunConfig cfg = resolve_config(args.common);
    const KeyFile key = load_key_for(args.key, cfg);
    auto backend = make_backend(cfg);
    auto codec = make_codec(cfg, *backend);
    RunManifest manifest = start_manifest("train-selector", cfg, args.common);
    manifest.key_fingerprint = key.fingerprint();

    std::vector<Image> images;
    if (!args.corpus.empty()) {
        const auto files = png_files({args.corpus});
        images = read_all(files, cfg.evaluation.workers);
        manifest.inputs["corpus"] = args.corpus;
    } else {
        const int n = args.n.value_or(cfg.evaluation.train_images);
        images = generate_training_images(cfg, backend, codec, n);
        manifest.seeds["kmeans"] = derive_seed(cfg.seed, "kmeans");
    }
    if (static_cast<int>(images.size()) < cfg.mapping.clusters)
        throw_argument("selector training needs at least C=" + std::to_string(cfg.mapping.clusters) +
                       " images but got " + std::to_string(images.size()) +
                       "; pass --n with a larger count or lower mapping.clusters");
    const SelectorModel model = train_selector_on(cfg, key, images);
    save_selector(args.out, model);

    const auto sizes = cluster_histogram(model);
    std::map<int, int> by_size;
    for (int s : sizes) ++by_size[s];
    std::cout << "trained " << model.clusters() << " clusters on " << images.size() << " images\n";
    std::cout << "cluster-size histogram (size: clusters)\n";
    for (const auto& [size, count] : by_size) std::cout << "  " << size << ": " << count << '\n';
    if (by_size.count(0)) std::cerr << "warning: " << by_size[0] << " clusters are empty\n";

    manifest.outputs["selector"] = args.out.string();
    finish_manifest(manifest, args.out.string() + ".manifest.json", started);
    return 0;
}

int cmd_generate(const GenerateArgs& args) {
    const auto started = Clock::now();
    const RunConfig cfg = resolve_config(args.common);
    const KeyFile key = load_key_for(args.key, cfg);
    Lab lab;
    lab.backend = make_backend(cfg);
    lab.codec = make_codec(cfg, *lab.backend);
    lab.key = make_watermark_key(key, cfg.pattern);
    lab.modulus = cfg.modulus;
    if (args.watermark) lab.selector = selector_for(args.selector, key, cfg);
    // Plain generation does not depend on the scheme.
    const Watermarker wm = lab.watermarker(args.watermark ? cfg.scheme : SchemeConfig::tree_ring());

    std::vector<std::string> prompts;
    if (!args.prompts.empty()) {
        std::ifstream in(args.prompts);
        if (!in) throw Error(ErrorCode::Io, "cannot open prompts file '" + args.prompts + "'");
        for (std::string line; std::getline(in, line);)
            if (!line.empty()) prompts.push_back(line);
        if (prompts.empty()) throw_argument("prompts file is empty");
    } else {
        const int n = args.n.value_or(cfg.evaluation.n_pairs);
        require(n >= 1, "--n must be at least 1");
        for (int i = 0; i < n; ++i) prompts.push_back("eval-" + std::to_string(i));
    }

    fs::create_directories(args.out);
    std::vector<InjectionParams> params(prompts.size());
    parallel_for(prompts.size(), cfg.evaluation.workers, [&](std::size_t i) {
        const PromptContext ctx = PromptContext::make(prompts[i], cfg.seed);
        const fs::path file = args.out / (padded(static_cast<int>(i)) + ".png");
        if (args.watermark) {
            const GeneratedPair pair = wm.generate_pair(ctx);
            params[i] = pair.params;
            write_png(file, pair.watermarked);
        } else {
            write_png(file, wm.generate_plain(ctx));
        }
    });

    RunManifest manifest = start_manifest("generate", cfg, args.common);
    manifest.key_fingerprint = key.fingerprint();
    manifest.outputs["images"] = args.out.string();
    if (args.watermark && !args.selector.empty()) manifest.inputs["selector"] = args.selector;
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        Json record{{"file", padded(static_cast<int>(i)) + ".png"}, {"prompt", prompts[i]}};
        if (args.watermark) {
            record["t"] = params[i].t;
            record["lx"] = params[i].l.lx;
            record["ly"] = params[i].l.ly;
        }
        manifest.records.push_back(record);
    }
    finish_manifest(manifest, args.out / "manifest.json", started);
    std::cout << "wrote " << prompts.size() << (args.watermark ? " watermarked" : " plain") << " images to "
              << args.out.string() << '\n';
    return 0;
}

int cmd_detect(const DetectArgs& args) {
    const RunConfig cfg = resolve_config(args.common);
    const KeyFile key = load_key_for(args.key, cfg);
    Lab lab;
    lab.backend = make_backend(cfg);
    lab.codec = make_codec(cfg, *lab.backend);
    lab.key = make_watermark_key(key, cfg.pattern);
    lab.modulus = cfg.modulus;
    lab.selector = selector_for(args.selector, key, cfg);
    const Watermarker wm = lab.watermarker(cfg.scheme);

    if (args.tau.has_value() == !args.calibrate_dir.empty())
        throw_argument("give exactly one of --tau and --calibrate-dir");
    double tau = args.tau.value_or(0.0);
    if (!args.calibrate_dir.empty()) {
        const auto benign = read_all(png_files({args.calibrate_dir}), cfg.evaluation.workers);
        std::vector<double> scores(benign.size());
        parallel_for(benign.size(), cfg.evaluation.workers, [&](std::size_t i) { scores[i] = wm.score(benign[i]); });
        tau = calibrate_threshold(scores, args.fpr.value_or(cfg.evaluation.fpr));
    }

    const auto files = png_files(args.images);
    if (files.empty()) throw_argument("no images to detect");
    std::vector<DetectionResult> results(files.size());
    std::vector<SidedStatistic> stats(files.size());
    parallel_for(files.size(), cfg.evaluation.workers, [&](std::size_t i) {
        const Image image = read_png(files[i]);
        results[i] = wm.detect(image, tau);
        stats[i] = wm.score_with(image, results[i].params_used);
    });

    std::ostringstream out;
    out << "file,d,side,plus,minus,threshold,decision,t,lx,ly\n";
    for (std::size_t i = 0; i < files.size(); ++i) {
        const auto& r = results[i];
        out << files[i].filename().string() << ',' << csv_number(r.d) << ',' << to_string(r.side) << ','
            << csv_number(stats[i].plus) << ',' << csv_number(stats[i].minus) << ',' << csv_number(r.threshold) << ','
            << (r.decision ? 1 : 0) << ',' << r.params_used.t << ',' << r.params_used.l.lx << ','
            << r.params_used.l.ly << '\n';
    }
    if (args.out.empty()) std::cout << out.str();
    else write_text_file(args.out, out.str());
    return 0;
}

int cmd_attack(const AttackArgs& args) {
    const auto started = Clock::now();
    const RunConfig cfg = resolve_config(args.common);
    const AttackKind kind = attack_kind_from_string(args.kind);
    auto backend = make_backend(cfg);
    auto codec = make_codec(cfg, *backend);
    const Surrogate surrogate{backend, codec};
    AttackConfig acfg = cfg.attack;
    acfg.kind = kind;
    acfg.validate();

    const auto files = png_files(args.inputs);
    if (files.empty()) throw_argument("no input images");
    const auto inputs = read_all(files, cfg.evaluation.workers);

    const bool forgery = kind == AttackKind::ImpForgery || kind == AttackKind::VaeForgery;
    Image reference;
    if (forgery) {
        if (args.reference.empty()) throw_argument(to_string(kind) + " needs --reference <watermarked image>");
        reference = read_png(args.reference);
    }
    Image residual;
    if (kind == AttackKind::AvgRemoval || kind == AttackKind::AvgForgery) {
        if (args.pairs_watermarked.empty() || args.pairs_clean.empty())
            throw_argument(to_string(kind) + " needs --pairs-watermarked and --pairs-clean directories");
        const auto wfiles = png_files({args.pairs_watermarked});
        const auto cfiles = png_files({args.pairs_clean});
        const auto need = static_cast<std::size_t>(acfg.n_pairs);
        if (wfiles.size() < need || cfiles.size() < need)
            throw_argument(to_string(kind) + " needs N=" + std::to_string(need) + " images in each pairs directory (found " +
                           std::to_string(wfiles.size()) + " and " + std::to_string(cfiles.size()) + ")");
        residual = avg_residual(read_all({wfiles.begin(), wfiles.begin() + static_cast<long>(need)}, cfg.evaluation.workers),
                                read_all({cfiles.begin(), cfiles.begin() + static_cast<long>(need)}, cfg.evaluation.workers));
    }

    std::vector<AttackResult> results(inputs.size());
    parallel_for(inputs.size(), cfg.evaluation.workers, [&](std::size_t i) {
        const PromptContext ctx = PromptContext::make(files[i].stem().string(), cfg.seed);
        switch (kind) {
        case AttackKind::ImpRemoval: results[i] = imp_removal(inputs[i], ctx, surrogate, acfg); break;
        case AttackKind::ImpForgery: results[i] = imp_forgery(inputs[i], reference, ctx, surrogate, acfg); break;
        case AttackKind::VaeRemoval: results[i] = vae_removal(inputs[i], surrogate, acfg); break;
        case AttackKind::VaeForgery: results[i] = vae_forgery(inputs[i], reference, surrogate, acfg); break;
        case AttackKind::AvgRemoval:
        case AttackKind::AvgForgery: {
            AttackResult r;
            r.attacked = kind == AttackKind::AvgRemoval ? avg_removal(inputs[i], residual) : avg_forgery(inputs[i], residual);
            r.perturbation_norm = (r.attacked - inputs[i]).norm();
            results[i] = std::move(r);
            break;
        }
        }
    });

    fs::create_directories(args.out);
    std::ostringstream summary, traces;
    summary << "file,attack,perturbation_norm,initial_loss,final_loss,steps\n";
    traces << "file,step,loss\n";
    for (std::size_t i = 0; i < files.size(); ++i) {
        const auto& r = results[i];
        write_png(args.out / files[i].filename(), r.attacked);
        const double first = r.loss_trace.empty() ? 0.0 : r.loss_trace.front();
        const double last = r.loss_trace.empty() ? 0.0 : r.loss_trace.back();
        summary << files[i].filename().string() << ',' << to_string(kind) << ',' << csv_number(r.perturbation_norm) << ','
                << csv_number(first) << ',' << csv_number(last) << ',' << r.loss_trace.size() << '\n';
        for (std::size_t s = 0; s < r.loss_trace.size(); ++s)
            traces << files[i].filename().string() << ',' << s << ',' << csv_number(r.loss_trace[s]) << '\n';
    }
    write_text_file(args.out / "attack.csv", summary.str());
    write_text_file(args.out / "loss_traces.csv", traces.str());

    RunManifest manifest = start_manifest("attack", cfg, args.common);
    manifest.inputs["images"] = args.inputs.size() == 1 ? args.inputs[0] : std::to_string(args.inputs.size()) + " paths";
    if (!args.reference.empty()) manifest.inputs["reference"] = args.reference;
    if (!args.pairs_watermarked.empty()) manifest.inputs["pairs_watermarked"] = args.pairs_watermarked;
    if (!args.pairs_clean.empty()) manifest.inputs["pairs_clean"] = args.pairs_clean;
    manifest.outputs["images"] = args.out.string();
    manifest.outputs["summary"] = (args.out / "attack.csv").string();
    manifest.outputs["loss_traces"] = (args.out / "loss_traces.csv").string();
    finish_manifest(manifest, args.out / "manifest.json", started);
    std::cout << "attacked " << files.size() << " images with " << to_string(kind) << '\n';
    return 0;
}

int cmd_distort(const DistortArgs& args) {
    const auto started = Clock::now();
    const RunConfig cfg = resolve_config(args.common);
    DistortionSpec spec = DistortionSpec::standard(distortion_kind_from_string(args.kind));
    if (args.magnitude) spec.magnitude = *args.magnitude;
    if (args.crop_measure == "side") spec.crop_measure = CropMeasure::Side;
    else if (args.crop_measure != "area") throw_argument("--crop-measure must be area or side");
    spec.validate();

    const auto files = png_files(args.inputs);
    if (files.empty()) throw_argument("no input images");
    fs::create_directories(args.out);
    parallel_for(files.size(), cfg.evaluation.workers, [&](std::size_t i) {
        const std::uint64_t seed = derive_seed(cfg.seed, "distort:" + files[i].filename().string());
        write_png(args.out / files[i].filename(), distort(read_png(files[i]), spec, seed));
    });
    RunManifest manifest = start_manifest("distort", cfg, args.common);
    manifest.inputs["images"] = args.inputs.size() == 1 ? args.inputs[0] : std::to_string(args.inputs.size()) + " paths";
    manifest.outputs["images"] = args.out.string();
    manifest.records.push_back(Json{{"distortion", spec.label()}});
    finish_manifest(manifest, args.out / "manifest.json", started);
    std::cout << "applied " << spec.label() << " to " << files.size() << " images\n";
    return 0;
}

int cmd_evaluate(const EvaluateArgs& args) {
    const auto started = Clock::now();
    const int modes = int{args.matrix} + int{args.sweep} + int{args.ablation};
    if (modes != 1) throw_argument("give exactly one of --matrix, --sweep and --ablation");
    const RunConfig cfg = resolve_config(args.common);
    if (args.key.empty() == !args.key_seed.has_value()) throw_argument("give exactly one of --key and --key-seed");
    const KeyFile key = args.key_seed ? KeyFile::from_seed(*args.key_seed, cfg.mapping) : load_key_for(args.key, cfg);

    std::shared_ptr<const SelectorModel> selector;
    if (!args.selector.empty()) {
        selector = std::make_shared<SelectorModel>(load_selector(args.selector, key));
        if (!(selector->mapping == cfg.mapping)) throw_argument("selector mapping differs from the run config");
    }
    const Lab lab = make_lab(cfg, key, selector);

    const std::string command = args.matrix ? "evaluate-matrix" : args.sweep ? "evaluate-sweep" : "evaluate-ablation";
    RunManifest manifest = start_manifest(command, cfg, args.common);
    manifest.key_fingerprint = key.fingerprint();
    if (!args.selector.empty()) manifest.inputs["selector"] = args.selector;
    const EvalOptions options = eval_options(cfg, manifest.run_id);
    fs::create_directories(args.out);

    if (args.sweep) {
        const SweepResult sweep = step_sweep(lab, default_sweep_ranges(), options);
        write_stream_file(args.out / "sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, sweep); });
        manifest.outputs["sweep"] = (args.out / "sweep.csv").string();
        bool original_ok = true;
        for (const auto& row : sweep.rows) original_ok = original_ok && row.original_auc >= 0.99;
        manifest.records.push_back(Json{{"removal_trend_spearman", sweep.removal_trend},
                                        {"forgery_trend_spearman", sweep.forgery_trend},
                                        {"original_auc_at_least_0.99", original_ok}});
    } else {
        MatrixResult result;
        if (args.ablation) {
            result = run_ablation(lab, options);
        } else {
            std::vector<SchemeConfig> schemes;
            if (args.schemes.empty()) {
                schemes = ablation_schemes();
                schemes.push_back(SchemeConfig::tree_ring());
            } else {
                for (const auto& name : args.schemes) {
                    Json j{{"profile", cfg.profile}, {"scheme", {{"name", name}}}};
                    schemes.push_back(run_config_from_json(j).scheme);
                }
            }
            std::vector<DistortionSpec> distortions;
            for (DistortionKind k : all_distortions()) distortions.push_back(DistortionSpec::standard(k));
            result = run_matrix(lab, schemes, all_attacks(), distortions, options);
        }
        write_stream_file(args.out / "cells.csv", [&](std::ostream& o) { write_cells_csv(o, result); });
        write_stream_file(args.out / "aggregates.csv", [&](std::ostream& o) { write_aggregates_csv(o, result); });
        manifest.outputs["cells"] = (args.out / "cells.csv").string();
        manifest.outputs["aggregates"] = (args.out / "aggregates.csv").string();
        if (args.ablation) {
            write_stream_file(args.out / "ablation_grid.csv", [&](std::ostream& o) { write_ablation_grid_csv(o, result); });
            manifest.outputs["ablation_grid"] = (args.out / "ablation_grid.csv").string();
        }
        bool failed = false;
        for (const auto& c : result.cells) failed = failed || !c.failure.empty();
        if (failed) {
            write_stream_file(args.out / "failures.csv", [&](std::ostream& o) { write_failures_csv(o, result); });
            manifest.outputs["failures"] = (args.out / "failures.csv").string();
            std::cerr << "warning: some cells failed; see failures.csv\n";
        }
    }
    render_report(args.out, std::cout);
    finish_manifest(manifest, args.out / "manifest.json", started);
    return 0;
}

int cmd_report(const ReportArgs& args) {
    if (!fs::is_directory(args.in)) throw Error(ErrorCode::Io, "no such result directory '" + args.in.string() + "'");
    render_report(args.in, std::cout);
    return 0;
}

}  // namespace ists::cli
