#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "ists/config.hpp"
#include "ists/error.hpp"

namespace {

using namespace ists::cli;

void add_common(CLI::App* cmd, Common& common) {
    cmd->add_option("--config", common.config, "run config JSON (or a manifest to reuse its resolved config)");
    cmd->add_option("--profile", common.profile, "built-in profile when no config is given")
        ->check(CLI::IsMember({"desk", "paper"}));
}

/// Arguments after the subcommand name, minus --config, for manifests.
std::vector<std::string> recorded_arguments(int argc, char** argv) {
    std::vector<std::string> out;
    for (int i = 2; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config") {
            ++i;
            continue;
        }
        if (a.rfind("--config=", 0) == 0) continue;
        out.push_back(a);
    }
    return out;
}

int run(int argc, char** argv);

int replay(const std::string& manifest_path) {
    const ists::RunManifest m = ists::load_manifest(manifest_path);
    std::string sub = m.command;
    std::vector<std::string> args{"ists"};
    if (sub.rfind("evaluate-", 0) == 0) sub = "evaluate";
    args.push_back(sub);
    args.insert(args.end(), m.arguments.begin(), m.arguments.end());
    args.push_back("--config");
    args.push_back(manifest_path);
    std::vector<char*> ptrs;
    for (auto& a : args) ptrs.push_back(a.data());
    return run(static_cast<int>(ptrs.size()), ptrs.data());
}

int run(int argc, char** argv) {
    CLI::App app{"Instance-specific two-sided diffusion watermarking lab"};
    app.require_subcommand(1);
    const auto recorded = recorded_arguments(argc, argv);

    KeygenArgs keygen;
    auto* c_keygen = app.add_subcommand("keygen", "create a secret key file");
    add_common(c_keygen, keygen.common);
    c_keygen->add_option("--out", keygen.out, "key file to create")->required();
    c_keygen->add_option("--seed", keygen.seed, "derive the key from a seed (reproducible, not secret)");

    TrainSelectorArgs train;
    auto* c_train = app.add_subcommand("train-selector", "cluster plain images and train the parameter selector");
    add_common(c_train, train.common);
    c_train->add_option("--key", train.key, "key file")->required();
    c_train->add_option("--out", train.out, "selector file to write")->required();
    auto* corpus = c_train->add_option("--corpus", train.corpus, "directory of plain PNG images");
    c_train->add_option("--n", train.n, "number of plain images to generate")->excludes(corpus);

    GenerateArgs gen;
    auto* c_gen = app.add_subcommand("generate", "generate plain or watermarked images");
    add_common(c_gen, gen.common);
    c_gen->add_option("--key", gen.key, "key file")->required();
    c_gen->add_option("--selector", gen.selector, "selector file (dynamic schemes)");
    c_gen->add_option("--out", gen.out, "output directory")->required();
    auto* prompts = c_gen->add_option("--prompts", gen.prompts, "file with one prompt per line");
    c_gen->add_option("--n", gen.n, "number of images when no prompts file is given")->excludes(prompts);
    auto* wm_flag = c_gen->add_flag("--watermark", gen.watermark, "embed the watermark");
    bool plain = false;
    auto* plain_flag = c_gen->add_flag("--plain", plain, "generate without watermark");
    wm_flag->excludes(plain_flag);

    DetectArgs det;
    auto* c_det = app.add_subcommand("detect", "score images and decide against a threshold");
    add_common(c_det, det.common);
    c_det->add_option("--key", det.key, "key file")->required();
    c_det->add_option("--selector", det.selector, "selector file (dynamic schemes)");
    c_det->add_option("--tau", det.tau, "decision threshold");
    c_det->add_option("--calibrate-dir", det.calibrate_dir, "benign images for threshold calibration");
    c_det->add_option("--fpr", det.fpr, "target false-positive rate for calibration");
    c_det->add_option("--out", det.out, "CSV output (default stdout)");
    c_det->add_option("images", det.images, "PNG files or directories")->required();

    AttackArgs atk;
    auto* c_atk = app.add_subcommand("attack", "run a removal or forgery attack");
    add_common(c_atk, atk.common);
    c_atk->add_option("--kind", atk.kind, "attack kind")
        ->required()
        ->check(CLI::IsMember({"imp-removal", "imp-forgery", "avg-removal", "avg-forgery", "vae-removal", "vae-forgery"}));
    c_atk->add_option("--out", atk.out, "output directory")->required();
    c_atk->add_option("--reference", atk.reference, "watermarked reference image (forgery)");
    c_atk->add_option("--pairs-watermarked", atk.pairs_watermarked, "watermarked images for the average residual");
    c_atk->add_option("--pairs-clean", atk.pairs_clean, "clean images for the average residual");
    c_atk->add_option("inputs", atk.inputs, "PNG files or directories")->required();

    DistortArgs dis;
    auto* c_dis = app.add_subcommand("distort", "apply an image distortion");
    add_common(c_dis, dis.common);
    c_dis->add_option("--kind", dis.kind, "distortion kind")
        ->required()
        ->check(CLI::IsMember({"rotation", "noise", "blur", "crop", "jpeg"}));
    c_dis->add_option("--magnitude", dis.magnitude, "degrees, sigma, support, fraction or quality");
    c_dis->add_option("--crop-measure", dis.crop_measure, "area or side fraction")
        ->check(CLI::IsMember({"area", "side"}));
    c_dis->add_option("--out", dis.out, "output directory")->required();
    c_dis->add_option("inputs", dis.inputs, "PNG files or directories")->required();

    EvaluateArgs ev;
    auto* c_ev = app.add_subcommand("evaluate", "run the result matrix, ablation grid or step sweep");
    add_common(c_ev, ev.common);
    c_ev->add_option("--key", ev.key, "key file");
    c_ev->add_option("--key-seed", ev.key_seed, "use a reproducible seeded key instead of a key file");
    c_ev->add_option("--selector", ev.selector, "selector file (trained in-process when absent)");
    c_ev->add_option("--out", ev.out, "result directory")->required();
    c_ev->add_flag("--matrix", ev.matrix, "schemes x attacks and distortions");
    c_ev->add_flag("--sweep", ev.sweep, "injection-step range sweep");
    c_ev->add_flag("--ablation", ev.ablation, "component ablation grid");
    c_ev->add_option("--schemes", ev.schemes, "restrict --matrix to these schemes")->delimiter(',');

    ReportArgs rep;
    auto* c_rep = app.add_subcommand("report", "print tables and render plots from a result directory");
    c_rep->add_option("--in", rep.in, "result directory")->required();

    std::string manifest;
    auto* c_replay = app.add_subcommand("replay", "re-run the command recorded in a manifest");
    c_replay->add_option("manifest", manifest, "manifest file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        for (char& ch : msg)
            if (ch == '\n') ch = ' ';
        std::cerr << "error: " << ists::error_code_name(ists::ErrorCode::Argument) << ": " << msg << '\n';
        return 2;
    }

    for (Common* common : {&keygen.common, &train.common, &gen.common, &det.common, &atk.common, &dis.common, &ev.common})
        common->arguments = recorded;

    if (c_keygen->parsed()) return cmd_keygen(keygen);
    if (c_train->parsed()) return cmd_train_selector(train);
    if (c_gen->parsed()) {
        if (gen.watermark == plain) throw ists::Error(ists::ErrorCode::Argument, "give exactly one of --watermark and --plain");
        return cmd_generate(gen);
    }
    if (c_det->parsed()) return cmd_detect(det);
    if (c_atk->parsed()) return cmd_attack(atk);
    if (c_dis->parsed()) return cmd_distort(dis);
    if (c_ev->parsed()) return cmd_evaluate(ev);
    if (c_rep->parsed()) return cmd_report(rep);
    if (c_replay->parsed()) return replay(manifest);
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ists::Error& e) {
        std::cerr << "error: " << ists::error_code_name(e.code()) << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: internal-error: " << e.what() << '\n';
        return 3;
    }
}
