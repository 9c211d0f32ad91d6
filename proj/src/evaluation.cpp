#include "ists/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "ists/parallel.hpp"
#include "ists/random.hpp"

namespace ists {

Watermarker Lab::watermarker(const SchemeConfig& scheme) const { return watermarker(scheme, selector); }

Watermarker Lab::watermarker(const SchemeConfig& scheme, std::shared_ptr<const SelectorModel> override_selector) const {
    return Watermarker(backend, codec, key, scheme.needs_selector() ? std::move(override_selector) : nullptr, scheme,
                       modulus);
}

const CellResult& MatrixResult::cell(const std::string& scheme, const std::string& attack,
                                     const std::string& distortion) const {
    for (const auto& c : cells)
        if (c.scheme == scheme && c.attack == attack && c.distortion == distortion) return c;
    throw_argument("no result cell for " + scheme + "/" + attack + "/" + distortion);
}

std::vector<PromptContext> eval_prompts(int n, std::uint64_t seed) {
    require(n >= 1, "need at least one evaluation prompt");
    std::vector<PromptContext> prompts;
    prompts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) prompts.push_back(PromptContext::make("eval-" + std::to_string(i), seed));
    return prompts;
}

PairSet generate_pairs(const Watermarker& wm, const EvalOptions& options) {
    PairSet set;
    set.prompts = eval_prompts(options.n_pairs, options.seed);
    const std::size_t n = set.prompts.size();
    set.plain.resize(n);
    set.watermarked.resize(n);
    set.params.resize(n);
    parallel_for(n, options.workers, [&](std::size_t i) {
        GeneratedPair pair = wm.generate_pair(set.prompts[i]);
        set.plain[i] = std::move(pair.plain);
        set.watermarked[i] = std::move(pair.watermarked);
        set.params[i] = pair.params;
    });
    set.reference_prompt = PromptContext::make("reference", options.seed);
    set.reference = wm.generate_pair(set.reference_prompt).watermarked;
    return set;
}

AttackedSet apply_attack(const Lab& lab, const Watermarker& wm, const PairSet& pairs,
                         std::optional<AttackKind> attack, const EvalOptions& options) {
    (void)wm;
    const std::size_t n = pairs.plain.size();
    AttackedSet out;
    out.negatives = pairs.plain;
    if (!attack) {
        out.positives = pairs.watermarked;
        return out;
    }
    const AttackConfig& cfg = options.attack;
    cfg.validate();
    const Surrogate surrogate = lab.surrogate();
    out.positives.resize(n);

    Image residual;
    if (*attack == AttackKind::AvgRemoval || *attack == AttackKind::AvgForgery) {
        const auto used = std::min<std::size_t>(n, static_cast<std::size_t>(cfg.n_pairs));
        residual = avg_residual({pairs.watermarked.begin(), pairs.watermarked.begin() + static_cast<long>(used)},
                                {pairs.plain.begin(), pairs.plain.begin() + static_cast<long>(used)});
    }
    parallel_for(n, options.workers, [&](std::size_t i) {
        switch (*attack) {
        case AttackKind::ImpRemoval:
            out.positives[i] = imp_removal(pairs.watermarked[i], pairs.prompts[i], surrogate, cfg).attacked;
            break;
        case AttackKind::ImpForgery:
            out.positives[i] = imp_forgery(pairs.plain[i], pairs.reference, pairs.prompts[i], surrogate, cfg).attacked;
            break;
        case AttackKind::AvgRemoval: out.positives[i] = avg_removal(pairs.watermarked[i], residual); break;
        case AttackKind::AvgForgery: out.positives[i] = avg_forgery(pairs.plain[i], residual); break;
        case AttackKind::VaeRemoval: out.positives[i] = vae_removal(pairs.watermarked[i], surrogate, cfg).attacked; break;
        case AttackKind::VaeForgery:
            out.positives[i] = vae_forgery(pairs.plain[i], pairs.reference, surrogate, cfg).attacked;
            break;
        }
    });
    return out;
}

CellResult score_cell(const Watermarker& wm, const std::vector<Image>& positives, const std::vector<Image>& negatives,
                      const std::vector<Image>& quality_reference, const EvalOptions& options) {
    require(positives.size() == quality_reference.size(), "quality reference count mismatch");
    ScoreSet scores;
    scores.positives.resize(positives.size());
    scores.negatives.resize(negatives.size());
    std::vector<double> psnrs(positives.size());
    std::vector<double> ssims(positives.size());
    parallel_for(positives.size(), options.workers, [&](std::size_t i) {
        scores.positives[i] = wm.score(positives[i]);
        psnrs[i] = psnr(positives[i], quality_reference[i]);
        ssims[i] = ssim(positives[i], quality_reference[i]);
    });
    parallel_for(negatives.size(), options.workers, [&](std::size_t i) { scores.negatives[i] = wm.score(negatives[i]); });
    CellResult cell;
    cell.scheme = scheme_name(wm.scheme());
    cell.n = static_cast<int>(positives.size());
    cell.auc = auc(scores);
    cell.tpr_at_1fpr = tpr_at_fpr(scores, options.fpr);
    cell.psnr_median = median(psnrs);
    cell.ssim_median = median(ssims);
    return cell;
}

namespace {

CellResult failed_cell(const SchemeConfig& scheme, const EvalOptions& options, const std::string& message) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CellResult cell;
    cell.scheme = scheme_name(scheme);
    cell.n = options.n_pairs;
    cell.auc = cell.tpr_at_1fpr = cell.psnr_median = cell.ssim_median = nan;
    cell.failure = message;
    return cell;
}

std::vector<Image> distort_all(const std::vector<Image>& images, const DistortionSpec& spec, std::uint64_t seed,
                               const std::string& label, int workers) {
    std::vector<Image> out(images.size());
    parallel_for(images.size(), workers, [&](std::size_t i) {
        out[i] = distort(images[i], spec, derive_seed(seed, label + ":" + std::to_string(i)));
    });
    return out;
}

}  // namespace

MatrixResult run_matrix(const Lab& lab, const std::vector<SchemeConfig>& schemes,
                        const std::vector<AttackKind>& attacks, const std::vector<DistortionSpec>& distortions,
                        const EvalOptions& options) {
    require(!schemes.empty(), "evaluation needs at least one scheme");
    require(options.n_pairs >= 2, "evaluation needs at least two pairs");
    MatrixResult result;
    result.run_id = options.run_id;
    result.seed = options.seed;
    for (const SchemeConfig& scheme : schemes) {
        const Watermarker wm = lab.watermarker(scheme);
        const PairSet pairs = generate_pairs(wm, options);

        CellResult original = score_cell(wm, pairs.watermarked, pairs.plain, pairs.plain, options);
        result.cells.push_back(original);

        for (AttackKind kind : attacks) {
            CellResult cell;
            try {
                const AttackedSet attacked = apply_attack(lab, wm, pairs, kind, options);
                const auto& quality = is_removal(kind) ? pairs.watermarked : pairs.plain;
                cell = score_cell(wm, attacked.positives, attacked.negatives, quality, options);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::AttackUnsupported) throw;
                cell = failed_cell(scheme, options, e.what());
            }
            cell.attack = to_string(kind);
            result.cells.push_back(cell);
        }
        for (const DistortionSpec& spec : distortions) {
            const auto positives = distort_all(pairs.watermarked, spec, options.seed, "distort-positive", options.workers);
            const auto negatives = distort_all(pairs.plain, spec, options.seed, "distort-negative", options.workers);
            CellResult cell = score_cell(wm, positives, negatives, pairs.watermarked, options);
            cell.distortion = spec.label();
            result.cells.push_back(cell);
        }
    }
    result.aggregates = aggregate(result.cells);
    return result;
}

std::vector<AggregateRow> aggregate(const std::vector<CellResult>& cells) {
    std::vector<std::string> schemes;
    for (const auto& c : cells)
        if (std::find(schemes.begin(), schemes.end(), c.scheme) == schemes.end()) schemes.push_back(c.scheme);

    std::vector<AggregateRow> rows;
    for (const std::string& scheme : schemes) {
        for (const bool removal : {true, false}) {
            std::vector<const CellResult*> members;
            for (const auto& c : cells) {
                if (c.scheme != scheme || c.distortion != "none" || c.attack == "none") continue;
                if (is_removal(attack_kind_from_string(c.attack)) == removal) members.push_back(&c);
            }
            if (members.size() != 3) continue;
            AggregateRow row;
            row.scheme = scheme;
            row.family = removal ? "removal" : "forgery";
            row.worst_auc = std::numeric_limits<double>::infinity();
            row.worst_tpr = std::numeric_limits<double>::infinity();
            for (const CellResult* c : members) {
                if (!c->failure.empty()) {
                    row.worst_auc = row.worst_tpr = std::numeric_limits<double>::quiet_NaN();
                    row.average_auc = row.average_tpr = std::numeric_limits<double>::quiet_NaN();
                    break;
                }
                row.average_auc += c->auc;
                row.average_tpr += c->tpr_at_1fpr;
                row.worst_auc = std::min(row.worst_auc, c->auc);
                row.worst_tpr = std::min(row.worst_tpr, c->tpr_at_1fpr);
            }
            row.average_auc /= 3.0;
            row.average_tpr /= 3.0;
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<SchemeConfig> ablation_schemes() {
    return {SchemeConfig::ists(), SchemeConfig::without_dynamic_pattern(), SchemeConfig::without_dynamic_injection(),
            SchemeConfig::without_two_sided()};
}

MatrixResult run_ablation(const Lab& lab, const EvalOptions& options) {
    return run_matrix(lab, ablation_schemes(), all_attacks(), {}, options);
}

std::vector<std::pair<int, int>> default_sweep_ranges() {
    std::vector<std::pair<int, int>> ranges;
    for (int lo = 5; lo <= 35; lo += 5) ranges.emplace_back(lo, lo + 10);
    return ranges;
}

namespace {

std::vector<double> ranks(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> r(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j);
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = rank;
        i = j + 1;
    }
    return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() < 2) return 0.0;
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

SweepResult step_sweep(const Lab& lab, const std::vector<std::pair<int, int>>& ranges, const EvalOptions& options) {
    require(lab.selector != nullptr, "step sweep needs a trained selector");
    require(!ranges.empty(), "step sweep needs at least one range");
    SweepResult sweep;
    std::vector<double> starts, removal, forgery;
    for (const auto& [lo, hi] : ranges) {
        auto selector = std::make_shared<SelectorModel>(*lab.selector);
        selector->mapping.t_lo = lo;
        selector->mapping.t_hi = hi;
        selector->mapping.validate(lab.backend->steps());
        const Watermarker wm = lab.watermarker(SchemeConfig::ists(), selector);
        const PairSet pairs = generate_pairs(wm, options);

        SweepRow row;
        row.t_lo = lo;
        row.t_hi = hi;
        row.original_auc = score_cell(wm, pairs.watermarked, pairs.plain, pairs.plain, options).auc;
        const auto removed = apply_attack(lab, wm, pairs, AttackKind::ImpRemoval, options);
        row.imp_removal_auc = score_cell(wm, removed.positives, removed.negatives, pairs.watermarked, options).auc;
        const auto forged = apply_attack(lab, wm, pairs, AttackKind::ImpForgery, options);
        row.imp_forgery_auc = score_cell(wm, forged.positives, forged.negatives, pairs.plain, options).auc;
        sweep.rows.push_back(row);
        starts.push_back(lo);
        removal.push_back(row.imp_removal_auc);
        forgery.push_back(row.imp_forgery_auc);
    }
    sweep.removal_trend = spearman(starts, removal);
    sweep.forgery_trend = spearman(starts, forgery);
    return sweep;
}

double residual_mask_energy(const Image& residual, const Watermarker& wm, Offset l) {
    const ImageCodec& codec = wm.codec();
    const Image base(residual.channels(), residual.height(), residual.width(), 0.5);
    const Tensor3 z = codec.encode(base + residual) - codec.encode(base);
    const FreqMask mask = wm.placed(l).second;
    const ComplexPlane spectrum = channel_spectrum(z, mask.channel);
    double energy = 0.0;
    for (std::size_t idx : mask.indices()) energy += std::norm(spectrum.values[idx]);
    return energy;
}

double residual_worst_energy(const Image& residual, const Watermarker& wm) {
    const SchemeConfig& scheme = wm.scheme();
    if (!scheme.dynamic_pattern) return residual_mask_energy(residual, wm, scheme.static_offset);
    const MappingConfig& m = wm.selector()->mapping;
    double worst = 0.0;
    for (int lx = m.lx_lo; lx < m.lx_hi; ++lx)
        for (int ly = m.ly_lo; ly < m.ly_hi; ++ly)
            worst = std::max(worst, residual_mask_energy(residual, wm, Offset{lx, ly}));
    return worst;
}

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_cells_csv(std::ostream& out, const MatrixResult& result) {
    out << "run_id,scheme,attack,distortion,n,auc,tpr_at_1fpr,psnr_median,ssim_median,seed\n";
    for (const auto& c : result.cells)
        out << result.run_id << ',' << c.scheme << ',' << c.attack << ',' << c.distortion << ',' << c.n << ','
            << fmt(c.auc) << ',' << fmt(c.tpr_at_1fpr) << ',' << fmt(c.psnr_median) << ',' << fmt(c.ssim_median) << ','
            << result.seed << '\n';
}

void write_failures_csv(std::ostream& out, const MatrixResult& result) {
    out << "run_id,scheme,attack,distortion,message\n";
    for (const auto& c : result.cells) {
        if (c.failure.empty()) continue;
        std::string message = c.failure;
        std::replace(message.begin(), message.end(), ',', ';');
        std::replace(message.begin(), message.end(), '\n', ' ');
        out << result.run_id << ',' << c.scheme << ',' << c.attack << ',' << c.distortion << ',' << message << '\n';
    }
}

void write_aggregates_csv(std::ostream& out, const MatrixResult& result) {
    out << "run_id,scheme,family,average_auc,average_tpr_at_1fpr,worst_case_auc,worst_case_tpr_at_1fpr\n";
    for (const auto& a : result.aggregates)
        out << result.run_id << ',' << a.scheme << ',' << a.family << ',' << fmt(a.average_auc) << ','
            << fmt(a.average_tpr) << ',' << fmt(a.worst_auc) << ',' << fmt(a.worst_tpr) << '\n';
}

void write_ablation_grid_csv(std::ostream& out, const MatrixResult& result) {
    const std::vector<AttackKind> columns{AttackKind::ImpRemoval, AttackKind::AvgRemoval, AttackKind::VaeRemoval,
                                          AttackKind::ImpForgery, AttackKind::AvgForgery, AttackKind::VaeForgery};
    out << "scheme";
    for (AttackKind k : columns) out << ',' << to_string(k);
    out << '\n';
    std::vector<std::string> schemes;
    for (const auto& c : result.cells)
        if (std::find(schemes.begin(), schemes.end(), c.scheme) == schemes.end()) schemes.push_back(c.scheme);
    for (const auto& s : schemes) {
        out << s;
        for (AttackKind k : columns) out << ',' << fmt(result.cell(s, to_string(k)).auc);
        out << '\n';
    }
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
    out << "t_lo,t_hi,original_auc,imp_removal_auc,imp_forgery_auc\n";
    for (const auto& r : sweep.rows)
        out << r.t_lo << ',' << r.t_hi << ',' << fmt(r.original_auc) << ',' << fmt(r.imp_removal_auc) << ','
            << fmt(r.imp_forgery_auc) << '\n';
    out << "# removal_trend_spearman," << fmt(sweep.removal_trend) << '\n';
    out << "# forgery_trend_spearman," << fmt(sweep.forgery_trend) << '\n';
}

}  // namespace ists
