#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ists/attacks.hpp"
#include "ists/distortion.hpp"
#include "ists/metrics.hpp"
#include "ists/pipeline.hpp"

namespace ists {

/// Everything needed to build a Watermarker for any scheme.
struct Lab {
    std::shared_ptr<const DiffusionBackend> backend;
    std::shared_ptr<const ImageCodec> codec;
    std::shared_ptr<const SelectorModel> selector;
    WatermarkKey key;
    Modulus modulus = Modulus::Complex;

    Watermarker watermarker(const SchemeConfig& scheme) const;
    Watermarker watermarker(const SchemeConfig& scheme, std::shared_ptr<const SelectorModel> override_selector) const;
    Surrogate surrogate() const { return {backend, codec}; }
};

struct EvalOptions {
    int n_pairs = 100;
    std::uint64_t seed = 0;
    double fpr = 0.01;
    AttackConfig attack;
    int workers = 1;
    std::string run_id = "run";
};

/// One cell of the result table. attack/distortion are "none" when absent.
struct CellResult {
    std::string scheme;
    std::string attack = "none";
    std::string distortion = "none";
    int n = 0;
    double auc = 0.0;
    double tpr_at_1fpr = 0.0;
    double psnr_median = 0.0;
    double ssim_median = 0.0;
    std::string failure;  // error text when the cell could not run; metrics are NaN
};

/// Average (mean) and Worst-Case (min) over the three removal or forgery cells.
struct AggregateRow {
    std::string scheme;
    std::string family;  // "removal" or "forgery"
    double average_auc = 0.0;
    double average_tpr = 0.0;
    double worst_auc = 0.0;
    double worst_tpr = 0.0;
};

struct MatrixResult {
    std::string run_id;
    std::uint64_t seed = 0;
    std::vector<CellResult> cells;
    std::vector<AggregateRow> aggregates;

    const CellResult& cell(const std::string& scheme, const std::string& attack,
                           const std::string& distortion = "none") const;
};

/// Images shared by every cell of one scheme.
struct PairSet {
    std::vector<PromptContext> prompts;
    std::vector<Image> plain;
    std::vector<Image> watermarked;
    std::vector<InjectionParams> params;
    PromptContext reference_prompt;
    Image reference;  // single watermarked image used as the forgery target
};

std::vector<PromptContext> eval_prompts(int n, std::uint64_t seed);
PairSet generate_pairs(const Watermarker& wm, const EvalOptions& options);

/// Positives and negatives of one attack (before any distortion).
struct AttackedSet {
    std::vector<Image> positives;
    std::vector<Image> negatives;
};
AttackedSet apply_attack(const Lab& lab, const Watermarker& wm, const PairSet& pairs,
                         std::optional<AttackKind> attack, const EvalOptions& options);

CellResult score_cell(const Watermarker& wm, const std::vector<Image>& positives, const std::vector<Image>& negatives,
                      const std::vector<Image>& quality_reference, const EvalOptions& options);

/// Original cell, one cell per attack and one per distortion for each
/// scheme, plus the removal/forgery aggregates.
MatrixResult run_matrix(const Lab& lab, const std::vector<SchemeConfig>& schemes,
                        const std::vector<AttackKind>& attacks, const std::vector<DistortionSpec>& distortions,
                        const EvalOptions& options);

std::vector<AggregateRow> aggregate(const std::vector<CellResult>& cells);

/// ISTS and the three single-component ablations.
std::vector<SchemeConfig> ablation_schemes();
MatrixResult run_ablation(const Lab& lab, const EvalOptions& options);

struct SweepRow {
    int t_lo = 0;
    int t_hi = 0;
    double original_auc = 0.0;
    double imp_removal_auc = 0.0;
    double imp_forgery_auc = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    /// Spearman correlation of range start against removal AUC (negative
    /// means larger steps make the attack more effective).
    double removal_trend = 0.0;
    double forgery_trend = 0.0;
};

std::vector<std::pair<int, int>> default_sweep_ranges();
SweepResult step_sweep(const Lab& lab, const std::vector<std::pair<int, int>>& ranges, const EvalOptions& options);

/// Energy of the residual's latent spectrum on the mask placed at l.
double residual_mask_energy(const Image& residual, const Watermarker& wm, Offset l);

/// Largest residual_mask_energy over every offset the scheme can use.
double residual_worst_energy(const Image& residual, const Watermarker& wm);

void write_cells_csv(std::ostream& out, const MatrixResult& result);
/// One line per failed cell: scheme, attack, distortion, message.
void write_failures_csv(std::ostream& out, const MatrixResult& result);
void write_aggregates_csv(std::ostream& out, const MatrixResult& result);
/// Ablation grid: one row per scheme, one AUC column per attack.
void write_ablation_grid_csv(std::ostream& out, const MatrixResult& result);
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

}  // namespace ists
