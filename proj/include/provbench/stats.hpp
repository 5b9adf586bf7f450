#pragma once

// Discrimination, lead-time, calibration, and resampling statistics over
// score tables. Every randomized routine takes a RandomSource and derives one
// substream per draw, so results are bit-identical across runs and thread
// counts.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "provbench/random.hpp"
#include "provbench/scoring.hpp"

namespace provbench {

// Exact pair enumeration with half credit for ties.
double auroc(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores);

// Strict-inequality fraction; tied pairs count as failures.
double matched_pair_accuracy(const std::vector<PairScores>& pairs);

struct PermutationSummary {
    double p = 1.0;
    int draws = 0;
    double observed = 0.0;
    double null_mean = 0.0;
    double null_max = 0.0;
};

// Global label permutation preserving class counts; p never reaches 0
// (add-one estimator). labels[i] is true for positives.
PermutationSummary permutation_test(const std::vector<double>& scores,
                                    const std::vector<bool>& labels, int draws,
                                    const RandomSource& rng);

// Matched-design variant: each draw swaps positive/control within each pair
// independently with probability one half.
PermutationSummary permutation_test_within_pair(const std::vector<PairScores>& pairs, int draws,
                                                const RandomSource& rng);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

Interval bootstrap_ci(const std::function<double(const std::vector<double>&)>& metric,
                      const std::vector<double>& sample, int resamples, const RandomSource& rng,
                      double level = 0.95);

// Stratified: positives and controls resampled separately.
Interval bootstrap_auroc_ci(const std::vector<double>& pos_scores,
                            const std::vector<double>& neg_scores, int resamples,
                            const RandomSource& rng, double level = 0.95);

struct PanelSummaryStats {
    double median_lead_years = 0.0;
    double detection_rate = 0.0;
    double precision_at_threshold = 0.0;
    double calibration_error = 0.0;
    std::vector<std::string> warnings;
};

// median lead over detected positives (earliest detected signal), detection
// rate, precision at score >= threshold, and ECE over 10 equal-width bins of
// min-max rescaled scores.
PanelSummaryStats panel_summary(const Panel& panel, const ScoreTable& table, double threshold);

struct FoldRecord {
    std::string pair_id;
    std::vector<double> weights; // empty for fixed-weight folds
    double threshold = 0.0;
    double positive_score = 0.0;
    double control_score = 0.0;
};

struct EvaluationReport {
    std::string arm;
    double auroc = 0.0;
    double matched_pair_accuracy = 0.0;
    double median_lead_years = 0.0;
    double detection_rate = 0.0;
    double precision_at_threshold = 0.0;
    double calibration_error = 0.0;
    double permutation_p = 1.0;
    int permutation_draws = 0;
    Interval bootstrap_ci;
    std::uint64_t seed = 0;
    std::vector<FoldRecord> fold_log;
    std::vector<std::string> warnings;
};

struct StatsConfig {
    std::uint64_t seed = 0;
    int permutation_draws = 2000;
    int bootstrap_resamples = 2000;
    double ci_level = 0.95;
    double threshold = 0.5;
    bool paired_permutation = false;
    std::optional<WeightConfig> weights; // for panels without a preset
};

// Whole-panel evaluation of an existing score table.
EvaluationReport evaluate_score_table(const Panel& panel, const ScoreTable& table,
                                      const StatsConfig& config);

enum class SelectionRule { fixed, grid };

// Leave-one-pair-out: grid selection fits fold-local weights over the kuhn
// feature vector; fixed reuses the arm's weights in every fold.
EvaluationReport lopo_evaluate(const Panel& panel, const ComparatorArm& arm, SelectionRule rule,
                               const StatsConfig& config);

Json report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const Json& doc);
std::string report_csv_header();
std::string report_csv_row(const EvaluationReport& report);

} // namespace provbench
