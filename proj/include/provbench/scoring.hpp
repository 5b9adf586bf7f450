#pragma once

// Composite scoring over frozen panels: lead times, weighted channel sums,
// preset weightings, comparator arms, and the thermal response curve. All
// functions here are pure; persisting score tables is the caller's job.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "provbench/panel.hpp"

namespace provbench {

struct WeightConfig {
    std::map<std::string, double> flag_weights; // w_j
    std::map<std::string, double> lead_weights; // gamma_j
    std::string label;
};

enum class ArmKind {
    full,
    single_channel,
    ablation,
    combined_fraction,
    kuhn_equal_weight,
    kuhn_lead_only,
    kuhn_detection_only,
    kuhn_sig_incomm,
    kuhn_incomm_only,
};

struct ComparatorArm {
    ArmKind kind = ArmKind::full;
    std::string channel;           // single_channel
    std::set<std::string> dropped; // ablation
};

std::string arm_label(const ComparatorArm& arm);
// "full", "combined_fraction", "single_channel:<name>", "ablation:<a,b>",
// or one of the kuhn_* names.
ComparatorArm arm_from_label(const std::string& label);

struct PairScores {
    std::string pair_id;
    double positive = 0.0;
    double control = 0.0;
};

struct ScoreTable {
    std::string panel_id;
    std::string arm;
    std::map<std::string, double> scores;
    std::vector<PairScores> pairs; // sorted by pair_id
};

struct BriereParams {
    double T0 = 18.0;
    double Tmax = 40.1;
    double scale = 1.0;
};

// max(0, T - t) / W clamped to [0,1]; absent t counts as no lead.
double lead_time(int recognition_year, std::optional<int> first_signal_year, int window_years);

// Left-to-right weighted sum in the given channel order.
double composite_score(const std::vector<std::string>& channels,
                       const std::map<std::string, bool>& flags,
                       const std::map<std::string, double>& leads, const WeightConfig& weights);

double combined_fraction(const std::vector<bool>& flags);

WeightConfig preset_weights(Application application);

void check_weights(const WeightConfig& weights, const std::vector<std::string>& channels);

// {label?, flag_weights: {channel: w}, lead_weights: {channel: g}}
WeightConfig weights_from_json(const Json& doc);
Json weights_to_json(const WeightConfig& weights);

ScoreTable apply_arm(const Panel& panel, const ComparatorArm& arm,
                     const std::optional<WeightConfig>& weights = std::nullopt);

Json score_table_to_json(const ScoreTable& table);
ScoreTable score_table_from_json(const Json& doc);
std::string score_table_csv(const Panel& panel, const ScoreTable& table);

PutResult store_score_table(ArtifactStore& store, const ScoreTable& table,
                            const std::vector<std::string>& parents, const ArtifactMeta& meta);

// c * T * (T - T0) * sqrt(Tmax - T) inside [T0, Tmax], zero outside.
double briere_rate(double temperature_c, const BriereParams& params);

} // namespace provbench
