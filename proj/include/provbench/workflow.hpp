#pragma once

// Six-stage workflow runner: freeze panel, collect evidence, derive feature
// matrices, score every arm, evaluate, synthesize. Every stage reads only
// stored artifacts and writes its result back as an artifact, so the final
// report's ancestry covers the whole computation. Reruns with identical
// config and inputs are idempotent: every digest comes out the same.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "provbench/stats.hpp"

namespace provbench {

struct WorkflowConfig {
    std::filesystem::path manifest;
    std::filesystem::path store_root;
    std::vector<std::string> arms; // comparator arm labels
    std::optional<WeightConfig> weights;
    bool lopo = false;
    SelectionRule selection_rule = SelectionRule::fixed;
    std::uint64_t seed = 0; // must be explicit in the config file
    int permutation_draws = 2000;
    int bootstrap_resamples = 2000;
    double ci_level = 0.95;
    double threshold = 0.5;
    bool paired_permutation = false;
    // set for csv manifests, which carry no panel header
    std::string csv_panel_id;
    std::string csv_application;
};

// Parses and validates a config document; digest() is the content address of
// the document as written, recorded in the final report.
WorkflowConfig workflow_config_from_json(const Json& doc);

struct RunRecord {
    std::string report_id; // final synthesis artifact
    std::string freeze_id;
    std::vector<std::string> score_ids;
    std::vector<std::string> evaluation_ids;
    std::string config_digest;
    std::string exit_status; // "ok" or "failed: <reason>"
    int exit_code = 0;
};

Json run_record_to_json(const RunRecord& record);

RunRecord run_workflow(const Json& config_doc, ArtifactStore& store);

// Renders per-arm metric tables from stored artifacts only; format is
// "csv" or "json". Statistics are never recomputed here.
std::string render_report(const ArtifactStore& store, const std::string& report_id,
                          const std::string& format);

} // namespace provbench
