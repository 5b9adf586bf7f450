// provbench: provenance-tracked benchmark workflows over a content-addressed
// artifact store.
//
// Exit codes: 0 ok, 1 validation error, 2 store integrity error, 3 usage.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "provbench/canonical.hpp"
#include "provbench/embedding.hpp"
#include "provbench/errors.hpp"
#include "provbench/graph.hpp"
#include "provbench/panel.hpp"
#include "provbench/scoring.hpp"
#include "provbench/stats.hpp"
#include "provbench/store.hpp"
#include "provbench/workflow.hpp"

namespace {

using provbench::Error;
using provbench::ErrorKind;
using provbench::Json;

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::StoreReadFailure, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::int64_t now_unix() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

struct PanelArgs {
    std::string manifest;
    std::string panel_id;
    std::string application;
};

provbench::Panel load_panel_args(const PanelArgs& args) {
    const std::filesystem::path path = args.manifest;
    if (path.extension() == ".csv") {
        if (args.panel_id.empty() || args.application.empty())
            throw Error(ErrorKind::Usage,
                        "csv manifests need --panel-id and --application");
        return provbench::load_panel_csv(path, args.panel_id, args.application);
    }
    return provbench::load_panel(path);
}

void add_panel_options(CLI::App* cmd, PanelArgs& args) {
    cmd->add_option("manifest", args.manifest, "panel manifest (.json or .csv)")->required();
    cmd->add_option("--panel-id", args.panel_id, "panel id for csv manifests");
    cmd->add_option("--application", args.application, "application for csv manifests");
}

provbench::ArtifactMeta cli_meta(const std::string& application) {
    provbench::ArtifactMeta meta;
    meta.producer = "cli";
    meta.tool = "provbench";
    meta.application = application;
    meta.schema_version = "1";
    meta.timestamp_unix = now_unix();
    return meta;
}

std::optional<provbench::WeightConfig> resolve_cli_weights(const std::string& preset,
                                                           const std::string& weights_file) {
    if (!preset.empty() && !weights_file.empty())
        throw Error(ErrorKind::Usage, "--preset and --weights are mutually exclusive");
    if (!preset.empty()) {
        if (preset == "climate")
            return provbench::preset_weights(provbench::Application::climate_vector);
        if (preset == "exoplanet")
            return provbench::preset_weights(provbench::Application::exoplanet);
        throw Error(ErrorKind::Usage, "--preset must be climate or exoplanet");
    }
    if (!weights_file.empty())
        return provbench::weights_from_json(provbench::parse_json_strict(slurp(weights_file)));
    return std::nullopt;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::StoreWriteFailure, "cannot write " + out_path);
    out << text;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"provenance-tracked benchmark engine"};
    app.require_subcommand(1);
    int pending_exit = 0;

    // panel load | validate | freeze
    auto* panel_cmd = app.add_subcommand("panel", "load, validate, or freeze a panel");
    panel_cmd->require_subcommand(1);
    PanelArgs panel_args;
    std::string store_root;
    auto* panel_load = panel_cmd->add_subcommand("load", "parse a manifest and print a summary");
    add_panel_options(panel_load, panel_args);
    panel_load->callback([&] {
        const provbench::Panel panel = load_panel_args(panel_args);
        Json doc = Json::object();
        doc["panel_id"] = panel.panel_id;
        doc["application"] = provbench::application_name(panel.application);
        doc["channels"] = panel.channels;
        doc["items"] = panel.items.size();
        doc["n_pairs"] = panel.n_pairs;
        emit(provbench::canonicalize(doc), "");
    });
    auto* panel_validate =
        panel_cmd->add_subcommand("validate", "print non-fatal panel warnings");
    add_panel_options(panel_validate, panel_args);
    panel_validate->callback([&] {
        const provbench::Panel panel = load_panel_args(panel_args);
        for (const auto& warning : provbench::validate_panel(panel))
            std::cout << "warning: " << warning << '\n';
    });
    auto* panel_freeze = panel_cmd->add_subcommand("freeze", "store the panel as an artifact");
    add_panel_options(panel_freeze, panel_args);
    panel_freeze->add_option("--store", store_root, "artifact store root")->required();
    panel_freeze->callback([&] {
        const provbench::Panel panel = load_panel_args(panel_args);
        provbench::ArtifactStore store(store_root);
        const provbench::PutResult put = provbench::freeze_panel(
            panel, store, cli_meta(provbench::application_name(panel.application)));
        Json doc = Json::object();
        doc["id"] = put.id;
        doc["digest"] = put.digest;
        doc["created"] = put.created;
        emit(provbench::canonicalize(doc), "");
    });

    // score
    auto* score_cmd = app.add_subcommand("score", "score a panel under one comparator arm");
    PanelArgs score_panel_args;
    add_panel_options(score_cmd, score_panel_args);
    std::string arm_name = "full";
    std::string preset, weights_file, format = "csv", out_path;
    score_cmd->add_option("--arm", arm_name, "comparator arm label");
    score_cmd->add_option("--preset", preset, "preset weights: climate or exoplanet");
    score_cmd->add_option("--weights", weights_file, "explicit weights json file");
    score_cmd->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    score_cmd->add_option("--out", out_path, "output path (default stdout)");
    score_cmd->callback([&] {
        const provbench::Panel panel = load_panel_args(score_panel_args);
        const provbench::ScoreTable table =
            provbench::apply_arm(panel, provbench::arm_from_label(arm_name),
                                 resolve_cli_weights(preset, weights_file));
        emit(format == "csv" ? provbench::score_table_csv(panel, table)
                             : provbench::canonicalize(provbench::score_table_to_json(table)),
             out_path);
    });

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "score and evaluate a panel under one arm");
    PanelArgs eval_panel_args;
    add_panel_options(eval_cmd, eval_panel_args);
    std::string eval_arm = "full";
    std::string eval_preset, eval_weights_file, eval_format = "json", eval_out;
    bool lopo = false, paired = false;
    std::string selection = "fixed";
    std::uint64_t seed = 0;
    int permutations = 2000, bootstrap = 2000;
    double threshold = 0.5, ci_level = 0.95;
    eval_cmd->add_option("--arm", eval_arm, "comparator arm label");
    eval_cmd->add_option("--preset", eval_preset, "preset weights: climate or exoplanet");
    eval_cmd->add_option("--weights", eval_weights_file, "explicit weights json file");
    eval_cmd->add_flag("--lopo", lopo, "leave-one-pair-out evaluation");
    eval_cmd->add_option("--selection", selection, "lopo weight selection: fixed or grid")
        ->check(CLI::IsMember({"fixed", "grid"}));
    eval_cmd->add_option("--permutations", permutations, "permutation draws");
    eval_cmd->add_option("--bootstrap", bootstrap, "bootstrap resamples");
    eval_cmd->add_option("--seed", seed, "random seed")->required();
    eval_cmd->add_option("--threshold", threshold, "precision threshold");
    eval_cmd->add_option("--ci-level", ci_level, "bootstrap confidence level");
    eval_cmd->add_flag("--paired", paired, "within-pair permutation scheme");
    eval_cmd->add_option("--format", eval_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    eval_cmd->add_option("--out", eval_out, "output path (default stdout)");
    eval_cmd->callback([&] {
        const provbench::Panel panel = load_panel_args(eval_panel_args);
        provbench::StatsConfig stats;
        stats.seed = seed;
        stats.permutation_draws = permutations;
        stats.bootstrap_resamples = bootstrap;
        stats.ci_level = ci_level;
        stats.threshold = threshold;
        stats.paired_permutation = paired;
        stats.weights = resolve_cli_weights(eval_preset, eval_weights_file);
        const provbench::ComparatorArm arm = provbench::arm_from_label(eval_arm);
        provbench::EvaluationReport report;
        if (lopo) {
            report = provbench::lopo_evaluate(panel, arm,
                                              selection == "grid"
                                                  ? provbench::SelectionRule::grid
                                                  : provbench::SelectionRule::fixed,
                                              stats);
        } else {
            report = provbench::evaluate_score_table(
                panel, provbench::apply_arm(panel, arm, stats.weights), stats);
        }
        if (eval_format == "csv") {
            emit(provbench::report_csv_header() + "\n" + provbench::report_csv_row(report) + "\n",
                 eval_out);
        } else {
            emit(provbench::canonicalize(provbench::report_to_json(report)), eval_out);
        }
    });

    // embed build | retrieval | nulls
    auto* embed_cmd = app.add_subcommand("embed", "harmonic embedding workflows");
    embed_cmd->require_subcommand(1);
    std::string features_path, transform_path, embed_out;
    int k = 1, label_perms = 5000, random_maps = 1000;
    std::uint64_t embed_seed = 0;
    auto add_embed_inputs = [&](CLI::App* cmd) {
        cmd->add_option("features", features_path, "descriptor matrix csv (id,class,...)")
            ->required();
        cmd->add_option("transform", transform_path, "descriptor-to-channel transform csv")
            ->required();
    };
    auto* embed_build = embed_cmd->add_subcommand("build", "build and print the embedding");
    add_embed_inputs(embed_build);
    embed_build->add_option("--out", embed_out, "output path (default stdout)");
    embed_build->callback([&] {
        const provbench::FeatureMatrix X = provbench::load_feature_matrix(features_path);
        const provbench::HarmonicTransform T = provbench::load_transform(transform_path);
        emit(provbench::canonicalize(
                 provbench::embedding_to_json(provbench::build_embedding(X, T))),
             embed_out);
    });
    auto* embed_retrieval =
        embed_cmd->add_subcommand("retrieval", "same-class retrieval at rank k");
    add_embed_inputs(embed_retrieval);
    embed_retrieval->add_option("--k", k, "neighbor count");
    embed_retrieval->callback([&] {
        const provbench::FeatureMatrix X = provbench::load_feature_matrix(features_path);
        const provbench::HarmonicTransform T = provbench::load_transform(transform_path);
        const provbench::Embedding embedding = provbench::build_embedding(X, T);
        Json doc = Json::object();
        doc["k"] = k;
        doc["retrieval_at_k"] = provbench::retrieval_at_k(embedding, X.class_labels, k);
        doc["same_class_nn_rate"] =
            provbench::same_class_nn_rate(embedding, X.class_labels);
        doc["expected_shuffled_rate"] = provbench::expected_shuffled_rate(X.class_labels);
        emit(provbench::canonicalize(doc), "");
    });
    auto* embed_nulls = embed_cmd->add_subcommand("nulls", "shuffled-label and random-map nulls");
    add_embed_inputs(embed_nulls);
    embed_nulls->add_option("--k", k, "neighbor count");
    embed_nulls->add_option("--label-perms", label_perms, "label permutations");
    embed_nulls->add_option("--random-maps", random_maps, "random transform draws");
    embed_nulls->add_option("--seed", embed_seed, "random seed")->required();
    embed_nulls->callback([&] {
        const provbench::FeatureMatrix X = provbench::load_feature_matrix(features_path);
        const provbench::HarmonicTransform T = provbench::load_transform(transform_path);
        const provbench::NullReport report =
            provbench::null_controls(X, X.class_labels, T, k, label_perms, random_maps,
                                     provbench::RandomSource(embed_seed, "embed/nulls"));
        emit(provbench::canonicalize(provbench::null_report_to_json(report)), "");
    });

    // store verify | lineage | export-graph
    auto* store_cmd = app.add_subcommand("store", "inspect an artifact store");
    store_cmd->require_subcommand(1);
    std::string lineage_id, graph_format = "json";
    auto* store_verify = store_cmd->add_subcommand("verify", "re-hash every stored object");
    store_verify->add_option("--store", store_root, "artifact store root")->required();
    store_verify->callback([&] {
        const provbench::ArtifactStore store(store_root);
        const provbench::VerifyReport report = store.verify();
        Json doc = Json::object();
        doc["checked"] = report.checked;
        doc["passed"] = report.passed;
        Json failed = Json::array();
        for (const auto& f : report.failed) {
            Json entry = Json::object();
            entry["id"] = f.id;
            entry["reason"] = f.reason;
            failed.push_back(entry);
        }
        doc["failed"] = failed;
        emit(provbench::canonicalize(doc), "");
        if (!report.ok())
            throw Error(ErrorKind::IntegrityMismatch,
                        std::to_string(report.failed.size()) + " object(s) failed verification");
    });
    auto* store_lineage = store_cmd->add_subcommand("lineage", "derivation record of an artifact");
    store_lineage->add_option("id", lineage_id, "artifact id")->required();
    store_lineage->add_option("--store", store_root, "artifact store root")->required();
    store_lineage->callback([&] {
        const provbench::ArtifactStore store(store_root);
        const provbench::ProvenanceGraph graph = provbench::build_graph(store);
        Json rows = Json::array();
        for (const auto& row : provbench::lineage_report(graph, store, lineage_id)) {
            Json entry = Json::object();
            entry["id"] = row.id;
            entry["hash"] = row.hash;
            entry["producer"] = row.producer;
            entry["tool"] = row.tool;
            entry["summary"] = row.summary;
            rows.push_back(entry);
        }
        emit(provbench::canonicalize(rows), "");
    });
    auto* store_export = store_cmd->add_subcommand("export-graph", "emit the provenance graph");
    store_export->add_option("--store", store_root, "artifact store root")->required();
    store_export->add_option("--format", graph_format, "dot or json")
        ->check(CLI::IsMember({"dot", "json"}));
    std::string graph_out;
    store_export->add_option("--out", graph_out, "output path (default stdout)");
    store_export->callback([&] {
        const provbench::ArtifactStore store(store_root);
        emit(provbench::export_graph(provbench::build_graph(store), graph_format), graph_out);
    });

    // run
    auto* run_cmd = app.add_subcommand("run", "execute the six-stage workflow from a config");
    std::string config_path;
    std::string run_store_override;
    run_cmd->add_option("config", config_path, "workflow config json")->required();
    run_cmd->add_option("--store", run_store_override, "override the config's store root");
    run_cmd->callback([&] {
        const Json config_doc = provbench::parse_json_strict(slurp(config_path));
        std::filesystem::path root;
        if (!run_store_override.empty()) {
            root = run_store_override;
        } else if (config_doc.contains("store")) {
            root = config_doc.at("store").get<std::string>();
        } else {
            throw Error(ErrorKind::Usage, "no store root: set \"store\" in the config or --store");
        }
        provbench::ArtifactStore store(root);
        const provbench::RunRecord record = provbench::run_workflow(config_doc, store);
        emit(provbench::canonicalize(provbench::run_record_to_json(record)), "");
        if (record.exit_code != 0) std::cerr << "error: " << record.exit_status << '\n';
        pending_exit = record.exit_code;
    });

    // report
    auto* report_cmd = app.add_subcommand("report", "render a stored run report");
    std::string report_id, report_format = "json", report_out;
    report_cmd->add_option("run-id", report_id, "final report artifact id")->required();
    report_cmd->add_option("--store", store_root, "artifact store root")->required();
    report_cmd->add_option("--format", report_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    report_cmd->add_option("--out", report_out, "output path (default stdout)");
    report_cmd->callback([&] {
        const provbench::ArtifactStore store(store_root);
        emit(provbench::render_report(store, report_id, report_format), report_out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 3;
    }
    return pending_exit;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error [" << provbench::error_kind_name(e.kind()) << "]: " << e.what()
                  << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
