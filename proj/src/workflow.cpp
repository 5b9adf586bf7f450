#include "provbench/workflow.hpp"

#include <set>
#include <sstream>

#include "provbench/canonical.hpp"
#include "provbench/errors.hpp"
#include "provbench/graph.hpp"

namespace provbench {

namespace {

const std::set<std::string> kConfigKeys = {
    "manifest",        "store",       "arms",          "weights",
    "lopo",            "selection_rule", "seed",       "permutation_draws",
    "bootstrap_resamples", "ci_level", "threshold",    "paired_permutation",
    "panel_id",        "application"};

} // namespace

WorkflowConfig workflow_config_from_json(const Json& doc) {
    if (!doc.is_object()) throw Error(ErrorKind::SchemaError, "config must be an object");
    for (const auto& [key, value] : doc.items())
        if (!kConfigKeys.count(key))
            throw Error(ErrorKind::SchemaError, "unknown config key: " + key);

    WorkflowConfig cfg;
    auto manifest = doc.find("manifest");
    if (manifest == doc.end() || !manifest->is_string())
        throw Error(ErrorKind::SchemaError, "config needs a manifest path");
    cfg.manifest = manifest->get<std::string>();

    if (auto s = doc.find("store"); s != doc.end()) cfg.store_root = s->get<std::string>();

    auto arms = doc.find("arms");
    if (arms == doc.end() || !arms->is_array() || arms->empty())
        throw Error(ErrorKind::SchemaError, "config needs a non-empty arms list");
    for (const auto& a : *arms) {
        const std::string label = a.get<std::string>();
        arm_from_label(label); // validates
        cfg.arms.push_back(label);
    }

    auto seed = doc.find("seed");
    if (seed == doc.end() || !seed->is_number_integer())
        throw Error(ErrorKind::SchemaError, "config needs an explicit integer seed");
    cfg.seed = seed->get<std::uint64_t>();

    if (auto w = doc.find("weights"); w != doc.end()) cfg.weights = weights_from_json(*w);
    if (auto v = doc.find("lopo"); v != doc.end()) cfg.lopo = v->get<bool>();
    if (auto v = doc.find("selection_rule"); v != doc.end()) {
        const std::string rule = v->get<std::string>();
        if (rule == "fixed") cfg.selection_rule = SelectionRule::fixed;
        else if (rule == "grid") cfg.selection_rule = SelectionRule::grid;
        else throw Error(ErrorKind::SchemaError, "selection_rule must be fixed or grid");
    }
    if (auto v = doc.find("permutation_draws"); v != doc.end()) {
        cfg.permutation_draws = v->get<int>();
        if (cfg.permutation_draws < 1)
            throw Error(ErrorKind::SchemaError, "permutation_draws must be positive");
    }
    if (auto v = doc.find("bootstrap_resamples"); v != doc.end()) {
        cfg.bootstrap_resamples = v->get<int>();
        if (cfg.bootstrap_resamples < 1)
            throw Error(ErrorKind::SchemaError, "bootstrap_resamples must be positive");
    }
    if (auto v = doc.find("ci_level"); v != doc.end()) {
        cfg.ci_level = v->get<double>();
        if (cfg.ci_level <= 0.0 || cfg.ci_level >= 1.0)
            throw Error(ErrorKind::SchemaError, "ci_level must lie in (0,1)");
    }
    if (auto v = doc.find("threshold"); v != doc.end()) cfg.threshold = v->get<double>();
    if (auto v = doc.find("paired_permutation"); v != doc.end())
        cfg.paired_permutation = v->get<bool>();
    if (auto v = doc.find("panel_id"); v != doc.end()) cfg.csv_panel_id = v->get<std::string>();
    if (auto v = doc.find("application"); v != doc.end())
        cfg.csv_application = v->get<std::string>();
    return cfg;
}

Json run_record_to_json(const RunRecord& record) {
    Json doc = Json::object();
    doc["report_id"] = record.report_id;
    doc["freeze_id"] = record.freeze_id;
    doc["score_ids"] = record.score_ids;
    doc["evaluation_ids"] = record.evaluation_ids;
    doc["config_digest"] = record.config_digest;
    doc["exit_status"] = record.exit_status;
    doc["exit_code"] = record.exit_code;
    return doc;
}

namespace {

Json evidence_payload(const Panel& panel) {
    Json doc = Json::object();
    doc["panel_id"] = panel.panel_id;
    doc["channels"] = panel.channels;
    Json items = Json::array();
    for (const auto& item : panel.items) {
        Json entry = Json::object();
        entry["item_id"] = item.item_id;
        entry["label"] = label_name(item.label);
        entry["pair_id"] = item.pair_id;
        entry["recognition_year"] = item.recognition_year;
        entry["window_years"] = item.window_years;
        Json channels = Json::object();
        for (const auto& [name, ev] : item.channels) {
            Json e = Json::object();
            e["detected"] = ev.detected;
            if (ev.first_signal_year) e["first_signal_year"] = *ev.first_signal_year;
            channels[name] = e;
        }
        entry["channels"] = channels;
        if (item.kuhn_summary) {
            Json k = Json::object();
            k["detected"] = item.kuhn_summary->detected;
            k["lead_years"] = item.kuhn_summary->lead_years;
            k["significance"] = item.kuhn_summary->significance;
            k["incommensurability"] = item.kuhn_summary->incommensurability;
            entry["kuhn_summary"] = k;
        }
        items.push_back(entry);
    }
    doc["items"] = items;
    return doc;
}

// flags and leads per item in channel order, plus the kuhn feature vector
// where present; computed from the evidence artifact alone.
Json features_payload(const Json& evidence) {
    Json doc = Json::object();
    doc["panel_id"] = evidence.at("panel_id");
    doc["channels"] = evidence.at("channels");
    Json items = Json::array();
    for (const auto& entry : evidence.at("items")) {
        Json out = Json::object();
        out["item_id"] = entry.at("item_id");
        Json flags = Json::array();
        Json leads = Json::array();
        for (const auto& name : evidence.at("channels")) {
            const Json& ev = entry.at("channels").at(name.get<std::string>());
            const bool detected = ev.at("detected").get<bool>();
            flags.push_back(detected ? 1 : 0);
            std::optional<int> fsy;
            if (detected && ev.contains("first_signal_year"))
                fsy = ev.at("first_signal_year").get<int>();
            leads.push_back(lead_time(entry.at("recognition_year").get<int>(), fsy,
                                      entry.at("window_years").get<int>()));
        }
        out["flags"] = flags;
        out["leads"] = leads;
        if (entry.contains("kuhn_summary")) {
            PanelItem item;
            item.item_id = out["item_id"].get<std::string>();
            item.window_years = entry.at("window_years").get<int>();
            const Json& k = entry.at("kuhn_summary");
            item.kuhn_summary = KuhnSummary{
                k.at("detected").get<bool>(), k.at("lead_years").get<double>(),
                k.at("significance").get<double>(), k.at("incommensurability").get<double>()};
            const auto features = kuhn_features(item);
            out["features"] = std::vector<double>(features.begin(), features.end());
        }
        items.push_back(out);
    }
    doc["items"] = items;
    return doc;
}

} // namespace

RunRecord run_workflow(const Json& config_doc, ArtifactStore& store) {
    RunRecord record;
    const WorkflowConfig cfg = workflow_config_from_json(config_doc);
    record.config_digest = content_address(config_doc);
    store.use_deterministic_ids(cfg.seed ^ detail::fnv1a64(record.config_digest));

    ArtifactMeta meta;
    meta.producer = "workflow-runner";
    meta.tool = "bench run";
    meta.schema_version = "1";
    meta.timestamp_unix = 0;

    std::string stage = "freeze";
    std::vector<std::string> trail; // last successful artifact ids, for failure links
    try {
        // Stage 1: freeze the panel.
        Panel panel = cfg.manifest.extension() == ".csv"
                          ? load_panel_csv(cfg.manifest, cfg.csv_panel_id, cfg.csv_application)
                          : load_panel(cfg.manifest);
        meta.application = application_name(panel.application);
        const std::vector<std::string> warnings = validate_panel(panel);
        const PutResult freeze = freeze_panel(panel, store, meta);
        record.freeze_id = freeze.id;
        trail = {freeze.id};

        // Stage 2: evidence table, read back from the freeze artifact.
        stage = "evidence";
        const Panel frozen = panel_from_json(store.get_artifact(freeze.id).payload);
        const Json evidence = evidence_payload(frozen);
        const PutResult evidence_put =
            store.put_artifact(evidence, meta, {freeze.id}, Quality::ok,
                               "evidence table for panel " + frozen.panel_id);
        trail = {evidence_put.id};

        // Stage 3: feature matrices from the evidence artifact.
        stage = "features";
        const Json features = features_payload(store.get_artifact(evidence_put.id).payload);
        const PutResult features_put =
            store.put_artifact(features, meta, {evidence_put.id}, Quality::ok,
                               "feature matrices for panel " + frozen.panel_id);
        trail = {features_put.id};

        // Stage 4: score every arm from the frozen panel.
        stage = "score";
        const Panel score_panel = panel_from_json(store.get_artifact(freeze.id).payload);
        for (const auto& label : cfg.arms) {
            const ScoreTable table = apply_arm(score_panel, arm_from_label(label), cfg.weights);
            const PutResult put =
                store_score_table(store, table, {freeze.id, features_put.id}, meta);
            record.score_ids.push_back(put.id);
        }
        trail = record.score_ids;

        // Stage 5: evaluate each score table.
        stage = "evaluate";
        StatsConfig stats;
        stats.seed = cfg.seed;
        stats.permutation_draws = cfg.permutation_draws;
        stats.bootstrap_resamples = cfg.bootstrap_resamples;
        stats.ci_level = cfg.ci_level;
        stats.threshold = cfg.threshold;
        stats.paired_permutation = cfg.paired_permutation;
        stats.weights = cfg.weights;
        const Panel eval_panel = panel_from_json(store.get_artifact(freeze.id).payload);
        for (const auto& score_id : record.score_ids) {
            const ScoreTable table =
                score_table_from_json(store.get_artifact(score_id).payload);
            const EvaluationReport report =
                cfg.lopo ? lopo_evaluate(eval_panel, arm_from_label(table.arm),
                                         cfg.selection_rule, stats)
                         : evaluate_score_table(eval_panel, table, stats);
            const PutResult put =
                store.put_artifact(report_to_json(report), meta, {score_id, freeze.id},
                                   Quality::ok, "evaluation report for arm " + table.arm);
            record.evaluation_ids.push_back(put.id);
        }
        trail = record.evaluation_ids;

        // Stage 6: synthesize the final report from evaluation artifacts.
        stage = "synthesize";
        Json final_doc = Json::object();
        final_doc["panel_id"] = frozen.panel_id;
        final_doc["application"] = application_name(frozen.application);
        final_doc["config_digest"] = record.config_digest;
        final_doc["seed"] = cfg.seed;
        final_doc["panel_freeze"] = freeze.id;
        final_doc["panel_freeze_digest"] = freeze.digest;
        final_doc["validation_warnings"] = warnings;
        Json arms = Json::array();
        for (std::size_t i = 0; i < record.evaluation_ids.size(); ++i) {
            const Artifact eval = store.get_artifact(record.evaluation_ids[i]);
            Json entry = Json::object();
            entry["arm"] = eval.payload.at("arm");
            entry["auroc"] = eval.payload.at("auroc");
            entry["matched_pair_accuracy"] = eval.payload.at("matched_pair_accuracy");
            entry["permutation_p"] = eval.payload.at("permutation_p");
            entry["bootstrap_ci"] = eval.payload.at("bootstrap_ci");
            entry["evaluation_artifact"] = eval.id;
            entry["evaluation_digest"] = eval.hash;
            entry["score_artifact"] = record.score_ids[i];
            entry["score_digest"] = *store.hash_of(record.score_ids[i]);
            arms.push_back(entry);
        }
        final_doc["arms"] = arms;
        std::ostringstream summary;
        summary << "final synthesis for panel " << frozen.panel_id << ": "
                << record.evaluation_ids.size() << " arms evaluated";
        const PutResult final_put = store.put_artifact(final_doc, meta, record.evaluation_ids,
                                                       Quality::ok, summary.str());
        record.report_id = final_put.id;
        record.exit_status = "ok";
        record.exit_code = 0;
    } catch (const Error& e) {
        record.exit_status = std::string("failed: ") + e.what();
        record.exit_code = e.exit_code();
        try {
            Json failure = Json::object();
            failure["stage"] = stage;
            failure["error"] = error_kind_name(e.kind());
            failure["message"] = e.what();
            const PutResult put = store.put_artifact(failure, meta, trail, Quality::failed,
                                                     "workflow aborted at stage " + stage);
            record.report_id = put.id;
        } catch (const Error&) {
            // store unusable; the record alone carries the failure
        }
    }
    return record;
}

std::string render_report(const ArtifactStore& store, const std::string& report_id,
                          const std::string& format) {
    if (format != "csv" && format != "json")
        throw Error(ErrorKind::UnsupportedFormat, "unsupported report format: " + format);

    Artifact final_artifact;
    try {
        final_artifact = store.get_artifact(report_id);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NotFound)
            throw Error(ErrorKind::MissingArtifact, "no report artifact " + report_id);
        throw;
    }
    if (!final_artifact.payload.contains("arms"))
        throw Error(ErrorKind::KindMismatch, report_id + " is not a final report artifact");

    std::vector<EvaluationReport> reports;
    std::vector<Json> entries;
    for (const auto& entry : final_artifact.payload.at("arms")) {
        const std::string eval_id = entry.at("evaluation_artifact").get<std::string>();
        Artifact eval;
        try {
            eval = store.get_artifact(eval_id);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::NotFound)
                throw Error(ErrorKind::MissingArtifact, "missing evaluation artifact " + eval_id);
            throw;
        }
        reports.push_back(report_from_json(eval.payload));
        Json row = Json::object();
        row["arm"] = entry.at("arm");
        row["evaluation_artifact"] = eval_id;
        row["evaluation_digest"] = eval.hash;
        row["score_artifact"] = entry.at("score_artifact");
        row["score_digest"] = entry.at("score_digest");
        row["metrics"] = eval.payload;
        entries.push_back(row);
    }

    if (format == "csv") {
        std::ostringstream out;
        out << report_csv_header() << '\n';
        for (const auto& report : reports) out << report_csv_row(report) << '\n';
        return out.str();
    }
    Json doc = Json::object();
    doc["panel_id"] = final_artifact.payload.at("panel_id");
    doc["config_digest"] = final_artifact.payload.at("config_digest");
    doc["panel_freeze"] = final_artifact.payload.at("panel_freeze");
    doc["panel_freeze_digest"] = final_artifact.payload.at("panel_freeze_digest");
    doc["report_id"] = report_id;
    doc["report_digest"] = final_artifact.hash;
    doc["arms"] = entries;
    return canonicalize(doc);
}

} // namespace provbench
