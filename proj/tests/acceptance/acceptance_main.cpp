// Acceptance gate: ten go/no-go checks over the built library, run end to
// end against the bundled fixtures. Prints one [PASS]/[FAIL]/[SKIP] line per
// check and exits nonzero when anything fails. The last check needs the
// externally published row-level panels and is skipped when they are absent.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "provbench/canonical.hpp"
#include "provbench/embedding.hpp"
#include "provbench/errors.hpp"
#include "provbench/graph.hpp"
#include "provbench/panel.hpp"
#include "provbench/random.hpp"
#include "provbench/scoring.hpp"
#include "provbench/stats.hpp"
#include "provbench/store.hpp"
#include "provbench/workflow.hpp"

using namespace provbench;
namespace fs = std::filesystem;

namespace {

fs::path data_dir() { return fs::path(TEST_DATA_DIR); }

struct CheckFailure {
    std::string detail;
};

struct CheckSkipped {
    std::string reason;
};

void require(bool ok, const std::string& detail) {
    if (!ok) throw CheckFailure{detail};
}

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

struct TempDir {
    fs::path path;

    TempDir() {
        std::random_device rd;
        std::mt19937_64 gen(rd());
        path = fs::temp_directory_path() / ("provbench-gate-" + std::to_string(gen()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    require(in.good(), "cannot read " + p.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    require(out.good(), "cannot write " + p.string());
}

// ---------------------------------------------------------------------------
// 1. Canonical digests ignore serialization key order.

// Hand-checked canonical forms and digests, frozen so a platform or library
// change that alters the byte stream fails loudly.
struct DocGolden {
    const char* input;
    const char* canonical;
    const char* digest;
};

const DocGolden kDocGoldens[] = {
    {"{\"b\":2,\"a\":1,\"ab\":3,\"A\":0}",
     "{\"A\":0,\"a\":1,\"ab\":3,\"b\":2}",
     "4e1f7c77ba3d4e088444cbb40f6a705738523be445f1f0c6f79c6661250c58d0"},
    {"{\"numbers\":[333333333.3333333,1e+21,0.001,1e-7],\"literals\":[null,true,false]}",
     "{\"literals\":[null,true,false],\"numbers\":[333333333.3333333,1e+21,0.001,1e-7]}",
     "18b05bc3e9542ac9bb38c4feff0fdb7f719d7912cfb519f5abc9618ce968b37e"},
    {"{\"outer\":{\"z\":[1.5,2],\"y\":{\"k\":\"v\"}},\"empty\":{},\"list\":[]}",
     "{\"empty\":{},\"list\":[],\"outer\":{\"y\":{\"k\":\"v\"},\"z\":[1.5,2]}}",
     "584c4d673a94c285bb09c7fa2714b92fccc04ab80f1aabfba664936c4c384390"},
    {"{\"unicode\":\"\\u20ac\\ud834\\udd1e\\u00e9\\u00df\"}",
     "{\"unicode\":\"€\U0001d11eéß\"}",
     "b3dbe20a8ab83afb3fab7dfa39010926defb4f4f7756fe85f54afaffbb5434e4"},
    {"{\"mix\":[{\"q\":0.25,\"p\":[true,null]},-0.0,\"end\"],\"n\":42}",
     "{\"mix\":[{\"p\":[true,null],\"q\":0.25},0,\"end\"],\"n\":42}",
     "376e7620144c8de0929ea46dfcba0f58d748d9de307da0bf07f49794a5024935"},
};

// Random document over all value types; keys and strings stay ASCII so the
// shuffled writer below can quote them verbatim.
Json random_document(Substream& s, int depth) {
    const std::uint64_t pick = s.next_below(depth > 2 ? 5 : 7);
    switch (pick) {
    case 0: return Json(nullptr);
    case 1: return Json(s.next_u64() % 2 == 0);
    case 2: return Json(static_cast<std::int64_t>(s.next_u64() % 100000) - 50000);
    case 3: return Json((s.next_double() - 0.5) * 1e6);
    case 4: return Json("s" + std::to_string(s.next_below(1000)));
    case 5: {
        Json arr = Json::array();
        const std::uint64_t n = s.next_below(4);
        for (std::uint64_t i = 0; i < n; ++i) arr.push_back(random_document(s, depth + 1));
        return arr;
    }
    default: {
        Json obj = Json::object();
        const std::uint64_t n = s.next_below(4);
        for (std::uint64_t i = 0; i < n; ++i)
            obj["k" + std::to_string(s.next_below(20))] = random_document(s, depth + 1);
        return obj;
    }
    }
}

// Serializes with object keys in a random order per object, the one degree
// of freedom canonicalization must erase.
void dump_shuffled(const Json& v, Substream& s, std::string& out) {
    switch (v.type()) {
    case Json::value_t::null: out += "null"; return;
    case Json::value_t::boolean: out += v.get<bool>() ? "true" : "false"; return;
    case Json::value_t::number_integer:
        out += std::to_string(v.get<std::int64_t>());
        return;
    case Json::value_t::number_unsigned:
        out += std::to_string(v.get<std::uint64_t>());
        return;
    case Json::value_t::number_float: out += canonical_number(v.get<double>()); return;
    case Json::value_t::string: out += '"' + v.get<std::string>() + '"'; return;
    case Json::value_t::array: {
        out += '[';
        bool first = true;
        for (const auto& item : v) {
            if (!first) out += ',';
            first = false;
            dump_shuffled(item, s, out);
        }
        out += ']';
        return;
    }
    default: {
        std::vector<std::string> keys;
        for (auto it = v.begin(); it != v.end(); ++it) keys.push_back(it.key());
        for (std::size_t i = keys.size(); i > 1; --i)
            std::swap(keys[i - 1], keys[s.next_below(i)]);
        out += '{';
        bool first = true;
        for (const auto& k : keys) {
            if (!first) out += ',';
            first = false;
            out += '"' + k + "\":";
            dump_shuffled(v.at(k), s, out);
        }
        out += '}';
        return;
    }
    }
}

void check_digest_key_order() {
    for (const auto& g : kDocGoldens) {
        const Json doc = parse_json_strict(g.input);
        require(canonicalize(doc) == g.canonical, std::string("canonical bytes drifted for ") + g.input);
        require(content_address(doc) == g.digest, std::string("golden digest drifted for ") + g.input);
    }

    Substream s(0xd0c5ULL);
    for (int i = 0; i < 1000; ++i) {
        const Json doc = random_document(s, 0);
        std::string text_a, text_b;
        dump_shuffled(doc, s, text_a);
        dump_shuffled(doc, s, text_b);
        const std::string base = content_address(doc);
        const std::string da = content_address(parse_json_strict(text_a));
        const std::string db = content_address(parse_json_strict(text_b));
        require(da == base && db == base,
                "digest depends on key order for document " + std::to_string(i));
    }
}

// ---------------------------------------------------------------------------
// 2. auroc equals a brute-force integer-credit oracle exactly.

void check_auroc_oracle() {
    Substream s(0xa0c1ULL);
    for (int t = 0; t < 500; ++t) {
        const std::size_t np = 1 + s.next_below(20);
        const std::size_t nn = 1 + s.next_below(20);
        std::vector<double> pos(np), neg(nn);
        // Nine score levels so ties are everywhere.
        for (auto& v : pos) v = 0.125 * static_cast<double>(s.next_below(9));
        for (auto& v : neg) v = 0.125 * static_cast<double>(s.next_below(9));

        long long credit2 = 0; // wins count 2, ties count 1
        for (double p : pos)
            for (double n : neg) credit2 += (p > n) ? 2 : (p == n) ? 1 : 0;
        const double oracle =
            static_cast<double>(credit2) / (2.0 * static_cast<double>(np * nn));

        const double got = auroc(pos, neg);
        require(got == oracle, "table " + std::to_string(t) + ": auroc " + fmt(got) +
                                   " != oracle " + fmt(oracle));
    }
}

// ---------------------------------------------------------------------------
// 3. Preset weights sum to one: full-evidence items score exactly 1.0.

Panel full_evidence_panel(Application app, const std::vector<std::string>& channels) {
    Panel panel;
    panel.panel_id = "gate-" + application_name(app);
    panel.application = app;
    panel.channels = channels;
    panel.n_pairs = 1;

    PanelItem pos;
    pos.item_id = "pos-01";
    pos.label = Label::positive;
    pos.pair_id = "pair-01";
    pos.recognition_year = 2020;
    pos.window_years = 10;
    for (const auto& c : channels) pos.channels[c] = {true, 2010}; // lead exactly 1.0

    PanelItem ctl = pos;
    ctl.item_id = "ctl-01";
    ctl.label = Label::control;
    for (const auto& c : channels) ctl.channels[c] = {false, std::nullopt};

    panel.items = {pos, ctl};
    return panel;
}

void check_preset_full_evidence() {
    for (Application app : {Application::climate_vector, Application::exoplanet}) {
        const WeightConfig weights = preset_weights(app);
        std::vector<std::string> channels;
        for (const auto& [name, w] : weights.flag_weights) channels.push_back(name);

        std::map<std::string, bool> flags;
        std::map<std::string, double> leads;
        for (const auto& c : channels) {
            flags[c] = true;
            leads[c] = 1.0;
        }
        const double direct = composite_score(channels, flags, leads, weights);
        require(std::fabs(direct - 1.0) <= 1e-12,
                application_name(app) + " full-evidence composite is " + fmt(direct));

        const ScoreTable table = apply_arm(full_evidence_panel(app, channels), ComparatorArm{});
        const double scored = table.scores.at("pos-01");
        require(std::fabs(scored - 1.0) <= 1e-12,
                application_name(app) + " full-evidence item scores " + fmt(scored));
    }
}

// ---------------------------------------------------------------------------
// 4. Permutation p-values: exact add-one floor on separated data, uniform
//    on (0,1] under the null.

void check_permutation_floor_and_uniformity() {
    std::vector<double> scores;
    std::vector<bool> labels;
    for (int i = 0; i < 12; ++i) {
        scores.push_back(1.0);
        labels.push_back(true);
    }
    for (int i = 0; i < 12; ++i) {
        scores.push_back(0.0);
        labels.push_back(false);
    }
    const PermutationSummary sep =
        permutation_test(scores, labels, 2000, RandomSource(42, "gate/floor"));
    require(sep.p == 1.0 / 2001.0, "separated-panel p is " + fmt(sep.p));
    require(sep.p < 0.001, "separated-panel p not below 0.001");

    // 200 independent null panels; the add-one estimator should be uniform
    // on (0,1] up to the discreteness of rank-based AUROC.
    const int reps = 200;
    const RandomSource data_src(2026, "gate/null-data");
    std::vector<double> pvals(reps);
    for (int r = 0; r < reps; ++r) {
        Substream data = data_src.substream(static_cast<std::uint64_t>(r));
        std::vector<double> null_scores(24);
        for (auto& v : null_scores) v = data.next_double();
        pvals[r] = permutation_test(null_scores, labels, 2000,
                                    RandomSource(2026, "gate/null-test/" + std::to_string(r)))
                       .p;
    }
    std::sort(pvals.begin(), pvals.end());
    double d = 0.0;
    for (int i = 0; i < reps; ++i) {
        const double lo = static_cast<double>(i) / reps;
        const double hi = static_cast<double>(i + 1) / reps;
        d = std::max(d, std::max(pvals[i] - lo, hi - pvals[i]));
    }
    const double d_crit = 1.6276 / std::sqrt(static_cast<double>(reps)); // alpha = 0.01
    require(d < d_crit, "null p-values fail KS uniformity: D = " + fmt(d) +
                            ", critical " + fmt(d_crit));
}

// ---------------------------------------------------------------------------
// 5. Shuffled-label retrieval: analytic expectation 30/240 and a Monte Carlo
//    null that agrees with it.

void check_shuffled_label_expectation() {
    // Class sizes 4,3,3,2,2,2 over 16 items: sum n_c(n_c-1) / (16*15) = 30/240.
    std::vector<std::string> labels;
    const std::vector<std::pair<std::string, int>> sizes = {
        {"a", 4}, {"b", 3}, {"c", 3}, {"d", 2}, {"e", 2}, {"f", 2}};
    for (const auto& [name, n] : sizes)
        for (int i = 0; i < n; ++i) labels.push_back(name);
    require(expected_shuffled_rate(labels) == 0.125,
            "analytic expectation is " + fmt(expected_shuffled_rate(labels)));

    // The bundled descriptor panel has the same class profile.
    const FeatureMatrix X = load_feature_matrix(data_dir() / "embedding" / "descriptors.csv");
    const HarmonicTransform T = load_transform(data_dir() / "embedding" / "transform.csv");
    require(expected_shuffled_rate(X.class_labels) == 0.125,
            "bundled panel expectation is " + fmt(expected_shuffled_rate(X.class_labels)));

    const NullReport nulls =
        null_controls(X, X.class_labels, T, 1, 5000, 2, RandomSource(7, "gate/nulls"));
    require(nulls.label_perms == 5000, "label permutation count not honored");
    require(std::fabs(nulls.shuffled_label_mean - 0.125) <= 0.01,
            "5000-permutation mean " + fmt(nulls.shuffled_label_mean) +
                " is not within 0.01 of 0.125");
}

// ---------------------------------------------------------------------------
// 6. LOPO with fixed weights pools to exactly the whole-panel metrics.

void check_lopo_fixed_identity() {
    struct Case {
        const char* manifest;
        const char* arm;
    };
    const Case cases[] = {
        {"climate_synthetic.json", "full"},
        {"climate_synthetic.json", "single_channel:climate"},
        {"climate_synthetic.json", "combined_fraction"},
        {"exoplanet_synthetic.json", "full"},
        {"exoplanet_synthetic.json", "ablation:follow_up"},
    };
    StatsConfig cfg;
    cfg.seed = 42;
    cfg.permutation_draws = 200;
    cfg.bootstrap_resamples = 100;

    for (const auto& c : cases) {
        const Panel panel = load_panel(data_dir() / "panels" / c.manifest);
        const ComparatorArm arm = arm_from_label(c.arm);
        const EvaluationReport whole = evaluate_score_table(panel, apply_arm(panel, arm), cfg);
        const EvaluationReport lopo = lopo_evaluate(panel, arm, SelectionRule::fixed, cfg);
        require(lopo.auroc == whole.auroc,
                std::string(c.manifest) + " " + c.arm + ": lopo auroc " + fmt(lopo.auroc) +
                    " != whole-panel " + fmt(whole.auroc));
        require(lopo.matched_pair_accuracy == whole.matched_pair_accuracy,
                std::string(c.manifest) + " " + c.arm + ": lopo pair accuracy differs");
    }
}

// ---------------------------------------------------------------------------
// 7. Composite scores stay in [0,1] and are monotone in every flag and lead.

void check_bounds_and_monotonicity() {
    for (Application app : {Application::climate_vector, Application::exoplanet}) {
        const WeightConfig weights = preset_weights(app);
        std::vector<std::string> channels;
        for (const auto& [name, w] : weights.flag_weights) channels.push_back(name);

        Substream s(app == Application::exoplanet ? 0xe40bULL : 0xc11aULL);
        for (int row = 0; row < 10000; ++row) {
            std::map<std::string, bool> flags;
            std::map<std::string, double> leads;
            for (const auto& c : channels) {
                flags[c] = s.next_below(2) == 1;
                leads[c] = s.next_double();
            }
            const double base = composite_score(channels, flags, leads, weights);
            require(base >= -1e-12 && base <= 1.0 + 1e-12,
                    application_name(app) + " row " + std::to_string(row) +
                        " score out of bounds: " + fmt(base));

            for (const auto& c : channels) {
                if (!flags.at(c)) {
                    auto raised = flags;
                    raised[c] = true;
                    require(composite_score(channels, raised, leads, weights) >= base,
                            application_name(app) + ": raising flag " + c + " lowered the score");
                }
                auto longer = leads;
                longer[c] = std::min(1.0, longer[c] + 0.25);
                require(composite_score(channels, flags, longer, weights) >= base,
                        application_name(app) + ": raising lead " + c + " lowered the score");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// 8. Any single-byte tamper is caught; every report's ancestry reaches its
//    panel freeze.

Json bundled_config(const char* name) {
    Json doc = parse_json_strict(read_file(data_dir() / "configs" / name));
    // Configs ship with repo-relative manifest paths.
    doc["manifest"] = (data_dir() / "panels" / fs::path(doc["manifest"].get<std::string>()).filename()).string();
    return doc;
}

void check_tamper_and_ancestry() {
    TempDir tmp;
    ArtifactStore store(tmp.path / "chain");
    store.use_deterministic_ids(99);
    ArtifactMeta meta;
    meta.producer = "gate";
    meta.tool = "acceptance";
    meta.application = "generic";
    meta.schema_version = "1";

    std::vector<std::string> ids;
    std::string prev;
    for (int i = 0; i < 100; ++i) {
        const Json payload = {{"step", i}, {"note", "chained artifact " + std::to_string(i)}};
        const std::vector<std::string> parents = prev.empty() ? std::vector<std::string>{}
                                                              : std::vector<std::string>{prev};
        const PutResult put =
            store.put_artifact(payload, meta, parents, Quality::ok, "chain step " + std::to_string(i));
        prev = put.id;
        ids.push_back(put.id);
    }
    require(store.verify().ok(), "fresh chain store fails verification");

    for (std::size_t i = 0; i < ids.size(); ++i) {
        const std::string hash = *store.hash_of(ids[i]);
        const fs::path object = tmp.path / "chain" / "objects" / hash.substr(0, 2) / (hash + ".json");
        const std::string original = read_file(object);
        std::string tampered = original;
        tampered[(i * 131) % tampered.size()] ^= 0x01;
        write_file(object, tampered);
        require(!store.verify().ok(),
                "tamper in artifact " + std::to_string(i) + " went undetected");
        write_file(object, original);
    }
    require(store.verify().ok(), "store does not verify after restoring originals");

    // Ancestry: the final report of each bundled run must descend from the
    // panel freeze.
    int n = 0;
    for (const char* name : {"climate_run.json", "exoplanet_run.json"}) {
        Json doc = bundled_config(name);
        doc["permutation_draws"] = 200;
        doc["bootstrap_resamples"] = 100;
        ArtifactStore run_store(tmp.path / ("run-" + std::to_string(n++)));
        const RunRecord record = run_workflow(doc, run_store);
        require(record.exit_code == 0, std::string(name) + " run failed: " + record.exit_status);
        const ProvenanceGraph graph = build_graph(run_store);
        const std::set<std::string> up = ancestors(graph, record.report_id);
        require(up.count(record.freeze_id) == 1,
                std::string(name) + ": report ancestry misses the panel freeze");
    }
}

// ---------------------------------------------------------------------------
// 9. Two runs of the bundled config produce byte-identical stores.

std::map<std::string, std::string> object_bytes(const ArtifactStore& store) {
    std::map<std::string, std::string> bytes;
    for (const auto& id : store.ids()) {
        const std::string hash = *store.hash_of(id);
        bytes[hash] =
            read_file(store.root() / "objects" / hash.substr(0, 2) / (hash + ".json"));
    }
    return bytes;
}

void check_rerun_determinism() {
    const Json doc = bundled_config("climate_run.json");

    TempDir tmp;
    ArtifactStore first(tmp.path / "first");
    const RunRecord a = run_workflow(doc, first);
    ArtifactStore second(tmp.path / "second");
    const RunRecord b = run_workflow(doc, second);

    require(a.exit_code == 0 && b.exit_code == 0, "bundled run failed");
    require(run_record_to_json(a) == run_record_to_json(b), "run records differ across runs");
    require(first.hash_of(a.report_id) == second.hash_of(b.report_id),
            "report digests differ across runs");
    require(object_bytes(first) == object_bytes(second), "stored object bytes differ across runs");
    require(render_report(first, a.report_id, "json") == render_report(second, b.report_id, "json"),
            "rendered reports differ across runs");
}

// ---------------------------------------------------------------------------
// 10. Replication against the published row-level panels, when present.

void check_published_replication() {
    fs::path dir = data_dir() / "external";
    if (const char* env = std::getenv("BENCH_EXTERNAL_DIR")) dir = env;
    const fs::path climate = dir / "climate_panel.json";
    const fs::path exoplanet = dir / "exoplanet_panel.json";
    if (!fs::exists(climate) || !fs::exists(exoplanet))
        throw CheckSkipped{"published panels not found under " + dir.string() +
                           " (set BENCH_EXTERNAL_DIR to their directory)"};

    StatsConfig cfg;
    cfg.seed = 42;
    const auto evaluate = [&](const Panel& panel, const std::string& arm) {
        return evaluate_score_table(panel, apply_arm(panel, arm_from_label(arm)), cfg);
    };
    const auto close = [](double got, double want) { return std::fabs(got - want) <= 1e-3; };

    const Panel climate_panel = load_panel(climate);
    const EvaluationReport c = evaluate(climate_panel, "full");
    require(close(c.auroc, 0.944), "climate auroc " + fmt(c.auroc) + ", expected 0.944");
    require(close(c.matched_pair_accuracy, 0.917),
            "climate pair accuracy " + fmt(c.matched_pair_accuracy) + ", expected 0.917");

    const Panel exo_panel = load_panel(exoplanet);
    const EvaluationReport e = evaluate(exo_panel, "full");
    require(close(e.auroc, 0.955), "exoplanet auroc " + fmt(e.auroc) + ", expected 0.955");
    require(close(e.matched_pair_accuracy, 1.000),
            "exoplanet pair accuracy " + fmt(e.matched_pair_accuracy) + ", expected 1.000");

    const EvaluationReport dropped = evaluate(exo_panel, "ablation:follow_up");
    require(close(dropped.auroc, 0.851),
            "exoplanet auroc without follow-up " + fmt(dropped.auroc) + ", expected 0.851");
}

} // namespace

int main() {
    struct Check {
        int number;
        const char* name;
        std::function<void()> run;
        double budget_seconds; // 0 = untimed
    };
    const std::vector<Check> checks = {
        {1, "canonical digests ignore key order", check_digest_key_order, 5.0},
        {2, "auroc matches a brute-force oracle", check_auroc_oracle, 10.0},
        {3, "preset full-evidence scores reach 1.0", check_preset_full_evidence, 0.0},
        {4, "permutation p floor and null uniformity", check_permutation_floor_and_uniformity, 30.0},
        {5, "shuffled-label retrieval expectation", check_shuffled_label_expectation, 20.0},
        {6, "lopo fixed-weight identity", check_lopo_fixed_identity, 0.0},
        {7, "composite score bounds and monotonicity", check_bounds_and_monotonicity, 0.0},
        {8, "tamper detection and report ancestry", check_tamper_and_ancestry, 0.0},
        {9, "rerun produces identical artifacts", check_rerun_determinism, 60.0},
        {10, "published panel replication", check_published_replication, 0.0},
    };

    int failed = 0;
    int skipped = 0;
    for (const auto& check : checks) {
        const auto start = std::chrono::steady_clock::now();
        std::string status = "PASS";
        std::string note;
        try {
            check.run();
        } catch (const CheckSkipped& s) {
            status = "SKIP";
            note = s.reason;
        } catch (const CheckFailure& f) {
            status = "FAIL";
            note = f.detail;
        } catch (const std::exception& e) {
            status = "FAIL";
            note = e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (status == "PASS" && check.budget_seconds > 0.0 && seconds > check.budget_seconds) {
            status = "FAIL";
            note = "exceeded " + fmt(check.budget_seconds) + "s budget";
        }
        if (status == "FAIL") ++failed;
        if (status == "SKIP") ++skipped;
        std::printf("[%s] %2d %s (%.2fs)%s%s\n", status.c_str(), check.number, check.name, seconds,
                    note.empty() ? "" : ": ", note.c_str());
    }
    std::printf("%d passed, %d failed, %d skipped\n",
                static_cast<int>(checks.size()) - failed - skipped, failed, skipped);
    return failed == 0 ? 0 : 1;
}
