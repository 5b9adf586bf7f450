#include "provbench/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "provbench/canonical.hpp"
#include "provbench/errors.hpp"

namespace provbench {

namespace {

const char* kuhn_arm_name(ArmKind kind) {
    switch (kind) {
    case ArmKind::kuhn_equal_weight: return "kuhn_equal_weight";
    case ArmKind::kuhn_lead_only: return "kuhn_lead_only";
    case ArmKind::kuhn_detection_only: return "kuhn_detection_only";
    case ArmKind::kuhn_sig_incomm: return "kuhn_sig_incomm";
    case ArmKind::kuhn_incomm_only: return "kuhn_incomm_only";
    default: return nullptr;
    }
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, sep)) parts.push_back(part);
    return parts;
}

} // namespace

std::string arm_label(const ComparatorArm& arm) {
    switch (arm.kind) {
    case ArmKind::full: return "full";
    case ArmKind::combined_fraction: return "combined_fraction";
    case ArmKind::single_channel: return "single_channel:" + arm.channel;
    case ArmKind::ablation: {
        std::string out = "ablation:";
        bool first = true;
        for (const auto& c : arm.dropped) {
            if (!first) out += ',';
            out += c;
            first = false;
        }
        return out;
    }
    default: return kuhn_arm_name(arm.kind);
    }
}

ComparatorArm arm_from_label(const std::string& label) {
    ComparatorArm arm;
    if (label == "full") return arm;
    if (label == "combined_fraction") {
        arm.kind = ArmKind::combined_fraction;
        return arm;
    }
    for (ArmKind k : {ArmKind::kuhn_equal_weight, ArmKind::kuhn_lead_only,
                      ArmKind::kuhn_detection_only, ArmKind::kuhn_sig_incomm,
                      ArmKind::kuhn_incomm_only}) {
        if (label == kuhn_arm_name(k)) {
            arm.kind = k;
            return arm;
        }
    }
    if (label.rfind("single_channel:", 0) == 0) {
        arm.kind = ArmKind::single_channel;
        arm.channel = label.substr(15);
        if (arm.channel.empty())
            throw Error(ErrorKind::SchemaError, "single_channel arm needs a channel name");
        return arm;
    }
    if (label.rfind("ablation:", 0) == 0) {
        arm.kind = ArmKind::ablation;
        for (const auto& c : split(label.substr(9), ','))
            if (!c.empty()) arm.dropped.insert(c);
        if (arm.dropped.empty())
            throw Error(ErrorKind::SchemaError, "ablation arm needs dropped channels");
        return arm;
    }
    throw Error(ErrorKind::SchemaError, "unknown comparator arm: " + label);
}

WeightConfig weights_from_json(const Json& doc) {
    if (!doc.is_object() || !doc.contains("flag_weights") || !doc.contains("lead_weights"))
        throw Error(ErrorKind::SchemaError, "weights need flag_weights and lead_weights");
    WeightConfig w;
    try {
        if (auto label = doc.find("label"); label != doc.end())
            w.label = label->get<std::string>();
        for (const auto& [channel, value] : doc.at("flag_weights").items())
            w.flag_weights[channel] = value.get<double>();
        for (const auto& [channel, value] : doc.at("lead_weights").items())
            w.lead_weights[channel] = value.get<double>();
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::SchemaError, std::string("malformed weights: ") + e.what());
    }
    return w;
}

Json weights_to_json(const WeightConfig& weights) {
    Json doc = Json::object();
    doc["label"] = weights.label;
    Json flags = Json::object();
    for (const auto& [channel, w] : weights.flag_weights) flags[channel] = w;
    Json leads = Json::object();
    for (const auto& [channel, g] : weights.lead_weights) leads[channel] = g;
    doc["flag_weights"] = flags;
    doc["lead_weights"] = leads;
    return doc;
}

double lead_time(int recognition_year, std::optional<int> first_signal_year, int window_years) {
    if (window_years <= 0)
        throw Error(ErrorKind::NonPositiveWindow, "window_years must be positive");
    if (!first_signal_year) return 0.0;
    const double raw =
        std::max(0.0, static_cast<double>(recognition_year - *first_signal_year)) / window_years;
    return std::min(raw, 1.0);
}

void check_weights(const WeightConfig& weights, const std::vector<std::string>& channels) {
    if (weights.flag_weights.size() != channels.size() ||
        weights.lead_weights.size() != channels.size())
        throw Error(ErrorKind::ChannelMismatch, "weight channels do not match the panel");
    for (const auto& c : channels) {
        auto w = weights.flag_weights.find(c);
        auto g = weights.lead_weights.find(c);
        if (w == weights.flag_weights.end() || g == weights.lead_weights.end())
            throw Error(ErrorKind::ChannelMismatch, "weights missing channel " + c);
        if (!std::isfinite(w->second) || !std::isfinite(g->second))
            throw Error(ErrorKind::NonFiniteNumber, "non-finite weight for channel " + c);
        if (w->second < 0.0 || g->second < 0.0)
            throw Error(ErrorKind::SchemaError, "negative weight for channel " + c);
    }
}

double composite_score(const std::vector<std::string>& channels,
                       const std::map<std::string, bool>& flags,
                       const std::map<std::string, double>& leads, const WeightConfig& weights) {
    check_weights(weights, channels);
    if (flags.size() != channels.size() || leads.size() != channels.size())
        throw Error(ErrorKind::ChannelMismatch, "flag or lead channels do not match the panel");
    double score = 0.0;
    for (const auto& c : channels) {
        auto f = flags.find(c);
        auto l = leads.find(c);
        if (f == flags.end() || l == leads.end())
            throw Error(ErrorKind::ChannelMismatch, "flags or leads missing channel " + c);
        score += weights.flag_weights.at(c) * (f->second ? 1.0 : 0.0);
        score += weights.lead_weights.at(c) * l->second;
    }
    return score;
}

double combined_fraction(const std::vector<bool>& flags) {
    if (flags.empty()) throw Error(ErrorKind::EmptyChannelSet, "no channels to combine");
    std::size_t detected = 0;
    for (bool f : flags) detected += f ? 1 : 0;
    return static_cast<double>(detected) / static_cast<double>(flags.size());
}

WeightConfig preset_weights(Application application) {
    WeightConfig w;
    if (application == Application::climate_vector) {
        w.label = "climate_vector_preset";
        w.flag_weights = {{"climate", 0.20}, {"ecology", 0.20}, {"epidemiology", 0.20}};
        w.lead_weights = {{"climate", 0.15}, {"ecology", 0.15}, {"epidemiology", 0.10}};
        return w;
    }
    if (application == Application::exoplanet) {
        w.label = "exoplanet_preset";
        w.flag_weights = {{"transit_shape", 0.25},
                          {"stellar_context", 0.25},
                          {"archival", 0.20},
                          {"follow_up", 0.20}};
        w.lead_weights = {{"transit_shape", 0.025},
                          {"stellar_context", 0.025},
                          {"archival", 0.025},
                          {"follow_up", 0.025}};
        return w;
    }
    throw Error(ErrorKind::NoPreset,
                "no preset weights for application " + application_name(application));
}

namespace {

double weighted_item_score(const Panel& panel, const PanelItem& item, const WeightConfig& weights) {
    std::map<std::string, bool> flags;
    std::map<std::string, double> leads;
    for (const auto& name : panel.channels) {
        const auto& ev = item.channels.at(name);
        flags[name] = ev.detected;
        leads[name] =
            lead_time(item.recognition_year, ev.first_signal_year, item.window_years);
    }
    return composite_score(panel.channels, flags, leads, weights);
}

double kuhn_arm_score(const PanelItem& item, ArmKind kind) {
    const auto f = kuhn_features(item);
    switch (kind) {
    case ArmKind::kuhn_equal_weight: return (f[0] + f[1] + f[2] + f[3] + f[4]) / 5.0;
    case ArmKind::kuhn_lead_only: return f[1];
    case ArmKind::kuhn_detection_only: return f[0];
    case ArmKind::kuhn_sig_incomm: return (f[3] + f[4]) / 2.0;
    case ArmKind::kuhn_incomm_only: return f[4];
    default: throw Error(ErrorKind::KindMismatch, "not a kuhn arm");
    }
}

WeightConfig resolve_weights(const Panel& panel, const ComparatorArm& arm,
                             const std::optional<WeightConfig>& explicit_weights) {
    WeightConfig base;
    if (explicit_weights) {
        base = *explicit_weights;
    } else {
        try {
            base = preset_weights(panel.application);
        } catch (const Error&) {
            throw Error(ErrorKind::MissingWeights,
                        "panel " + panel.panel_id + " has no preset; pass explicit weights");
        }
    }
    check_weights(base, panel.channels);

    if (arm.kind == ArmKind::single_channel) {
        if (std::find(panel.channels.begin(), panel.channels.end(), arm.channel) ==
            panel.channels.end())
            throw Error(ErrorKind::ChannelMismatch, "unknown channel " + arm.channel);
        WeightConfig solo;
        solo.label = base.label + "/" + arm.channel;
        const double w = base.flag_weights.at(arm.channel);
        const double g = base.lead_weights.at(arm.channel);
        const double total = w + g;
        for (const auto& c : panel.channels) {
            solo.flag_weights[c] = 0.0;
            solo.lead_weights[c] = 0.0;
        }
        if (total > 0.0) {
            solo.flag_weights[arm.channel] = w / total;
            solo.lead_weights[arm.channel] = g / total;
        }
        return solo;
    }
    if (arm.kind == ArmKind::ablation) {
        for (const auto& c : arm.dropped)
            if (std::find(panel.channels.begin(), panel.channels.end(), c) == panel.channels.end())
                throw Error(ErrorKind::ChannelMismatch, "unknown channel " + c);
        WeightConfig cut = base;
        cut.label = base.label + "/ablated";
        for (const auto& c : arm.dropped) {
            cut.flag_weights[c] = 0.0;
            cut.lead_weights[c] = 0.0;
        }
        return cut;
    }
    return base;
}

} // namespace

ScoreTable apply_arm(const Panel& panel, const ComparatorArm& arm,
                     const std::optional<WeightConfig>& weights) {
    ScoreTable table;
    table.panel_id = panel.panel_id;
    table.arm = arm_label(arm);

    const bool weighted = arm.kind == ArmKind::full || arm.kind == ArmKind::single_channel ||
                          arm.kind == ArmKind::ablation;
    std::optional<WeightConfig> resolved;
    if (weighted) resolved = resolve_weights(panel, arm, weights);

    for (const auto& item : panel.items) {
        double score = 0.0;
        if (weighted) {
            score = weighted_item_score(panel, item, *resolved);
        } else if (arm.kind == ArmKind::combined_fraction) {
            std::vector<bool> flags;
            for (const auto& name : panel.channels)
                flags.push_back(item.channels.at(name).detected);
            score = combined_fraction(flags);
        } else {
            score = kuhn_arm_score(item, arm.kind);
        }
        table.scores[item.item_id] = score;
    }

    std::map<std::string, PairScores> by_pair;
    for (const auto& item : panel.items) {
        auto& entry = by_pair[item.pair_id];
        entry.pair_id = item.pair_id;
        (item.label == Label::positive ? entry.positive : entry.control) =
            table.scores.at(item.item_id);
    }
    for (auto& [pair_id, entry] : by_pair) table.pairs.push_back(entry);
    return table;
}

Json score_table_to_json(const ScoreTable& table) {
    Json doc = Json::object();
    doc["panel_id"] = table.panel_id;
    doc["arm"] = table.arm;
    Json scores = Json::object();
    for (const auto& [item_id, score] : table.scores) scores[item_id] = score;
    doc["scores"] = scores;
    Json pairs = Json::array();
    for (const auto& p : table.pairs) {
        Json entry = Json::object();
        entry["pair_id"] = p.pair_id;
        entry["positive"] = p.positive;
        entry["control"] = p.control;
        pairs.push_back(entry);
    }
    doc["pairs"] = pairs;
    return doc;
}

ScoreTable score_table_from_json(const Json& doc) {
    ScoreTable table;
    try {
        table.panel_id = doc.at("panel_id").get<std::string>();
        table.arm = doc.at("arm").get<std::string>();
        for (const auto& [item_id, score] : doc.at("scores").items())
            table.scores[item_id] = score.get<double>();
        for (const auto& p : doc.at("pairs"))
            table.pairs.push_back({p.at("pair_id").get<std::string>(),
                                   p.at("positive").get<double>(),
                                   p.at("control").get<double>()});
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::SchemaError, std::string("malformed score table: ") + e.what());
    }
    return table;
}

std::string score_table_csv(const Panel& panel, const ScoreTable& table) {
    std::ostringstream out;
    out << "item_id,label,pair_id,arm,score\n";
    for (const auto& item : panel.items) {
        auto it = table.scores.find(item.item_id);
        if (it == table.scores.end())
            throw Error(ErrorKind::ChannelMismatch, "score table misses item " + item.item_id);
        out << item.item_id << ',' << label_name(item.label) << ',' << item.pair_id << ','
            << table.arm << ',' << canonical_number(it->second) << '\n';
    }
    return out.str();
}

PutResult store_score_table(ArtifactStore& store, const ScoreTable& table,
                            const std::vector<std::string>& parents, const ArtifactMeta& meta) {
    std::ostringstream summary;
    summary << "score table for panel " << table.panel_id << ", arm " << table.arm << ", "
            << table.scores.size() << " items";
    return store.put_artifact(score_table_to_json(table), meta, parents, Quality::ok,
                              summary.str());
}

double briere_rate(double temperature_c, const BriereParams& params) {
    if (!(params.T0 < params.Tmax))
        throw Error(ErrorKind::SchemaError, "briere parameters need T0 < Tmax");
    if (temperature_c < params.T0 || temperature_c > params.Tmax) return 0.0;
    return params.scale * temperature_c * (temperature_c - params.T0) *
           std::sqrt(params.Tmax - temperature_c);
}

} // namespace provbench
