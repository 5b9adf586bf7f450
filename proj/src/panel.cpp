#include "provbench/panel.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "csv.hpp"
#include "provbench/canonical.hpp"
#include "provbench/errors.hpp"

namespace provbench {

std::string label_name(Label label) {
    return label == Label::positive ? "positive" : "control";
}

Label label_from_name(const std::string& name) {
    if (name == "positive") return Label::positive;
    if (name == "control") return Label::control;
    throw Error(ErrorKind::SchemaError, "unknown label: " + name);
}

std::string application_name(Application app) {
    switch (app) {
    case Application::climate_vector: return "climate_vector";
    case Application::exoplanet: return "exoplanet";
    case Application::paradigm_shift: return "paradigm_shift";
    case Application::generic: return "generic";
    case Application::embedding: return "embedding";
    }
    throw Error(ErrorKind::SchemaError, "invalid application value");
}

Application application_from_name(const std::string& name) {
    if (name == "climate_vector") return Application::climate_vector;
    if (name == "exoplanet") return Application::exoplanet;
    if (name == "paradigm_shift") return Application::paradigm_shift;
    if (name == "generic") return Application::generic;
    if (name == "embedding") return Application::embedding;
    throw Error(ErrorKind::SchemaError, "unknown application: " + name);
}

namespace {

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

int require_int(const Json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number_integer())
        throw Error(ErrorKind::SchemaError, where + ": missing or non-integer " + key);
    return it->get<int>();
}

std::string require_str(const Json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string())
        throw Error(ErrorKind::SchemaError, where + ": missing or non-string " + key);
    return it->get<std::string>();
}

double require_unit_interval(const Json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number())
        throw Error(ErrorKind::SchemaError, where + ": missing or non-numeric " + key);
    const double v = it->get<double>();
    if (v < 0.0 || v > 1.0)
        throw Error(ErrorKind::SchemaError, where + ": " + key + " must lie in [0,1]");
    return v;
}

KuhnSummary parse_kuhn(const Json& obj, const std::string& where) {
    KuhnSummary k;
    auto d = obj.find("detected");
    if (d == obj.end() || !d->is_boolean())
        throw Error(ErrorKind::SchemaError, where + ": missing or non-boolean detected");
    k.detected = d->get<bool>();
    auto lead = obj.find("lead_years");
    if (lead == obj.end() || !lead->is_number())
        throw Error(ErrorKind::SchemaError, where + ": missing or non-numeric lead_years");
    k.lead_years = lead->get<double>();
    if (k.lead_years < 0.0)
        throw Error(ErrorKind::SchemaError, where + ": lead_years must be non-negative");
    k.significance = require_unit_interval(obj, "significance", where);
    k.incommensurability = require_unit_interval(obj, "incommensurability", where);
    return k;
}

// Cross-item invariants shared by the JSON and CSV paths.
void finalize_panel(Panel& panel, std::optional<int> declared_pairs) {
    std::set<std::string> ids;
    for (const auto& item : panel.items)
        if (!ids.insert(item.item_id).second)
            throw Error(ErrorKind::DuplicateId, "duplicate item_id: " + item.item_id);

    std::map<std::string, std::pair<int, int>> pair_counts; // pair_id -> (pos, ctl)
    for (const auto& item : panel.items) {
        auto& counts = pair_counts[item.pair_id];
        (item.label == Label::positive ? counts.first : counts.second) += 1;
    }
    for (const auto& [pair_id, counts] : pair_counts)
        if (counts.first != 1 || counts.second != 1)
            throw Error(ErrorKind::UnpairedItem,
                        "pair " + pair_id + " must hold exactly one positive and one control");

    panel.n_pairs = static_cast<int>(pair_counts.size());
    if (declared_pairs && *declared_pairs != panel.n_pairs)
        throw Error(ErrorKind::SchemaError, "n_pairs does not match the pairs present");
}

bool parse_bool(const std::string& text, const std::string& where) {
    if (text == "1" || text == "true") return true;
    if (text == "0" || text == "false") return false;
    throw Error(ErrorKind::SchemaError, where + ": not a boolean: " + text);
}

int parse_int(const std::string& text, const std::string& where) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorKind::SchemaError, where + ": not an integer: " + text);
    }
}

double parse_double(const std::string& text, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorKind::SchemaError, where + ": not a number: " + text);
    }
}

} // namespace

Panel panel_from_json(const Json& doc) {
    if (!doc.is_object()) throw Error(ErrorKind::SchemaError, "panel manifest must be an object");
    Panel panel;
    panel.panel_id = require_str(doc, "panel_id", "panel");
    panel.application = application_from_name(require_str(doc, "application", "panel"));

    auto channels_it = doc.find("channels");
    if (channels_it == doc.end() || !channels_it->is_array())
        throw Error(ErrorKind::SchemaError, "panel: missing channels list");
    std::set<std::string> declared;
    for (const auto& c : *channels_it) {
        if (!c.is_string()) throw Error(ErrorKind::SchemaError, "panel: channel names must be strings");
        const std::string name = c.get<std::string>();
        if (!declared.insert(name).second)
            throw Error(ErrorKind::SchemaError, "panel: duplicate channel " + name);
        panel.channels.push_back(name);
    }

    auto items_it = doc.find("items");
    if (items_it == doc.end() || !items_it->is_array())
        throw Error(ErrorKind::SchemaError, "panel: missing items list");
    for (const auto& item_doc : *items_it) {
        if (!item_doc.is_object())
            throw Error(ErrorKind::SchemaError, "panel: items must be objects");
        PanelItem item;
        item.item_id = require_str(item_doc, "item_id", "item");
        const std::string where = "item " + item.item_id;
        item.label = label_from_name(require_str(item_doc, "label", where));
        item.pair_id = require_str(item_doc, "pair_id", where);
        item.recognition_year = require_int(item_doc, "recognition_year", where);
        item.window_years = require_int(item_doc, "window_years", where);
        if (item.window_years <= 0)
            throw Error(ErrorKind::SchemaError, where + ": window_years must be positive");

        auto ch_it = item_doc.find("channels");
        const Json ch_doc = ch_it == item_doc.end() ? Json::object() : *ch_it;
        if (!ch_doc.is_object())
            throw Error(ErrorKind::SchemaError, where + ": channels must be an object");
        for (const auto& [name, evidence] : ch_doc.items()) {
            if (!declared.count(name))
                throw Error(ErrorKind::UnknownChannel, where + ": undeclared channel " + name);
            if (!evidence.is_object())
                throw Error(ErrorKind::SchemaError, where + ": channel " + name + " must be an object");
            ChannelEvidence ev;
            auto det = evidence.find("detected");
            if (det == evidence.end() || !det->is_boolean())
                throw Error(ErrorKind::SchemaError,
                            where + ": channel " + name + " needs boolean detected");
            ev.detected = det->get<bool>();
            if (auto fsy = evidence.find("first_signal_year"); fsy != evidence.end()) {
                if (!fsy->is_number_integer())
                    throw Error(ErrorKind::SchemaError,
                                where + ": first_signal_year must be an integer year");
                if (ev.detected) ev.first_signal_year = fsy->get<int>();
            }
            item.channels[name] = ev;
        }
        for (const auto& name : panel.channels)
            if (!item.channels.count(name))
                throw Error(ErrorKind::SchemaError, where + ": missing channel " + name);

        if (auto ctx = item_doc.find("context"); ctx != item_doc.end()) item.context = *ctx;

        const bool wants_kuhn = panel.application == Application::paradigm_shift;
        auto kuhn = item_doc.find("kuhn_summary");
        if (wants_kuhn && kuhn == item_doc.end())
            throw Error(ErrorKind::SchemaError, where + ": paradigm_shift items need kuhn_summary");
        if (!wants_kuhn && kuhn != item_doc.end())
            throw Error(ErrorKind::SchemaError,
                        where + ": kuhn_summary only belongs to paradigm_shift panels");
        if (kuhn != item_doc.end()) item.kuhn_summary = parse_kuhn(*kuhn, where);

        panel.items.push_back(std::move(item));
    }

    std::optional<int> declared_pairs;
    if (auto np = doc.find("n_pairs"); np != doc.end()) {
        if (!np->is_number_integer())
            throw Error(ErrorKind::SchemaError, "panel: n_pairs must be an integer");
        declared_pairs = np->get<int>();
    }
    finalize_panel(panel, declared_pairs);
    return panel;
}

Json panel_to_json(const Panel& panel) {
    Json doc = Json::object();
    doc["panel_id"] = panel.panel_id;
    doc["application"] = application_name(panel.application);
    doc["channels"] = panel.channels;
    doc["n_pairs"] = panel.n_pairs;
    Json items = Json::array();
    for (const auto& item : panel.items) {
        Json item_doc = Json::object();
        item_doc["item_id"] = item.item_id;
        item_doc["label"] = label_name(item.label);
        item_doc["pair_id"] = item.pair_id;
        item_doc["recognition_year"] = item.recognition_year;
        item_doc["window_years"] = item.window_years;
        Json channels = Json::object();
        for (const auto& [name, ev] : item.channels) {
            Json ev_doc = Json::object();
            ev_doc["detected"] = ev.detected;
            if (ev.first_signal_year) ev_doc["first_signal_year"] = *ev.first_signal_year;
            channels[name] = ev_doc;
        }
        item_doc["channels"] = channels;
        if (!item.context.is_object() || !item.context.empty()) item_doc["context"] = item.context;
        if (item.kuhn_summary) {
            Json k = Json::object();
            k["detected"] = item.kuhn_summary->detected;
            k["lead_years"] = item.kuhn_summary->lead_years;
            k["significance"] = item.kuhn_summary->significance;
            k["incommensurability"] = item.kuhn_summary->incommensurability;
            item_doc["kuhn_summary"] = k;
        }
        items.push_back(item_doc);
    }
    doc["items"] = items;
    return doc;
}

Panel load_panel(const std::filesystem::path& manifest) {
    const std::string ext = manifest.extension().string();
    if (ext == ".csv")
        throw Error(ErrorKind::Usage, "csv tables need an explicit panel_id and application");
    return panel_from_json(parse_json_strict(detail::slurp(manifest)));
}

Panel load_panel_csv(const std::filesystem::path& table, const std::string& panel_id,
                     const std::string& application) {
    const auto rows = detail::parse_csv(detail::slurp(table));
    if (rows.empty()) throw Error(ErrorKind::SchemaError, "empty csv table");
    const auto& header = rows.front();

    Panel panel;
    panel.panel_id = panel_id;
    panel.application = application_from_name(application);

    struct Column {
        enum Kind { base, channel_detected, channel_year, kuhn } kind = base;
        std::string name; // base field, channel name, or kuhn field
    };
    std::vector<Column> columns;
    std::map<std::string, std::size_t> base_at;
    const std::set<std::string> base_fields = {"item_id", "label", "pair_id", "recognition_year",
                                               "window_years"};
    const std::set<std::string> kuhn_fields = {"detected", "lead_years", "significance",
                                               "incommensurability"};
    std::set<std::string> seen_channels;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string& name = header[c];
        Column col;
        if (base_fields.count(name)) {
            col.kind = Column::base;
            col.name = name;
            base_at[name] = c;
        } else if (name.rfind("channels.", 0) == 0) {
            const std::string rest = name.substr(9);
            const auto dot = rest.rfind('.');
            if (dot == std::string::npos)
                throw Error(ErrorKind::SchemaError, "bad channel column: " + name);
            const std::string channel = rest.substr(0, dot);
            const std::string field = rest.substr(dot + 1);
            if (field == "detected")
                col.kind = Column::channel_detected;
            else if (field == "first_signal_year")
                col.kind = Column::channel_year;
            else
                throw Error(ErrorKind::SchemaError, "bad channel column: " + name);
            col.name = channel;
            if (seen_channels.insert(channel).second) panel.channels.push_back(channel);
        } else if (name.rfind("kuhn_summary.", 0) == 0) {
            const std::string field = name.substr(13);
            if (!kuhn_fields.count(field))
                throw Error(ErrorKind::SchemaError, "bad kuhn column: " + name);
            if (panel.application != Application::paradigm_shift)
                throw Error(ErrorKind::SchemaError,
                            "kuhn columns only belong to paradigm_shift panels");
            col.kind = Column::kuhn;
            col.name = field;
        } else {
            throw Error(ErrorKind::SchemaError, "unknown csv column: " + name);
        }
        columns.push_back(col);
    }
    for (const auto& field : base_fields)
        if (!base_at.count(field))
            throw Error(ErrorKind::SchemaError, "csv table is missing column " + field);

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size())
            throw Error(ErrorKind::SchemaError,
                        "csv row " + std::to_string(r + 1) + " has wrong field count");
        PanelItem item;
        Json kuhn = Json::object();
        for (std::size_t c = 0; c < columns.size(); ++c) {
            const auto& col = columns[c];
            const std::string& cell = row[c];
            const std::string where = "csv row " + std::to_string(r + 1) + " " + header[c];
            switch (col.kind) {
            case Column::base:
                if (col.name == "item_id") item.item_id = cell;
                else if (col.name == "label") item.label = label_from_name(cell);
                else if (col.name == "pair_id") item.pair_id = cell;
                else if (col.name == "recognition_year") item.recognition_year = parse_int(cell, where);
                else item.window_years = parse_int(cell, where);
                break;
            case Column::channel_detected:
                item.channels[col.name].detected = parse_bool(cell, where);
                break;
            case Column::channel_year:
                if (!cell.empty()) item.channels[col.name].first_signal_year = parse_int(cell, where);
                break;
            case Column::kuhn:
                if (col.name == "detected") kuhn["detected"] = parse_bool(cell, where);
                else kuhn[col.name] = parse_double(cell, where);
                break;
            }
        }
        const std::string where = "item " + item.item_id;
        if (item.window_years <= 0)
            throw Error(ErrorKind::SchemaError, where + ": window_years must be positive");
        for (const auto& name : panel.channels)
            if (!item.channels.count(name))
                throw Error(ErrorKind::SchemaError, where + ": missing channel " + name);
        for (auto& [name, ev] : item.channels)
            if (!ev.detected) ev.first_signal_year.reset();
        if (panel.application == Application::paradigm_shift) {
            if (kuhn.size() != 4)
                throw Error(ErrorKind::SchemaError, where + ": incomplete kuhn_summary columns");
            item.kuhn_summary = parse_kuhn(kuhn, where);
        }
        panel.items.push_back(std::move(item));
    }
    finalize_panel(panel, std::nullopt);
    return panel;
}

std::vector<std::string> validate_panel(const Panel& panel) {
    std::vector<std::string> warnings;
    for (const auto& item : panel.items) {
        int detected = 0;
        for (const auto& name : panel.channels) {
            const auto& ev = item.channels.at(name);
            if (!ev.detected) continue;
            ++detected;
            if (ev.first_signal_year && *ev.first_signal_year > item.recognition_year)
                warnings.push_back("item " + item.item_id + " channel " + name +
                                   ": first signal after recognition year; lead clamps to 0");
        }
        if (item.label == Label::positive && !panel.channels.empty() && detected == 0)
            warnings.push_back("item " + item.item_id + ": positive with no detected channel");
        if (item.kuhn_summary && item.kuhn_summary->lead_years / 5.0 > 1.0) {
            std::ostringstream msg;
            msg << "item " << item.item_id << ": lead normalizer L/5 = "
                << item.kuhn_summary->lead_years / 5.0 << " exceeds 1; clamped";
            warnings.push_back(msg.str());
        }
    }
    std::map<std::string, std::vector<const PanelItem*>> by_pair;
    for (const auto& item : panel.items) by_pair[item.pair_id].push_back(&item);
    for (const auto& [pair_id, members] : by_pair) {
        if (members.size() == 2 && members[0]->window_years != members[1]->window_years)
            warnings.push_back("pair " + pair_id + ": window_years differ (" +
                               std::to_string(members[0]->window_years) + " vs " +
                               std::to_string(members[1]->window_years) + ")");
    }
    return warnings;
}

PutResult freeze_panel(const Panel& panel, ArtifactStore& store, const ArtifactMeta& meta) {
    std::ostringstream summary;
    summary << "frozen panel " << panel.panel_id << ": " << panel.items.size() << " items, "
            << panel.channels.size() << " channels, " << panel.n_pairs << " pairs";
    return store.put_artifact(panel_to_json(panel), meta, {}, Quality::ok, summary.str());
}

std::array<double, 5> kuhn_features(const PanelItem& item) {
    if (!item.kuhn_summary)
        throw Error(ErrorKind::MissingSummary, "item " + item.item_id + " has no kuhn_summary");
    const KuhnSummary& k = *item.kuhn_summary;
    return {k.detected ? 1.0 : 0.0, clamp01(k.lead_years / item.window_years),
            clamp01(k.lead_years / 5.0), 1.0 - k.significance, k.incommensurability};
}

} // namespace provbench
