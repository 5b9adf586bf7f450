#pragma once

// Matched benchmark panels: ingestion (JSON manifest or flattened CSV),
// invariant checks, non-fatal validation warnings, freezing into the store,
// and per-item feature derivation. Panels are immutable after load.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "provbench/store.hpp"

namespace provbench {

enum class Label { positive, control };

enum class Application { climate_vector, exoplanet, paradigm_shift, generic, embedding };

std::string label_name(Label label);
Label label_from_name(const std::string& name);
std::string application_name(Application app);
Application application_from_name(const std::string& name);

struct ChannelEvidence {
    bool detected = false;
    std::optional<int> first_signal_year; // only meaningful when detected
};

struct KuhnSummary {
    bool detected = false;
    double lead_years = 0.0;
    double significance = 1.0;       // p_i in [0,1]
    double incommensurability = 0.0; // q_i in [0,1]
};

struct PanelItem {
    std::string item_id;
    Label label = Label::control;
    std::string pair_id;
    int recognition_year = 0;
    int window_years = 1;
    std::map<std::string, ChannelEvidence> channels;
    Json context = Json::object();
    std::optional<KuhnSummary> kuhn_summary;
};

struct Panel {
    std::string panel_id;
    Application application = Application::generic;
    std::vector<std::string> channels; // fixed order shared by all items
    std::vector<PanelItem> items;
    int n_pairs = 0;
};

// Dispatches on extension: .json -> manifest, .csv -> flattened items table
// (CSV carries no panel header, so panel_id and application must be given).
Panel load_panel(const std::filesystem::path& manifest);
Panel load_panel_csv(const std::filesystem::path& table, const std::string& panel_id,
                     const std::string& application);

Panel panel_from_json(const Json& doc);
Json panel_to_json(const Panel& panel);

// Non-fatal findings: leads that will clamp to zero, undetectable positives,
// window mismatches within a pair, unclamped kuhn normalizers.
std::vector<std::string> validate_panel(const Panel& panel);

PutResult freeze_panel(const Panel& panel, ArtifactStore& store, const ArtifactMeta& meta);

// x_i = (d, L/W, L/5, 1-p, q); components 2 and 3 clamped to [0,1].
std::array<double, 5> kuhn_features(const PanelItem& item);

} // namespace provbench
