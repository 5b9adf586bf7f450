#pragma once

// Derivation DAG over stored artifacts. Edges point from a derived artifact
// to the upstream artifact it consumed; topological listings reverse this so
// roots come first. Graphs are immutable snapshots; rebuild after writes.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "provbench/store.hpp"

namespace provbench {

struct ProvenanceGraph {
    std::set<std::string> nodes;
    std::set<std::pair<std::string, std::string>> edges; // derived -> upstream
    std::map<std::string, std::string> node_hashes;
};

struct LineageRow {
    std::string id;
    std::string hash;
    std::string producer;
    std::string tool;
    std::string summary;
};

ProvenanceGraph build_graph(const ArtifactStore& store);

// Transitive upstream closure, excluding id itself.
std::set<std::string> ancestors(const ProvenanceGraph& graph, const std::string& id);

// Full graph in topological order, roots first, ties broken by id.
std::vector<std::string> topological_order(const ProvenanceGraph& graph);

std::vector<LineageRow> lineage_report(const ProvenanceGraph& graph, const ArtifactStore& store,
                                       const std::string& id);

// format is "dot" or "json"; json round-trips through import_graph.
std::string export_graph(const ProvenanceGraph& graph, const std::string& format);
ProvenanceGraph import_graph(const std::string& json_text);

} // namespace provbench
