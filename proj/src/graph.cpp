#include "provbench/graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "provbench/canonical.hpp"
#include "provbench/errors.hpp"

namespace provbench {

namespace {

// Kahn's algorithm over the subset, upstream before derived, smallest id
// among ready nodes first.
std::vector<std::string> topo_subset(const ProvenanceGraph& graph,
                                     const std::set<std::string>& subset) {
    std::map<std::string, int> in_degree;
    std::map<std::string, std::vector<std::string>> dependents; // upstream -> derived
    for (const auto& id : subset) in_degree[id] = 0;
    for (const auto& [derived, upstream] : graph.edges) {
        if (!subset.count(derived) || !subset.count(upstream)) continue;
        ++in_degree[derived];
        dependents[upstream].push_back(derived);
    }
    std::set<std::string> ready;
    for (const auto& [id, deg] : in_degree)
        if (deg == 0) ready.insert(id);

    std::vector<std::string> order;
    order.reserve(subset.size());
    while (!ready.empty()) {
        const std::string id = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(id);
        for (const auto& d : dependents[id])
            if (--in_degree[d] == 0) ready.insert(d);
    }
    if (order.size() != subset.size())
        throw Error(ErrorKind::CycleDetected, "parent links contain a cycle");
    return order;
}

} // namespace

ProvenanceGraph build_graph(const ArtifactStore& store) {
    ProvenanceGraph graph;
    for (const auto& id : store.ids()) {
        const Artifact a = store.get_artifact(id);
        graph.nodes.insert(id);
        graph.node_hashes[id] = a.hash;
        for (const auto& p : a.parents) {
            if (!store.contains(p))
                throw Error(ErrorKind::DanglingParent, id + " references missing parent " + p);
            graph.edges.emplace(id, p);
        }
    }
    topo_subset(graph, graph.nodes); // throws CycleDetected on tampered stores
    return graph;
}

std::set<std::string> ancestors(const ProvenanceGraph& graph, const std::string& id) {
    if (!graph.nodes.count(id)) throw Error(ErrorKind::NotInGraph, "not in graph: " + id);
    std::map<std::string, std::vector<std::string>> parents_of;
    for (const auto& [derived, upstream] : graph.edges) parents_of[derived].push_back(upstream);

    std::set<std::string> seen;
    std::deque<std::string> queue{id};
    while (!queue.empty()) {
        const std::string cur = queue.front();
        queue.pop_front();
        for (const auto& p : parents_of[cur])
            if (seen.insert(p).second) queue.push_back(p);
    }
    seen.erase(id);
    return seen;
}

std::vector<std::string> topological_order(const ProvenanceGraph& graph) {
    return topo_subset(graph, graph.nodes);
}

std::vector<LineageRow> lineage_report(const ProvenanceGraph& graph, const ArtifactStore& store,
                                       const std::string& id) {
    std::set<std::string> subset = ancestors(graph, id);
    subset.insert(id);
    std::vector<LineageRow> rows;
    for (const auto& node : topo_subset(graph, subset)) {
        const Artifact a = store.get_artifact(node);
        rows.push_back({a.id, a.hash, a.metadata.producer, a.metadata.tool, a.summary});
    }
    return rows;
}

std::string export_graph(const ProvenanceGraph& graph, const std::string& format) {
    if (format == "json") {
        Json nodes = Json::array();
        for (const auto& id : graph.nodes) {
            Json node = Json::object();
            node["id"] = id;
            auto it = graph.node_hashes.find(id);
            node["hash"] = it != graph.node_hashes.end() ? it->second : "";
            nodes.push_back(node);
        }
        Json edges = Json::array();
        for (const auto& [from, to] : graph.edges) edges.push_back(Json::array({from, to}));
        Json doc = Json::object();
        doc["nodes"] = nodes;
        doc["edges"] = edges;
        return canonicalize(doc);
    }
    if (format == "dot") {
        std::ostringstream out;
        out << "digraph provenance {\n";
        for (const auto& id : graph.nodes) out << "  \"" << id << "\";\n";
        for (const auto& [from, to] : graph.edges)
            out << "  \"" << from << "\" -> \"" << to << "\";\n";
        out << "}\n";
        return out.str();
    }
    throw Error(ErrorKind::UnsupportedFormat, "unsupported graph format: " + format);
}

ProvenanceGraph import_graph(const std::string& json_text) {
    const Json doc = parse_json_strict(json_text);
    if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges"))
        throw Error(ErrorKind::SchemaError, "graph document needs nodes and edges");
    ProvenanceGraph graph;
    for (const auto& node : doc.at("nodes")) {
        const std::string id = node.at("id").get<std::string>();
        graph.nodes.insert(id);
        graph.node_hashes[id] = node.at("hash").get<std::string>();
    }
    for (const auto& edge : doc.at("edges")) {
        if (!edge.is_array() || edge.size() != 2)
            throw Error(ErrorKind::SchemaError, "graph edge must be a [from, to] pair");
        graph.edges.emplace(edge[0].get<std::string>(), edge[1].get<std::string>());
    }
    return graph;
}

} // namespace provbench
