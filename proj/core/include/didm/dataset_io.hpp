#pragma once

#include <filesystem>
#include <string>

#include "didm/graph.hpp"

namespace didm {

struct TuLoadResult {
    Dataset dataset;
    int symmetrized_edges = 0;  // unordered pairs whose reverse edge was missing
};

/// Loads a dataset in the TU graph-benchmark text layout. Mandatory files:
/// <name>_A.txt, <name>_graph_indicator.txt, <name>_graph_labels.txt.
/// Optional: <name>_node_labels.txt (one-hot encoded) and
/// <name>_node_attributes.txt; when both exist the attribute rows are
/// [one-hot(label), attributes]. Node ids are 1-based in the files, 0-based
/// in memory. Files may sit in root directly or in root/<name>/.
TuLoadResult load_tudataset(const std::filesystem::path& root, const std::string& name);

/// Parses a GraphSignal from the graph JSON format:
/// {"n": int, "adjacency": [[...]] | "edges": [[i,j],...], "attributes": [[...]]}
/// "edges" implies a 0/1 symmetric adjacency; indices are 0-based.
GraphSignal load_graph_json(const std::filesystem::path& path);
GraphSignal parse_graph_json(const std::string& text, const std::string& origin = "<string>");

void save_graph_json(const GraphSignal& g, const std::filesystem::path& path);
std::string graph_json_string(const GraphSignal& g);

}  // namespace didm
