#include "didm/dataset_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace didm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve_tu_file(const fs::path& root, const std::string& name, const std::string& suffix,
                         bool mandatory) {
    const fs::path flat = root / (name + suffix);
    if (fs::exists(flat)) return flat;
    const fs::path nested = root / name / (name + suffix);
    if (fs::exists(nested)) return nested;
    if (mandatory) {
        throw io_error("missing mandatory TUDataset file: " + flat.string());
    }
    return {};
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string::npos) {
        lines.pop_back();
    }
    return lines;
}

std::vector<double> parse_csv_row(const std::string& line, const fs::path& path, std::size_t lineno) {
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            values.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw parse_error(path.string() + ":" + std::to_string(lineno) +
                              ": cannot parse number '" + cell + "'");
        }
    }
    if (values.empty()) {
        throw parse_error(path.string() + ":" + std::to_string(lineno) + ": empty row");
    }
    return values;
}

}  // namespace

TuLoadResult load_tudataset(const fs::path& root, const std::string& name) {
    const fs::path a_path = resolve_tu_file(root, name, "_A.txt", true);
    const fs::path indicator_path = resolve_tu_file(root, name, "_graph_indicator.txt", true);
    const fs::path labels_path = resolve_tu_file(root, name, "_graph_labels.txt", true);
    const fs::path node_labels_path = resolve_tu_file(root, name, "_node_labels.txt", false);
    const fs::path node_attrs_path = resolve_tu_file(root, name, "_node_attributes.txt", false);

    // node -> graph (both 1-based in the files)
    const auto indicator_lines = read_lines(indicator_path);
    const std::size_t node_count = indicator_lines.size();
    if (node_count == 0) throw parse_error(indicator_path.string() + ": no nodes");
    std::vector<int> graph_of(node_count);
    int graph_count = 0;
    for (std::size_t i = 0; i < node_count; ++i) {
        const int gid = static_cast<int>(parse_csv_row(indicator_lines[i], indicator_path, i + 1)[0]);
        if (gid < 1) throw parse_error(indicator_path.string() + ":" + std::to_string(i + 1) +
                                       ": graph ids are 1-based");
        graph_of[i] = gid - 1;
        graph_count = std::max(graph_count, gid);
    }

    std::vector<std::vector<std::size_t>> nodes_of_graph(graph_count);
    for (std::size_t i = 0; i < node_count; ++i) {
        nodes_of_graph[graph_of[i]].push_back(i);
    }
    std::vector<Eigen::Index> local_index(node_count);
    for (const auto& nodes : nodes_of_graph) {
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            local_index[nodes[k]] = static_cast<Eigen::Index>(k);
        }
    }

    // graph labels
    const auto label_lines = read_lines(labels_path);
    if (static_cast<int>(label_lines.size()) != graph_count) {
        throw parse_error(labels_path.string() + ": " + std::to_string(label_lines.size()) +
                          " labels for " + std::to_string(graph_count) + " graphs");
    }
    std::vector<int> labels(graph_count);
    for (int g = 0; g < graph_count; ++g) {
        labels[g] = static_cast<int>(parse_csv_row(label_lines[g], labels_path, g + 1)[0]);
    }

    // adjacency
    std::vector<Eigen::MatrixXd> adjacency;
    adjacency.reserve(graph_count);
    for (int g = 0; g < graph_count; ++g) {
        const auto n = static_cast<Eigen::Index>(nodes_of_graph[g].size());
        adjacency.emplace_back(Eigen::MatrixXd::Zero(n, n));
    }
    const auto edge_lines = read_lines(a_path);
    for (std::size_t k = 0; k < edge_lines.size(); ++k) {
        if (edge_lines[k].find_first_not_of(" \t") == std::string::npos) continue;
        const auto row = parse_csv_row(edge_lines[k], a_path, k + 1);
        if (row.size() != 2) {
            throw parse_error(a_path.string() + ":" + std::to_string(k + 1) +
                              ": expected 'i, j' edge pair");
        }
        const auto u = static_cast<std::size_t>(row[0]);
        const auto v = static_cast<std::size_t>(row[1]);
        if (u < 1 || v < 1 || u > node_count || v > node_count) {
            throw parse_error(a_path.string() + ":" + std::to_string(k + 1) +
                              ": node id out of range");
        }
        if (graph_of[u - 1] != graph_of[v - 1]) {
            throw parse_error(a_path.string() + ":" + std::to_string(k + 1) +
                              ": edge crosses graphs");
        }
        adjacency[graph_of[u - 1]](local_index[u - 1], local_index[v - 1]) = 1.0;
    }

    // undirected interpretation: add missing reverse edges, count repairs
    int symmetrized = 0;
    for (auto& adj : adjacency) {
        for (Eigen::Index i = 0; i < adj.rows(); ++i) {
            for (Eigen::Index j = i + 1; j < adj.cols(); ++j) {
                if (adj(i, j) != adj(j, i)) {
                    adj(i, j) = 1.0;
                    adj(j, i) = 1.0;
                    ++symmetrized;
                }
            }
        }
    }

    // attributes: one-hot node labels, then continuous attributes
    Eigen::Index onehot_dim = 0;
    std::vector<int> node_label_ids;
    std::map<int, Eigen::Index> label_to_slot;
    if (!node_labels_path.empty()) {
        const auto lines = read_lines(node_labels_path);
        if (lines.size() != node_count) {
            throw parse_error(node_labels_path.string() + ": " + std::to_string(lines.size()) +
                              " rows for " + std::to_string(node_count) + " nodes");
        }
        node_label_ids.resize(node_count);
        for (std::size_t i = 0; i < node_count; ++i) {
            node_label_ids[i] =
                static_cast<int>(parse_csv_row(lines[i], node_labels_path, i + 1)[0]);
            label_to_slot.emplace(node_label_ids[i], 0);
        }
        Eigen::Index slot = 0;
        for (auto& [value, idx] : label_to_slot) idx = slot++;
        onehot_dim = static_cast<Eigen::Index>(label_to_slot.size());
    }

    Eigen::Index cont_dim = 0;
    std::vector<std::vector<double>> cont_attrs;
    if (!node_attrs_path.empty()) {
        const auto lines = read_lines(node_attrs_path);
        if (lines.size() != node_count) {
            throw parse_error(node_attrs_path.string() + ": " + std::to_string(lines.size()) +
                              " rows for " + std::to_string(node_count) + " nodes");
        }
        cont_attrs.resize(node_count);
        for (std::size_t i = 0; i < node_count; ++i) {
            cont_attrs[i] = parse_csv_row(lines[i], node_attrs_path, i + 1);
            if (i == 0) {
                cont_dim = static_cast<Eigen::Index>(cont_attrs[i].size());
            } else if (static_cast<Eigen::Index>(cont_attrs[i].size()) != cont_dim) {
                throw parse_error(node_attrs_path.string() + ":" + std::to_string(i + 1) +
                                  ": inconsistent attribute dimension");
            }
        }
    }

    const Eigen::Index attr_dim = onehot_dim + cont_dim;
    TuLoadResult result;
    result.symmetrized_edges = symmetrized;
    result.dataset.name = name;
    result.dataset.labels = labels;
    result.dataset.graphs.reserve(graph_count);
    for (int g = 0; g < graph_count; ++g) {
        const auto& nodes = nodes_of_graph[g];
        const auto n = static_cast<Eigen::Index>(nodes.size());
        Eigen::MatrixXd attrs = Eigen::MatrixXd::Zero(n, attr_dim);
        for (Eigen::Index k = 0; k < n; ++k) {
            const std::size_t global = nodes[static_cast<std::size_t>(k)];
            if (onehot_dim > 0) {
                attrs(k, label_to_slot.at(node_label_ids[global])) = 1.0;
            }
            for (Eigen::Index c = 0; c < cont_dim; ++c) {
                attrs(k, onehot_dim + c) = cont_attrs[global][static_cast<std::size_t>(c)];
            }
        }
        result.dataset.graphs.emplace_back(std::move(adjacency[g]), std::move(attrs));
    }
    result.dataset.validate();
    return result;
}

// ---------------------------------------------------------------------------
// Graph JSON
// ---------------------------------------------------------------------------

GraphSignal parse_graph_json(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(origin + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("n") || !doc["n"].is_number_integer()) {
        throw parse_error(origin + ": expected object with integer field 'n'");
    }
    const Eigen::Index n = doc["n"].get<Eigen::Index>();
    if (n < 1) throw parse_error(origin + ": 'n' must be positive");

    Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
    if (doc.contains("adjacency")) {
        const json& rows = doc["adjacency"];
        if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n) {
            throw parse_error(origin + ": 'adjacency' must be an n x n array");
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            const json& row = rows[static_cast<std::size_t>(i)];
            if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
                throw parse_error(origin + ": adjacency row " + std::to_string(i) +
                                  " has wrong length");
            }
            for (Eigen::Index j = 0; j < n; ++j) {
                const json& cell = row[static_cast<std::size_t>(j)];
                if (!cell.is_number()) {
                    throw parse_error(origin + ": adjacency(" + std::to_string(i) + "," +
                                      std::to_string(j) + ") is not a number");
                }
                adj(i, j) = cell.get<double>();
            }
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (!(adj(i, j) >= 0.0 && adj(i, j) <= 1.0)) {
                    throw parse_error(origin + ": adjacency(" + std::to_string(i) + "," +
                                      std::to_string(j) + ") = " + std::to_string(adj(i, j)) +
                                      " outside [0,1]");
                }
                if (adj(i, j) != adj(j, i)) {
                    throw parse_error(origin + ": adjacency not symmetric at (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
                }
            }
        }
    } else if (doc.contains("edges")) {
        const json& edges = doc["edges"];
        if (!edges.is_array()) throw parse_error(origin + ": 'edges' must be an array");
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const json& e = edges[k];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
                !e[1].is_number_integer()) {
                throw parse_error(origin + ": edge " + std::to_string(k) +
                                  " must be a pair of integers");
            }
            const Eigen::Index i = e[0].get<Eigen::Index>();
            const Eigen::Index j = e[1].get<Eigen::Index>();
            if (i < 0 || j < 0 || i >= n || j >= n) {
                throw parse_error(origin + ": edge " + std::to_string(k) + " out of range");
            }
            adj(i, j) = 1.0;
            adj(j, i) = 1.0;
        }
    } else {
        throw parse_error(origin + ": need 'adjacency' or 'edges'");
    }

    Eigen::MatrixXd attrs(n, 0);
    if (doc.contains("attributes") && !doc["attributes"].is_null()) {
        const json& rows = doc["attributes"];
        if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n) {
            throw parse_error(origin + ": 'attributes' must have one row per node");
        }
        Eigen::Index d = -1;
        for (Eigen::Index i = 0; i < n; ++i) {
            const json& row = rows[static_cast<std::size_t>(i)];
            if (!row.is_array()) {
                throw parse_error(origin + ": attribute row " + std::to_string(i) +
                                  " is not an array");
            }
            if (d < 0) {
                d = static_cast<Eigen::Index>(row.size());
                attrs.resize(n, d);
            } else if (static_cast<Eigen::Index>(row.size()) != d) {
                throw parse_error(origin + ": attribute row " + std::to_string(i) +
                                  " has inconsistent length");
            }
            for (Eigen::Index c = 0; c < d; ++c) {
                const json& cell = row[static_cast<std::size_t>(c)];
                if (!cell.is_number()) {
                    throw parse_error(origin + ": attribute (" + std::to_string(i) + "," +
                                      std::to_string(c) + ") is not a number");
                }
                attrs(i, c) = cell.get<double>();
            }
        }
    }

    try {
        return GraphSignal(std::move(adj), std::move(attrs));
    } catch (const contract_error& e) {
        throw parse_error(origin + ": " + e.what());
    }
}

GraphSignal load_graph_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_graph_json(buffer.str(), path.string());
}

std::string graph_json_string(const GraphSignal& g) {
    json doc;
    doc["n"] = g.node_count();
    json adj = json::array();
    for (Eigen::Index i = 0; i < g.node_count(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < g.node_count(); ++j) row.push_back(g.adjacency(i, j));
        adj.push_back(std::move(row));
    }
    doc["adjacency"] = std::move(adj);
    json attrs = json::array();
    for (Eigen::Index i = 0; i < g.node_count(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < g.attr_dim(); ++c) row.push_back(g.attributes(i, c));
        attrs.push_back(std::move(row));
    }
    doc["attributes"] = std::move(attrs);
    return doc.dump(2) + "\n";
}

void save_graph_json(const GraphSignal& g, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path.string());
    out << graph_json_string(g);
}

}  // namespace didm
