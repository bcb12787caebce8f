#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "didm/errors.hpp"

namespace didm {

/// A finite attributed graph: symmetric weighted adjacency with entries in
/// [0,1] plus one attribute row per node. Immutable by convention after
/// construction; validate() re-checks the invariants at any time.
struct GraphSignal {
    Eigen::MatrixXd adjacency;   // N x N, symmetric, entries in [0,1]
    Eigen::MatrixXd attributes;  // N x d (d may be 0)

    GraphSignal() = default;
    GraphSignal(Eigen::MatrixXd adj, Eigen::MatrixXd attrs);

    Eigen::Index node_count() const { return adjacency.rows(); }
    Eigen::Index attr_dim() const { return attributes.cols(); }

    /// Weighted degree of node v: sum_u a_{vu}.
    double weighted_degree(Eigen::Index v) const { return adjacency.row(v).sum(); }

    /// Throws contract_error if symmetry, range, or shape invariants fail.
    void validate() const;
};

struct Dataset {
    std::vector<GraphSignal> graphs;
    std::vector<int> labels;  // one class label per graph
    std::string name;

    Eigen::Index size() const { return static_cast<Eigen::Index>(graphs.size()); }
    Eigen::Index attr_dim() const { return graphs.empty() ? 0 : graphs.front().attr_dim(); }
    int class_count() const;
    void validate() const;
};

/// Parameters of a stochastic block model draw.
struct SbmSpec {
    std::vector<int> block_sizes;
    double intra_p = 0.5;
    double inter_q = 0.1;
    std::uint64_t seed = 0;

    int total_nodes() const;
    void validate() const;
};

/// Copy of g with attr_dim = 1 and attribute of node v equal to its raw
/// weighted degree sum_u a_{vu} (or degree/N when normalized is set).
GraphSignal degrees_as_attributes(const GraphSignal& g, bool normalized = false);

/// Seeded undirected simple draw: intra-block pairs wired with intra_p,
/// inter-block with inter_q, no self loops. Attributes start empty.
GraphSignal generate_sbm(const SbmSpec& spec);

/// Applies a node permutation: node v of the result is node perm[v] of g.
GraphSignal permute_nodes(const GraphSignal& g, const std::vector<Eigen::Index>& perm);

}  // namespace didm
