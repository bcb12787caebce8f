#include "didm/graph.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

namespace didm {

namespace {
constexpr double kSymmetryTol = 0.0;  // symmetry must hold exactly
}

GraphSignal::GraphSignal(Eigen::MatrixXd adj, Eigen::MatrixXd attrs)
    : adjacency(std::move(adj)), attributes(std::move(attrs)) {
    if (attributes.size() == 0 && attributes.rows() != adjacency.rows()) {
        attributes.resize(adjacency.rows(), 0);
    }
    validate();
}

void GraphSignal::validate() const {
    const Eigen::Index n = adjacency.rows();
    if (adjacency.cols() != n) {
        throw contract_error("adjacency must be square, got " + std::to_string(n) + "x" +
                             std::to_string(adjacency.cols()));
    }
    if (n < 1) {
        throw contract_error("graph must have at least one node");
    }
    if (attributes.rows() != n) {
        throw contract_error("attributes must have one row per node: " +
                             std::to_string(attributes.rows()) + " rows for " +
                             std::to_string(n) + " nodes");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double a = adjacency(i, j);
            if (!(a >= 0.0 && a <= 1.0)) {
                throw contract_error("adjacency entry (" + std::to_string(i) + "," +
                                     std::to_string(j) + ") = " + std::to_string(a) +
                                     " outside [0,1]");
            }
            if (std::abs(a - adjacency(j, i)) > kSymmetryTol) {
                throw contract_error("adjacency not symmetric at (" + std::to_string(i) + "," +
                                     std::to_string(j) + ")");
            }
        }
    }
    if (!attributes.allFinite()) {
        throw contract_error("attributes contain non-finite values");
    }
}

int Dataset::class_count() const {
    std::set<int> cls(labels.begin(), labels.end());
    return static_cast<int>(cls.size());
}

void Dataset::validate() const {
    if (graphs.size() != labels.size()) {
        throw contract_error("dataset has " + std::to_string(graphs.size()) + " graphs but " +
                             std::to_string(labels.size()) + " labels");
    }
    const Eigen::Index d = attr_dim();
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        if (graphs[i].attr_dim() != d) {
            throw contract_error("graph " + std::to_string(i) + " has attr_dim " +
                                 std::to_string(graphs[i].attr_dim()) + ", expected " +
                                 std::to_string(d));
        }
        graphs[i].validate();
    }
}

int SbmSpec::total_nodes() const {
    return std::accumulate(block_sizes.begin(), block_sizes.end(), 0);
}

void SbmSpec::validate() const {
    if (block_sizes.empty()) {
        throw contract_error("SBM spec needs at least one block");
    }
    for (int b : block_sizes) {
        if (b <= 0) throw contract_error("SBM block sizes must be positive");
    }
    if (!(intra_p >= 0.0 && intra_p <= 1.0) || !(inter_q >= 0.0 && inter_q <= 1.0)) {
        throw contract_error("SBM probabilities must lie in [0,1]");
    }
}

GraphSignal degrees_as_attributes(const GraphSignal& g, bool normalized) {
    const Eigen::Index n = g.node_count();
    Eigen::MatrixXd attrs(n, 1);
    const double scale = normalized ? 1.0 / static_cast<double>(n) : 1.0;
    for (Eigen::Index v = 0; v < n; ++v) {
        attrs(v, 0) = g.weighted_degree(v) * scale;
    }
    return GraphSignal(g.adjacency, std::move(attrs));
}

GraphSignal generate_sbm(const SbmSpec& spec) {
    spec.validate();
    const int n = spec.total_nodes();

    std::vector<int> block_of(n);
    int node = 0;
    for (std::size_t b = 0; b < spec.block_sizes.size(); ++b) {
        for (int k = 0; k < spec.block_sizes[b]; ++k) block_of[node++] = static_cast<int>(b);
    }

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double p = block_of[i] == block_of[j] ? spec.intra_p : spec.inter_q;
            if (unit(rng) < p) {
                adj(i, j) = 1.0;
                adj(j, i) = 1.0;
            }
        }
    }
    return GraphSignal(std::move(adj), Eigen::MatrixXd(n, 0));
}

GraphSignal permute_nodes(const GraphSignal& g, const std::vector<Eigen::Index>& perm) {
    const Eigen::Index n = g.node_count();
    if (static_cast<Eigen::Index>(perm.size()) != n) {
        throw contract_error("permutation length does not match node count");
    }
    Eigen::MatrixXd adj(n, n);
    Eigen::MatrixXd attrs(n, g.attr_dim());
    for (Eigen::Index i = 0; i < n; ++i) {
        attrs.row(i) = g.attributes.row(perm[i]);
        for (Eigen::Index j = 0; j < n; ++j) {
            adj(i, j) = g.adjacency(perm[i], perm[j]);
        }
    }
    return GraphSignal(std::move(adj), std::move(attrs));
}

}  // namespace didm
