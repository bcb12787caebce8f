#include "didm/metric.hpp"

#include <chrono>
#include <string>

#include "didm/parallel.hpp"

namespace didm {

namespace {

// per-graph neighbor supports, gathered once and reused over all node pairs
struct NeighborTable {
    std::vector<std::vector<Eigen::Index>> support;
    std::vector<std::vector<double>> weights;

    explicit NeighborTable(const GraphSignal& g) {
        const Eigen::Index n = g.node_count();
        const double inv_n = 1.0 / static_cast<double>(n);
        support.resize(n);
        weights.resize(n);
        for (Eigen::Index x = 0; x < n; ++x) {
            for (Eigen::Index y = 0; y < n; ++y) {
                const double a = g.adjacency(x, y);
                if (a > 0.0) {
                    support[x].push_back(y);
                    weights[x].push_back(a * inv_n);
                }
            }
        }
    }
};

Eigen::MatrixXd next_cost_matrix_impl(const Eigen::MatrixXd& prev, const NeighborTable& ng,
                                      const NeighborTable& nh, TransportWorkspace& ws) {
    const Eigen::Index n_g = static_cast<Eigen::Index>(ng.support.size());
    const Eigen::Index n_h = static_cast<Eigen::Index>(nh.support.size());
    Eigen::MatrixXd next(n_g, n_h);
    std::vector<double>& buf = ws.cost_buffer();
    for (Eigen::Index x = 0; x < n_g; ++x) {
        const auto& sx = ng.support[x];
        const auto& wx = ng.weights[x];
        for (Eigen::Index y = 0; y < n_h; ++y) {
            const auto& sy = nh.support[y];
            const auto& wy = nh.weights[y];
            const Eigen::Index ms = static_cast<Eigen::Index>(sx.size());
            const Eigen::Index ns = static_cast<Eigen::Index>(sy.size());
            buf.resize(static_cast<std::size_t>(ms) * std::max<Eigen::Index>(ns, 1));
            for (Eigen::Index a = 0; a < ms; ++a) {
                for (Eigen::Index b = 0; b < ns; ++b) {
                    buf[a * ns + b] = prev(sx[a], sy[b]);
                }
            }
            double d;
            try {
                d = ws.objective_unbalanced(wx.data(), ms, wy.data(), ns, buf.data(), ns);
            } catch (const error& e) {
                throw error("next_cost_matrix failed at node pair (" + std::to_string(x) + "," +
                            std::to_string(y) + "): " + e.what());
            }
            next(x, y) = prev(x, y) + d;
        }
    }
    return next;
}

double final_transport(const Eigen::MatrixXd& cost, TransportWorkspace& ws) {
    const Eigen::Index n_g = cost.rows(), n_h = cost.cols();
    std::vector<double>& buf = ws.cost_buffer();
    buf.resize(static_cast<std::size_t>(n_g) * n_h);
    for (Eigen::Index i = 0; i < n_g; ++i) {
        for (Eigen::Index j = 0; j < n_h; ++j) buf[i * n_h + j] = cost(i, j);
    }
    std::vector<double> mu(n_g, 1.0 / static_cast<double>(n_g));
    std::vector<double> nu(n_h, 1.0 / static_cast<double>(n_h));
    return ws.objective_unbalanced(mu.data(), n_g, nu.data(), n_h, buf.data(), n_h);
}

}  // namespace

NeighborMeasure neighbor_measure(const GraphSignal& g, Eigen::Index x) {
    if (x < 0 || x >= g.node_count()) throw contract_error("neighbor_measure: node out of range");
    NeighborMeasure nm;
    const double inv_n = 1.0 / static_cast<double>(g.node_count());
    for (Eigen::Index y = 0; y < g.node_count(); ++y) {
        const double a = g.adjacency(x, y);
        if (a > 0.0) {
            nm.support.push_back(y);
            nm.weights.push_back(a * inv_n);
            nm.total_mass += a * inv_n;
        }
    }
    return nm;
}

void CostMatrixStack::validate() const {
    if (static_cast<int>(matrices.size()) != depth + 1) {
        throw contract_error("cost stack holds " + std::to_string(matrices.size()) +
                             " matrices for depth " + std::to_string(depth));
    }
    for (std::size_t i = 0; i < matrices.size(); ++i) {
        if ((matrices[i].array() < 0.0).any()) {
            throw contract_error("cost matrix C_" + std::to_string(i) + " has negative entries");
        }
        if (i > 0 && ((matrices[i] - matrices[i - 1]).array() < 0.0).any()) {
            throw contract_error("cost stack not entrywise monotone at level " + std::to_string(i));
        }
    }
}

Eigen::MatrixXd initial_cost_matrix(const GraphSignal& g, const GraphSignal& h) {
    if (g.attr_dim() != h.attr_dim()) {
        throw contract_error("attribute dimensions differ: " + std::to_string(g.attr_dim()) +
                             " vs " + std::to_string(h.attr_dim()));
    }
    const Eigen::Index n_g = g.node_count(), n_h = h.node_count();
    Eigen::MatrixXd c0(n_g, n_h);
    if (g.attr_dim() == 0) {
        c0.setZero();  // constant-zero signal convention
        return c0;
    }
    for (Eigen::Index x = 0; x < n_g; ++x) {
        for (Eigen::Index y = 0; y < n_h; ++y) {
            c0(x, y) = (g.attributes.row(x) - h.attributes.row(y)).norm();
        }
    }
    return c0;
}

Eigen::MatrixXd next_cost_matrix(const Eigen::MatrixXd& prev, const GraphSignal& g,
                                 const GraphSignal& h) {
    if (prev.rows() != g.node_count() || prev.cols() != h.node_count()) {
        throw contract_error("previous cost matrix shape does not match the graphs");
    }
    if ((prev.array() < 0.0).any()) {
        throw contract_error("previous cost matrix has negative entries");
    }
    NeighborTable ng(g), nh(h);
    TransportWorkspace ws;
    return next_cost_matrix_impl(prev, ng, nh, ws);
}

CostMatrixStack cost_matrix_stack(const GraphSignal& g, const GraphSignal& h, int depth) {
    if (depth < 0) throw contract_error("depth must be nonnegative");
    CostMatrixStack stack;
    stack.depth = depth;
    stack.matrices.reserve(depth + 1);
    stack.matrices.push_back(initial_cost_matrix(g, h));
    NeighborTable ng(g), nh(h);
    TransportWorkspace ws;
    for (int t = 1; t <= depth; ++t) {
        stack.matrices.push_back(next_cost_matrix_impl(stack.matrices.back(), ng, nh, ws));
    }
    return stack;
}

double didm_distance(const GraphSignal& g, const GraphSignal& h, int depth) {
    if (depth < 0) throw contract_error("depth must be nonnegative");
    Eigen::MatrixXd cost = initial_cost_matrix(g, h);
    NeighborTable ng(g), nh(h);
    TransportWorkspace ws;
    for (int t = 1; t <= depth; ++t) {
        cost = next_cost_matrix_impl(cost, ng, nh, ws);
    }
    return final_transport(cost, ws);
}

PairwiseReport pairwise_distance_matrix(const Dataset& ds, int depth) {
    const Eigen::Index n = ds.size();
    PairwiseReport report;
    report.distances = Eigen::MatrixXd::Zero(n, n);
    report.threads = worker_count();
    report.pairs = n * (n - 1) / 2;
    const auto start = std::chrono::steady_clock::now();

    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    pairs.reserve(static_cast<std::size_t>(report.pairs));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
    Eigen::MatrixXd& dist = report.distances;
    parallel_for(static_cast<Eigen::Index>(pairs.size()), [&](Eigen::Index k) {
        const auto [i, j] = pairs[static_cast<std::size_t>(k)];
        const double d = didm_distance(ds.graphs[i], ds.graphs[j], depth);
        dist(i, j) = d;
        dist(j, i) = d;
    });

    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace didm
