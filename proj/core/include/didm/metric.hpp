#pragma once

#include <vector>

#include <Eigen/Dense>

#include "didm/graph.hpp"
#include "didm/ot.hpp"

namespace didm {

/// Neighbor measure of node x: weight a_{xy}/N on every neighbor y.
/// Support is restricted to a_{xy} > 0; total mass = weighted degree / N.
struct NeighborMeasure {
    std::vector<Eigen::Index> support;
    std::vector<double> weights;
    double total_mass = 0.0;
};

NeighborMeasure neighbor_measure(const GraphSignal& g, Eigen::Index x);

/// The layered cost matrices C_0..C_L between two graphs. C_0 holds pairwise
/// attribute distances; each later level adds the transport value between
/// neighbor measures, so the stack is entrywise nondecreasing.
struct CostMatrixStack {
    int depth = 0;
    std::vector<Eigen::MatrixXd> matrices;  // C_0 .. C_depth

    void validate() const;
};

/// C_0(x,y) = ||f(x) - g(y)||_2. Graphs with attr_dim 0 are treated as
/// carrying the constant zero signal, so C_0 is the zero matrix.
Eigen::MatrixXd initial_cost_matrix(const GraphSignal& g, const GraphSignal& h);

/// C_i = C_{i-1} + D_i with D_i(x,y) the unbalanced transport value between
/// the neighbor measures of x and y under ground cost C_{i-1}.
Eigen::MatrixXd next_cost_matrix(const Eigen::MatrixXd& prev, const GraphSignal& g,
                                 const GraphSignal& h);

CostMatrixStack cost_matrix_stack(const GraphSignal& g, const GraphSignal& h, int depth);

/// The DIDM mover's distance at the given depth: unbalanced OT between the
/// uniform node measures under ground cost C_depth. Symmetric and
/// deterministic; depth 0 is pure attribute transport.
double didm_distance(const GraphSignal& g, const GraphSignal& h, int depth);

struct PairwiseReport {
    Eigen::MatrixXd distances;
    double seconds = 0.0;
    int threads = 1;
    Eigen::Index pairs = 0;
};

/// Full symmetric distance matrix over the dataset, computed pair-parallel.
/// Results are identical for any worker count.
PairwiseReport pairwise_distance_matrix(const Dataset& ds, int depth);

}  // namespace didm
