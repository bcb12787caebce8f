#include "didm/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace didm {

namespace {

constexpr double kMassEps = 1e-15;      // below this a measure counts as zero
constexpr int kPivotHardCap = 2000000;  // stall guard, never expected to trip

void require_finite_cost(const Eigen::MatrixXd& cost) {
    if (!cost.allFinite()) throw contract_error("cost matrix has non-finite entries");
}

void require_nonnegative(const DiscreteMeasure& mu, const char* which) {
    for (Eigen::Index i = 0; i < mu.weights.size(); ++i) {
        if (!(mu.weights[i] >= 0.0)) {
            throw contract_error(std::string(which) + " has negative weight at index " +
                                 std::to_string(i));
        }
    }
}

}  // namespace

void DiscreteMeasure::validate() const {
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0)) {
            throw contract_error("measure weight " + std::to_string(i) + " is negative");
        }
    }
    if (total_mass() > 1.0 + 1e-12) {
        throw contract_error("measure mass " + std::to_string(total_mass()) + " exceeds 1");
    }
}

DiscreteMeasure DiscreteMeasure::uniform(Eigen::Index n) {
    if (n < 1) throw contract_error("uniform measure needs positive support size");
    return DiscreteMeasure(Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

std::string PlanViolation::describe() const {
    switch (kind) {
        case Kind::negative_entry:
            return "negative plan entry at (" + std::to_string(row) + "," + std::to_string(col) +
                   "), magnitude " + std::to_string(magnitude);
        case Kind::row_sum:
            return "row " + std::to_string(row) + " marginal off by " + std::to_string(magnitude);
        case Kind::col_sum:
            return "column " + std::to_string(col) + " marginal off by " +
                   std::to_string(magnitude);
    }
    return "unknown violation";
}

// ---------------------------------------------------------------------------
// Network simplex for the dense transportation problem.
//
// Nodes 0..m-1 are sources, m..m+n-1 sinks. The basis is a spanning tree of
// m+n-1 cells. Each iteration recomputes potentials by BFS over the tree,
// prices all cells, and exchanges the entering cell against the minimum flow
// on the cycle. Dantzig pricing, Bland fallback after a degenerate streak.
// ---------------------------------------------------------------------------

void TransportWorkspace::init_basis_northwest() {
    const Eigen::Index m = m_, n = n_;
    edge_src_.clear();
    edge_dst_.clear();
    edge_flow_.clear();
    Eigen::Index i = 0, j = 0;
    double ra = supply_[0], rb = demand_[0];
    while (true) {
        const double t = std::max(std::min(ra, rb), 0.0);
        edge_src_.push_back(static_cast<int>(i));
        edge_dst_.push_back(static_cast<int>(j));
        edge_flow_.push_back(t);
        ra -= t;
        rb -= t;
        if (i == m - 1 && j == n - 1) break;
        if (i < m - 1 && (ra <= rb || j == n - 1)) {
            ++i;
            ra = supply_[i];
        } else {
            ++j;
            rb = demand_[j];
        }
    }
    if (static_cast<Eigen::Index>(edge_src_.size()) != m + n - 1) {
        throw error("internal: northwest basis has wrong size");
    }
}

void TransportWorkspace::rebuild_adjacency() {
    const Eigen::Index nodes = m_ + n_;
    head_.assign(nodes, -1);
    const int ecount = static_cast<int>(edge_src_.size());
    rec_next_.resize(2 * static_cast<std::size_t>(ecount));
    rec_edge_.resize(2 * static_cast<std::size_t>(ecount));
    for (int e = 0; e < ecount; ++e) {
        const int u = edge_src_[e];
        const int v = static_cast<int>(m_) + edge_dst_[e];
        rec_edge_[2 * e] = e;
        rec_next_[2 * e] = head_[u];
        head_[u] = 2 * e;
        rec_edge_[2 * e + 1] = e;
        rec_next_[2 * e + 1] = head_[v];
        head_[v] = 2 * e + 1;
    }
}

void TransportWorkspace::compute_potentials() {
    const Eigen::Index nodes = m_ + n_;
    potential_.assign(nodes, 0.0);
    parent_node_.assign(nodes, -1);
    parent_edge_.assign(nodes, -1);
    depth_.assign(nodes, -1);
    queue_.clear();
    queue_.push_back(0);
    depth_[0] = 0;
    for (std::size_t qi = 0; qi < queue_.size(); ++qi) {
        const int u = queue_[qi];
        for (int rec = head_[u]; rec != -1; rec = rec_next_[rec]) {
            const int e = rec_edge_[rec];
            const int src = edge_src_[e];
            const int snk = static_cast<int>(m_) + edge_dst_[e];
            const int w = (src == u) ? snk : src;
            if (depth_[w] != -1) continue;
            depth_[w] = depth_[u] + 1;
            parent_node_[w] = u;
            parent_edge_[w] = e;
            potential_[w] = cost_at(src, edge_dst_[e]) - potential_[u];
            queue_.push_back(w);
        }
    }
    if (static_cast<Eigen::Index>(queue_.size()) != nodes) {
        throw error("internal: transport basis lost connectivity");
    }
}

Eigen::Index TransportWorkspace::find_entering(bool bland, double tol) const {
    const Eigen::Index m = m_, n = n_;
    double best = -tol;
    Eigen::Index best_idx = -1;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double pi = potential_[i];
        for (Eigen::Index j = 0; j < n; ++j) {
            const double r = cost_at(i, j) - pi - potential_[m + j];
            if (r < best) {
                best = r;
                best_idx = i * n + j;
                if (bland) return best_idx;
            }
        }
    }
    return best_idx;
}

double TransportWorkspace::pivot(Eigen::Index enter_i, Eigen::Index enter_j) {
    // Unique tree path from the entering cell's sink to its source; signs
    // alternate starting with '-' on the edge next to the sink.
    cycle_edges_.clear();
    cycle_scratch_.clear();
    int u = static_cast<int>(enter_i);
    int v = static_cast<int>(m_ + enter_j);
    while (depth_[u] > depth_[v]) {
        cycle_scratch_.push_back(parent_edge_[u]);
        u = parent_node_[u];
    }
    while (depth_[v] > depth_[u]) {
        cycle_edges_.push_back(parent_edge_[v]);
        v = parent_node_[v];
    }
    while (u != v) {
        cycle_scratch_.push_back(parent_edge_[u]);
        u = parent_node_[u];
        cycle_edges_.push_back(parent_edge_[v]);
        v = parent_node_[v];
    }
    cycle_edges_.insert(cycle_edges_.end(), cycle_scratch_.rbegin(), cycle_scratch_.rend());

    cycle_signs_.resize(cycle_edges_.size());
    double theta = std::numeric_limits<double>::infinity();
    int leaving = -1;
    for (std::size_t l = 0; l < cycle_edges_.size(); ++l) {
        const bool minus = (l % 2 == 0);
        cycle_signs_[l] = minus ? -1 : 1;
        if (minus && edge_flow_[cycle_edges_[l]] < theta) {
            theta = edge_flow_[cycle_edges_[l]];
            leaving = cycle_edges_[l];
        }
    }
    if (leaving < 0) throw error("internal: transport pivot found no leaving arc");
    theta = std::max(theta, 0.0);
    for (std::size_t l = 0; l < cycle_edges_.size(); ++l) {
        edge_flow_[cycle_edges_[l]] += cycle_signs_[l] * theta;
    }
    edge_src_[leaving] = static_cast<int>(enter_i);
    edge_dst_[leaving] = static_cast<int>(enter_j);
    edge_flow_[leaving] = theta;
    return theta;
}

double TransportWorkspace::run_simplex() {
    // patch the tiny mass residue so the northwest pass closes exactly
    double total_s = 0.0, total_d = 0.0;
    for (double s : supply_) total_s += s;
    for (double d : demand_) total_d += d;
    if (total_d > kMassEps) {
        const double scale = total_s / total_d;
        for (double& d : demand_) d *= scale;
    }

    double cmax = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
        for (Eigen::Index j = 0; j < n_; ++j) cmax = std::max(cmax, std::abs(cost_at(i, j)));
    }
    const double tol = 1e-12 * (1.0 + cmax);

    init_basis_northwest();
    int degen_streak = 0;
    const int bland_after = 32 + 4 * static_cast<int>(m_ + n_);
    for (int iter = 0;; ++iter) {
        if (iter > kPivotHardCap) throw error("transport simplex stalled");
        rebuild_adjacency();
        compute_potentials();
        const Eigen::Index idx = find_entering(degen_streak > bland_after, tol);
        if (idx < 0) break;
        const double theta = pivot(idx / n_, idx % n_);
        degen_streak = theta <= 1e-15 ? degen_streak + 1 : 0;
    }

    double objective = 0.0;
    for (std::size_t k = 0; k < edge_src_.size(); ++k) {
        objective += edge_flow_[k] * cost_at(edge_src_[k], edge_dst_[k]);
    }
    return objective;
}

double TransportWorkspace::solve_balanced(Eigen::Index m, Eigen::Index n, const double* supply,
                                          const double* demand, const double* cost,
                                          Eigen::Index stride) {
    m_ = m;
    n_ = n;
    cost_ = cost;
    row_stride_ = stride;
    col_stride_ = 1;
    reservoir_row_ = -1;
    supply_.assign(supply, supply + m);
    demand_.assign(demand, demand + n);
    return run_simplex();
}

void TransportWorkspace::extract_plan(Eigen::MatrixXd& plan) const {
    for (std::size_t k = 0; k < edge_src_.size(); ++k) {
        const double f = edge_flow_[k];
        if (f > 0.0) plan(edge_src_[k], edge_dst_[k]) += f;
    }
}

double TransportWorkspace::objective_unbalanced(const double* mu, Eigen::Index mu_size,
                                                const double* nu, Eigen::Index nu_size,
                                                const double* cost, Eigen::Index stride) {
    double mass_mu = 0.0, mass_nu = 0.0;
    for (Eigen::Index i = 0; i < mu_size; ++i) mass_mu += mu[i];
    for (Eigen::Index j = 0; j < nu_size; ++j) mass_nu += nu[j];
    const double diff = std::abs(mass_mu - mass_nu);

    const bool swapped = mass_mu > mass_nu;
    const double* src = swapped ? nu : mu;
    const double* dst = swapped ? mu : nu;
    const Eigen::Index src_size = swapped ? nu_size : mu_size;
    const Eigen::Index dst_size = swapped ? mu_size : nu_size;
    const double src_mass = swapped ? mass_nu : mass_mu;
    const double dst_mass = swapped ? mass_mu : mass_nu;

    if (src_mass <= kMassEps || src_size == 0 || dst_size == 0) {
        // only the empty coupling exists; the mass term remains
        return diff;
    }

    const bool reservoir = (dst_mass - src_mass) > 1e-12 * std::max(1.0, dst_mass);
    m_ = src_size + (reservoir ? 1 : 0);
    n_ = dst_size;
    cost_ = cost;
    row_stride_ = swapped ? 1 : stride;
    col_stride_ = swapped ? stride : 1;
    reservoir_row_ = reservoir ? m_ - 1 : Eigen::Index(-1);
    supply_.assign(src, src + src_size);
    if (reservoir) supply_.push_back(dst_mass - src_mass);
    demand_.assign(dst, dst + dst_size);

    return run_simplex() + diff;
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

TransportPlan solve_balanced_ot(const Eigen::MatrixXd& cost, const DiscreteMeasure& mu,
                                const DiscreteMeasure& nu) {
    require_finite_cost(cost);
    require_nonnegative(mu, "mu");
    require_nonnegative(nu, "nu");
    const Eigen::Index m = mu.support_size(), n = nu.support_size();
    const double mass_mu = mu.total_mass(), mass_nu = nu.total_mass();
    if (std::abs(mass_mu - mass_nu) > kMarginalTol) {
        throw contract_error("balanced OT requires equal masses: " + std::to_string(mass_mu) +
                             " vs " + std::to_string(mass_nu));
    }
    if ((m == 0 && mass_nu > kMarginalTol) || (n == 0 && mass_mu > kMarginalTol)) {
        throw contract_error("balanced OT with empty support against positive mass is infeasible");
    }
    TransportPlan result;
    result.plan = Eigen::MatrixXd::Zero(m, n);
    if (m == 0 || n == 0 || mass_mu <= kMassEps) {
        return result;
    }
    if (cost.rows() != m || cost.cols() != n) {
        throw contract_error("cost matrix shape does not match measure supports");
    }
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> c = cost;
    TransportWorkspace ws;
    result.objective =
        ws.solve_balanced(m, n, mu.weights.data(), nu.weights.data(), c.data(), c.cols());
    ws.extract_plan(result.plan);
    return result;
}

TransportPlan solve_unbalanced_ot(const Eigen::MatrixXd& cost, const DiscreteMeasure& mu,
                                  const DiscreteMeasure& nu) {
    require_finite_cost(cost);
    require_nonnegative(mu, "mu");
    require_nonnegative(nu, "nu");
    const Eigen::Index m = mu.support_size(), n = nu.support_size();
    if ((m > 0 && n > 0) && (cost.rows() != m || cost.cols() != n)) {
        throw contract_error("cost matrix shape does not match measure supports");
    }
    const double mass_mu = mu.total_mass(), mass_nu = nu.total_mass();
    const double diff = std::abs(mass_mu - mass_nu);

    TransportPlan result;
    result.plan = Eigen::MatrixXd::Zero(m, n);
    result.objective = diff;

    const bool swapped = mass_mu > mass_nu;
    const Eigen::VectorXd& src_w = swapped ? nu.weights : mu.weights;
    const Eigen::VectorXd& dst_w = swapped ? mu.weights : nu.weights;
    const double src_mass = swapped ? mass_nu : mass_mu;
    const double dst_mass = swapped ? mass_mu : mass_nu;

    if (src_mass <= kMassEps || dst_w.size() == 0) {
        return result;
    }

    // zero-weight support points carry no plan mass; prune them
    std::vector<Eigen::Index> rows, cols;
    for (Eigen::Index i = 0; i < src_w.size(); ++i) {
        if (src_w[i] > 0.0) rows.push_back(i);
    }
    for (Eigen::Index j = 0; j < dst_w.size(); ++j) {
        if (dst_w[j] > 0.0) cols.push_back(j);
    }
    const Eigen::Index ms = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index ns = static_cast<Eigen::Index>(cols.size());
    if (ms == 0 || ns == 0) {
        return result;
    }

    const bool reservoir = (dst_mass - src_mass) > 1e-12 * std::max(1.0, dst_mass);
    const Eigen::Index mr = ms + (reservoir ? 1 : 0);
    std::vector<double> supply(static_cast<std::size_t>(mr));
    std::vector<double> demand(static_cast<std::size_t>(ns));
    std::vector<double> c(static_cast<std::size_t>(mr) * ns, 0.0);
    for (Eigen::Index i = 0; i < ms; ++i) {
        supply[i] = src_w[rows[i]];
        for (Eigen::Index j = 0; j < ns; ++j) {
            c[i * ns + j] = swapped ? cost(cols[j], rows[i]) : cost(rows[i], cols[j]);
        }
    }
    if (reservoir) supply[mr - 1] = dst_mass - src_mass;
    for (Eigen::Index j = 0; j < ns; ++j) demand[j] = dst_w[cols[j]];

    TransportWorkspace ws;
    const double transport = ws.solve_balanced(mr, ns, supply.data(), demand.data(), c.data(), ns);

    Eigen::MatrixXd reduced = Eigen::MatrixXd::Zero(mr, ns);
    ws.extract_plan(reduced);
    for (Eigen::Index i = 0; i < ms; ++i) {
        for (Eigen::Index j = 0; j < ns; ++j) {
            const double f = reduced(i, j);
            if (f <= 0.0) continue;
            if (swapped) {
                result.plan(cols[j], rows[i]) += f;
            } else {
                result.plan(rows[i], cols[j]) += f;
            }
        }
    }
    result.objective = transport + diff;
    return result;
}

std::vector<PlanViolation> check_plan_feasibility(const TransportPlan& plan,
                                                  const DiscreteMeasure& mu,
                                                  const DiscreteMeasure& nu, bool balanced) {
    std::vector<PlanViolation> out;
    const Eigen::Index m = plan.plan.rows(), n = plan.plan.cols();
    if (m != mu.support_size() || n != nu.support_size()) {
        throw contract_error("plan shape does not match measures");
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (plan.plan(i, j) < -kMarginalTol) {
                out.push_back({PlanViolation::Kind::negative_entry, i, j, -plan.plan(i, j)});
            }
        }
    }
    const Eigen::VectorXd row_sums = plan.plan.rows() > 0 && plan.plan.cols() > 0
                                         ? Eigen::VectorXd(plan.plan.rowwise().sum())
                                         : Eigen::VectorXd::Zero(m);
    const Eigen::VectorXd col_sums = plan.plan.rows() > 0 && plan.plan.cols() > 0
                                         ? Eigen::VectorXd(plan.plan.colwise().sum())
                                         : Eigen::VectorXd::Zero(n);

    const bool mu_is_source = balanced || mu.total_mass() <= nu.total_mass();
    for (Eigen::Index i = 0; i < m; ++i) {
        const double delta = row_sums[i] - mu.weights[i];
        const bool bad = mu_is_source ? std::abs(delta) > kMarginalTol : delta > kMarginalTol;
        if (bad) out.push_back({PlanViolation::Kind::row_sum, i, -1, std::abs(delta)});
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        const double delta = col_sums[j] - nu.weights[j];
        const bool exact = balanced || !mu_is_source;
        const bool bad = exact ? std::abs(delta) > kMarginalTol : delta > kMarginalTol;
        if (bad) out.push_back({PlanViolation::Kind::col_sum, -1, j, std::abs(delta)});
    }
    return out;
}

}  // namespace didm
