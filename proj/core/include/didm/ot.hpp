#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "didm/errors.hpp"

namespace didm {

/// Finitely supported nonnegative measure over an indexed support.
/// The artifact keeps every measure in M_{<=1}: validate() enforces
/// total mass <= 1 + 1e-12 on top of nonnegativity.
struct DiscreteMeasure {
    Eigen::VectorXd weights;

    DiscreteMeasure() = default;
    explicit DiscreteMeasure(Eigen::VectorXd w) : weights(std::move(w)) {}

    Eigen::Index support_size() const { return weights.size(); }
    double total_mass() const { return weights.size() == 0 ? 0.0 : weights.sum(); }
    void validate() const;

    static DiscreteMeasure uniform(Eigen::Index n);
    static DiscreteMeasure zero() { return DiscreteMeasure(); }
};

struct TransportPlan {
    Eigen::MatrixXd plan;  // m x n, nonnegative
    double objective = 0.0;
};

struct PlanViolation {
    enum class Kind { negative_entry, row_sum, col_sum };
    Kind kind;
    Eigen::Index row = -1;
    Eigen::Index col = -1;
    double magnitude = 0.0;

    std::string describe() const;
};

inline constexpr double kMarginalTol = 1e-9;

/// Exact balanced optimal transport via network simplex on the bipartite
/// transportation graph. Requires |mass(mu) - mass(nu)| <= 1e-9 and finite
/// costs; both marginals are met within kMarginalTol in the returned plan.
TransportPlan solve_balanced_ot(const Eigen::MatrixXd& cost, const DiscreteMeasure& mu,
                                const DiscreteMeasure& nu);

/// Unbalanced optimal transport: minimal coupling cost plus the mass
/// difference |mass(mu) - mass(nu)|. When mass(mu) > mass(nu) the problem is
/// solved with the arguments swapped and the cost transposed (the value is
/// symmetric in this sense). Internally reduces to a balanced problem by
/// appending a zero-cost reservoir source absorbing the surplus target mass;
/// the reservoir is stripped from the returned plan.
TransportPlan solve_unbalanced_ot(const Eigen::MatrixXd& cost, const DiscreteMeasure& mu,
                                  const DiscreteMeasure& nu);

/// Empty result iff the plan satisfies the marginal constraints within
/// kMarginalTol. balanced=false checks the one-sided (coupling) constraints
/// oriented by which measure carries less mass.
std::vector<PlanViolation> check_plan_feasibility(const TransportPlan& plan,
                                                  const DiscreteMeasure& mu,
                                                  const DiscreteMeasure& nu, bool balanced);

/// Reusable network-simplex workspace. One instance per thread; no global
/// state. objective_unbalanced() is the allocation-light path the metric
/// recursion runs millions of times: same reduction as solve_unbalanced_ot,
/// objective only.
class TransportWorkspace {
  public:
    /// Balanced transportation problem on a row-major cost block.
    /// supply (m) and demand (n) must sum equal within kMarginalTol.
    double solve_balanced(Eigen::Index m, Eigen::Index n, const double* supply,
                          const double* demand, const double* cost, Eigen::Index stride);

    /// Adds the solved flows into plan (must be zero-initialized).
    void extract_plan(Eigen::MatrixXd& plan) const;

    /// Unbalanced value for weight arrays against a row-major cost block
    /// (mu indexes rows). Weights must be nonnegative; zeros are allowed.
    double objective_unbalanced(const double* mu, Eigen::Index mu_size, const double* nu,
                                Eigen::Index nu_size, const double* cost, Eigen::Index stride);

    /// Scratch callers may use to gather cost submatrices.
    std::vector<double>& cost_buffer() { return cost_buffer_; }

  private:
    double run_simplex();
    void init_basis_northwest();
    void rebuild_adjacency();
    void compute_potentials();
    Eigen::Index find_entering(bool bland, double tol) const;
    double pivot(Eigen::Index enter_i, Eigen::Index enter_j);

    double cost_at(Eigen::Index i, Eigen::Index j) const {
        if (i == reservoir_row_) return 0.0;
        return cost_[i * row_stride_ + j * col_stride_];
    }

    Eigen::Index m_ = 0, n_ = 0;
    const double* cost_ = nullptr;
    Eigen::Index row_stride_ = 0, col_stride_ = 1, reservoir_row_ = -1;

    std::vector<double> supply_, demand_;
    // basis: always m + n - 1 spanning-tree cells once initialized
    std::vector<int> edge_src_, edge_dst_;
    std::vector<double> edge_flow_;
    // incidence lists, two records per edge
    std::vector<int> head_, rec_next_, rec_edge_;
    // tree traversal state
    std::vector<int> parent_node_, parent_edge_, depth_, queue_;
    std::vector<double> potential_;
    // pivot scratch
    std::vector<int> cycle_edges_, cycle_scratch_;
    std::vector<signed char> cycle_signs_;

    std::vector<double> cost_buffer_;
};

}  // namespace didm
