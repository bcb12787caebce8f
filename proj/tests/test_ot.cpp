#include <doctest.h>

#include <random>

#include "didm/ot.hpp"
#include "ot_oracle.hpp"
#include "test_util.hpp"

using namespace didm;

namespace {
DiscreteMeasure measure(std::initializer_list<double> ws) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(ws.size()));
    Eigen::Index i = 0;
    for (double w : ws) v[i++] = w;
    return DiscreteMeasure(v);
}

Eigen::MatrixXd cost2x2(double a, double b, double c, double d) {
    Eigen::MatrixXd m(2, 2);
    m << a, b, c, d;
    return m;
}
}  // namespace

TEST_CASE("balanced: forced single-point plan") {
    Eigen::MatrixXd cost(1, 1);
    cost << 5.0;
    const TransportPlan plan = solve_balanced_ot(cost, measure({1.0}), measure({1.0}));
    CHECK(plan.objective == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(plan.plan(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("balanced: 2x2 cross move") {
    // oracle-derived optimum: move 0.25 across at cost 1
    const Eigen::MatrixXd cost = cost2x2(0.0, 1.0, 1.0, 0.0);
    const Eigen::VectorXd mu = measure({0.5, 0.5}).weights;
    const Eigen::VectorXd nu = measure({0.25, 0.75}).weights;
    const double expected = otoracle::balanced_bruteforce(cost, mu, nu);
    CHECK(expected == doctest::Approx(0.25).epsilon(1e-12));
    const TransportPlan plan =
        solve_balanced_ot(cost, DiscreteMeasure(mu), DiscreteMeasure(nu));
    CHECK(plan.objective == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(check_plan_feasibility(plan, DiscreteMeasure(mu), DiscreteMeasure(nu), true).empty());
}

TEST_CASE("balanced: zero cost gives zero objective") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        DiscreteMeasure mu = testutil::random_measure(rng, 4, false);
        const Eigen::MatrixXd cost =
            Eigen::MatrixXd::Zero(mu.support_size(), mu.support_size());
        const TransportPlan plan = solve_balanced_ot(cost, mu, mu);
        CHECK(plan.objective == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("balanced: mass mismatch rejected") {
    Eigen::MatrixXd cost(1, 1);
    cost << 1.0;
    CHECK_THROWS_AS(solve_balanced_ot(cost, measure({0.5}), measure({0.75})), contract_error);
}

TEST_CASE("balanced: empty support against positive mass rejected") {
    CHECK_THROWS_AS(solve_balanced_ot(Eigen::MatrixXd(0, 1), DiscreteMeasure(), measure({0.5})),
                    contract_error);
}

TEST_CASE("unbalanced: lighter measure against the zero measure") {
    const TransportPlan plan =
        solve_unbalanced_ot(Eigen::MatrixXd(1, 0), measure({0.5}), DiscreteMeasure());
    CHECK(plan.objective == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(plan.plan.cols() == 0);
}

TEST_CASE("unbalanced: identical measures at zero diagonal cost") {
    Eigen::MatrixXd cost = cost2x2(0.0, 2.0, 2.0, 0.0);
    const DiscreteMeasure mu = measure({0.25, 0.5});
    const TransportPlan plan = solve_unbalanced_ot(cost, mu, mu);
    CHECK(plan.objective == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(check_plan_feasibility(plan, mu, mu, false).empty());
}

TEST_CASE("unbalanced: 1x2 mass-surplus fixture") {
    // all mass stays at x; value is the mass difference 1/2
    Eigen::MatrixXd cost(1, 2);
    cost << 0.0, 1.0;
    const DiscreteMeasure mu = measure({0.5});
    const DiscreteMeasure nu = measure({0.5, 0.5});
    CHECK(otoracle::unbalanced_bruteforce(cost, mu.weights, nu.weights) ==
          doctest::Approx(0.5).epsilon(1e-12));
    const TransportPlan plan = solve_unbalanced_ot(cost, mu, nu);
    CHECK(plan.objective == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(plan.plan(0, 0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(plan.plan(0, 1) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("unbalanced: negative weights rejected") {
    Eigen::VectorXd w(1);
    w << -0.1;
    CHECK_THROWS_AS(solve_unbalanced_ot(Eigen::MatrixXd::Zero(1, 1), DiscreteMeasure(w),
                                        measure({0.1})),
                    contract_error);
}

TEST_CASE("feasibility checker flags hand-made violations") {
    const DiscreteMeasure mu = measure({0.5, 0.5});
    const DiscreteMeasure nu = measure({0.5, 0.5});
    TransportPlan plan;
    plan.plan = Eigen::MatrixXd::Zero(2, 2);
    plan.plan(0, 0) = 0.5;
    plan.plan(1, 1) = 0.5 - 1e-3;
    auto violations = check_plan_feasibility(plan, mu, nu, true);
    REQUIRE(violations.size() == 2);  // row 1 and column 1 are both short
    CHECK(violations[0].kind == PlanViolation::Kind::row_sum);
    CHECK(violations[0].row == 1);
    CHECK(violations[0].describe().find("row 1") != std::string::npos);

    plan.plan(0, 1) = -0.2;
    violations = check_plan_feasibility(plan, mu, nu, true);
    CHECK(violations.front().kind == PlanViolation::Kind::negative_entry);
}

TEST_CASE("property: unbalanced symmetry under transpose") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 200; ++rep) {
        const DiscreteMeasure mu = testutil::random_measure(rng, 5);
        const DiscreteMeasure nu = testutil::random_measure(rng, 5);
        const Eigen::MatrixXd cost =
            testutil::random_cost(rng, mu.support_size(), nu.support_size());
        const double lhs = solve_unbalanced_ot(cost, mu, nu).objective;
        const double rhs = solve_unbalanced_ot(cost.transpose(), nu, mu).objective;
        CHECK(std::abs(lhs - rhs) <= 1e-9);
    }
}

TEST_CASE("property: scaling the cost scales equal-mass objectives") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> alpha_dist(0.1, 4.0);
    for (int rep = 0; rep < 100; ++rep) {
        DiscreteMeasure mu = testutil::random_measure(rng, 4, false);
        DiscreteMeasure nu = testutil::random_measure(rng, 4, false);
        const double mass_mu = mu.total_mass(), mass_nu = nu.total_mass();
        if (mass_mu <= 1e-12 || mass_nu <= 1e-12) continue;
        nu.weights *= mass_mu / mass_nu;  // equalize masses
        const Eigen::MatrixXd cost =
            testutil::random_cost(rng, mu.support_size(), nu.support_size());
        const double alpha = alpha_dist(rng);
        const double base = solve_unbalanced_ot(cost, mu, nu).objective;
        const double scaled = solve_unbalanced_ot(alpha * cost, mu, nu).objective;
        CHECK(std::abs(scaled - alpha * base) <= 1e-9 * std::max(1.0, alpha));
    }
}

TEST_CASE("property: objective at least the mass difference, equality at zero cost") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 200; ++rep) {
        const DiscreteMeasure mu = testutil::random_measure(rng, 5);
        const DiscreteMeasure nu = testutil::random_measure(rng, 5);
        const double diff = std::abs(mu.total_mass() - nu.total_mass());
        const Eigen::MatrixXd cost =
            testutil::random_cost(rng, mu.support_size(), nu.support_size());
        const double value = solve_unbalanced_ot(cost, mu, nu).objective;
        CHECK(value >= diff - 1e-12);
        const double zero_value =
            solve_unbalanced_ot(Eigen::MatrixXd::Zero(mu.support_size(), nu.support_size()), mu,
                                nu)
                .objective;
        CHECK(zero_value == doctest::Approx(diff).epsilon(1e-12));
    }
}

TEST_CASE("property: solver matches the brute-force oracle on small supports") {
    std::mt19937_64 rng(19);
    for (int rep = 0; rep < 200; ++rep) {
        const DiscreteMeasure mu = testutil::random_measure(rng, 3);
        const DiscreteMeasure nu = testutil::random_measure(rng, 3);
        const Eigen::MatrixXd cost =
            testutil::random_cost(rng, mu.support_size(), nu.support_size());
        const double expected = otoracle::unbalanced_bruteforce(cost, mu.weights, nu.weights);
        const double actual = solve_unbalanced_ot(cost, mu, nu).objective;
        CHECK(std::abs(actual - expected) <= 1e-7);
    }
}

TEST_CASE("property: returned plans are always feasible") {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 200; ++rep) {
        const DiscreteMeasure mu = testutil::random_measure(rng, 6);
        const DiscreteMeasure nu = testutil::random_measure(rng, 6);
        const Eigen::MatrixXd cost =
            testutil::random_cost(rng, mu.support_size(), nu.support_size());
        const TransportPlan plan = solve_unbalanced_ot(cost, mu, nu);
        const auto violations = check_plan_feasibility(plan, mu, nu, false);
        for (const auto& v : violations) {
            INFO(v.describe());
            CHECK(false);
        }
    }
}
