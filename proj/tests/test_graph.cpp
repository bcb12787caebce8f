#include <doctest.h>

#include <random>

#include "didm/graph.hpp"
#include "test_util.hpp"

using namespace didm;

namespace {
GraphSignal path3() {
    Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(3, 3);
    adj(0, 1) = adj(1, 0) = 1.0;
    adj(1, 2) = adj(2, 1) = 1.0;
    return GraphSignal(adj, Eigen::MatrixXd::Zero(3, 0));
}
}  // namespace

TEST_CASE("degrees_as_attributes on a path graph") {
    const GraphSignal g = degrees_as_attributes(path3());
    CHECK(g.attr_dim() == 1);
    CHECK(g.attributes(0, 0) == 1.0);
    CHECK(g.attributes(1, 0) == 2.0);
    CHECK(g.attributes(2, 0) == 1.0);
}

TEST_CASE("degrees_as_attributes on degenerate graphs") {
    const GraphSignal isolated(Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd(1, 0));
    CHECK(degrees_as_attributes(isolated).attributes(0, 0) == 0.0);

    Eigen::MatrixXd k2 = Eigen::MatrixXd::Zero(2, 2);
    k2(0, 1) = k2(1, 0) = 1.0;
    const GraphSignal pair(k2, Eigen::MatrixXd(2, 0));
    const GraphSignal with_deg = degrees_as_attributes(pair);
    CHECK(with_deg.attributes(0, 0) == 1.0);
    CHECK(with_deg.attributes(1, 0) == 1.0);
}

TEST_CASE("degrees_as_attributes is idempotent on its image") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        const GraphSignal g = testutil::random_graph(rng);
        const GraphSignal once = degrees_as_attributes(g);
        const GraphSignal twice = degrees_as_attributes(once);
        CHECK((once.attributes - twice.attributes).norm() == 0.0);
    }
}

TEST_CASE("normalized degree flag divides by N") {
    const GraphSignal g = degrees_as_attributes(path3(), true);
    CHECK(g.attributes(1, 0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("generate_sbm is deterministic per seed") {
    SbmSpec spec;
    spec.block_sizes = {6, 5};
    spec.intra_p = 0.7;
    spec.inter_q = 0.2;
    spec.seed = 42;
    const GraphSignal a = generate_sbm(spec);
    const GraphSignal b = generate_sbm(spec);
    CHECK((a.adjacency - b.adjacency).norm() == 0.0);
    spec.seed = 43;
    const GraphSignal c = generate_sbm(spec);
    CHECK((a.adjacency - c.adjacency).norm() != 0.0);
}

TEST_CASE("generate_sbm deterministic extremes") {
    SbmSpec one;
    one.block_sizes = {1};
    one.intra_p = 1.0;
    one.seed = 5;
    const GraphSignal single = generate_sbm(one);
    CHECK(single.node_count() == 1);
    CHECK(single.adjacency(0, 0) == 0.0);

    SbmSpec two;
    two.block_sizes = {2, 2};
    two.intra_p = 1.0;
    two.inter_q = 0.0;
    two.seed = 5;
    const GraphSignal g = generate_sbm(two);
    CHECK(g.adjacency(0, 1) == 1.0);
    CHECK(g.adjacency(2, 3) == 1.0);
    CHECK(g.adjacency(0, 2) == 0.0);
    CHECK(g.adjacency(1, 3) == 0.0);
    for (int v = 0; v < 4; ++v) CHECK(g.adjacency(v, v) == 0.0);
}

TEST_CASE("generate_sbm hits the requested intra-block density") {
    // Monte Carlo over many seeds; intra pairs per draw: 2 * C(15,2) = 210
    SbmSpec spec;
    spec.block_sizes = {15, 15};
    spec.intra_p = 0.5;
    spec.inter_q = 0.1;
    long intra_edges = 0, intra_pairs = 0;
    for (int s = 0; s < 1000; ++s) {
        spec.seed = static_cast<std::uint64_t>(s);
        const GraphSignal g = generate_sbm(spec);
        for (int block = 0; block < 2; ++block) {
            const int base = block * 15;
            for (int i = 0; i < 15; ++i) {
                for (int j = i + 1; j < 15; ++j) {
                    ++intra_pairs;
                    if (g.adjacency(base + i, base + j) > 0.0) ++intra_edges;
                }
            }
        }
    }
    const double density = static_cast<double>(intra_edges) / static_cast<double>(intra_pairs);
    CHECK(std::abs(density - 0.5) <= 0.02);
}

TEST_CASE("graph validation catches broken invariants") {
    Eigen::MatrixXd asym = Eigen::MatrixXd::Zero(2, 2);
    asym(0, 1) = 1.0;
    CHECK_THROWS_AS(GraphSignal(asym, Eigen::MatrixXd(2, 0)), contract_error);

    Eigen::MatrixXd out_of_range = Eigen::MatrixXd::Constant(2, 2, 1.5);
    CHECK_THROWS_AS(GraphSignal(out_of_range, Eigen::MatrixXd(2, 0)), contract_error);

    Eigen::MatrixXd ok = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(GraphSignal(ok, Eigen::MatrixXd::Zero(3, 1)), contract_error);
}

TEST_CASE("dataset validation checks label count and attr dims") {
    Dataset ds;
    ds.graphs.push_back(path3());
    CHECK_THROWS_AS(ds.validate(), contract_error);
    ds.labels.push_back(0);
    ds.validate();
    ds.graphs.push_back(degrees_as_attributes(path3()));
    ds.labels.push_back(1);
    CHECK_THROWS_AS(ds.validate(), contract_error);
}
