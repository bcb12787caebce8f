#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "didm/experiments.hpp"
#include "test_util.hpp"

using namespace didm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Eigen::MatrixXd random_symmetric_distances(std::mt19937_64& rng, Eigen::Index n) {
    std::uniform_real_distribution<double> unit(0.1, 10.0);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            d(i, j) = d(j, i) = unit(rng);
        }
    }
    return d;
}

}  // namespace

TEST_CASE("pearson correlation fixtures") {
    CHECK(pearson_correlation({1, 2, 3, 4}, {2, 4, 6, 8}) == doctest::Approx(1.0));
    CHECK(pearson_correlation({1, 2, 3, 4}, {8, 6, 4, 2}) == doctest::Approx(-1.0));
    CHECK(pearson_correlation({1, 2, 3, 4}, {5, 5, 5, 5}) == doctest::Approx(0.0));
}

TEST_CASE("1-NN: all-zero distances resolve ties to the smallest train index") {
    const Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(6, 6);
    const std::vector<int> labels = {1, 0, 0, 1, 0, 1};
    const std::vector<Eigen::Index> train = {0, 2, 4};
    const std::vector<Eigen::Index> test = {1, 3, 5};
    // prediction is always labels[0] = 1; test labels 0,1,1 -> 2/3
    CHECK(knn_accuracy_for_split(dist, labels, train, test) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("1-NN: well separated clusters classify perfectly") {
    const Eigen::Index n = 12;
    Eigen::MatrixXd dist(n, n);
    std::vector<int> labels(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        labels[static_cast<std::size_t>(i)] = i < n / 2 ? 0 : 1;
        for (Eigen::Index j = 0; j < n; ++j) {
            const bool same = (i < n / 2) == (j < n / 2);
            dist(i, j) = i == j ? 0.0 : (same ? 0.5 : 9.0);
        }
    }
    const KnnResult r = knn_from_distances(dist, labels, 10, 0.75, 7);
    CHECK(r.mean_accuracy == doctest::Approx(1.0));
    CHECK(r.std_accuracy == doctest::Approx(0.0));
}

TEST_CASE("1-NN: deterministic given the seed") {
    std::mt19937_64 rng(401);
    const Eigen::MatrixXd dist = random_symmetric_distances(rng, 20);
    std::vector<int> labels(20);
    for (int i = 0; i < 20; ++i) labels[i] = i % 2;
    const KnnResult a = knn_from_distances(dist, labels, 10, 0.9, 33);
    const KnnResult b = knn_from_distances(dist, labels, 10, 0.9, 33);
    CHECK(a.mean_accuracy == b.mean_accuracy);
    CHECK(a.split_accuracies == b.split_accuracies);
}

TEST_CASE("1-NN: accuracy invariant under a dataset permutation with matching splits") {
    std::mt19937_64 rng(419);
    const Eigen::Index n = 15;
    const Eigen::MatrixXd dist = random_symmetric_distances(rng, n);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i % 3 == 0;

    const std::vector<Eigen::Index> train = {0, 1, 2, 3, 5, 7, 8, 10, 11, 13};
    const std::vector<Eigen::Index> test = {4, 6, 9, 12, 14};
    const double base = knn_accuracy_for_split(dist, labels, train, test);

    const auto perm = testutil::random_permutation(rng, n);  // new position i holds old perm[i]
    Eigen::MatrixXd pdist(n, n);
    std::vector<int> plabels(static_cast<std::size_t>(n));
    std::vector<Eigen::Index> inverse(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        plabels[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(perm[i])];
        inverse[static_cast<std::size_t>(perm[i])] = i;
        for (Eigen::Index j = 0; j < n; ++j) pdist(i, j) = dist(perm[i], perm[j]);
    }
    std::vector<Eigen::Index> ptrain, ptest;
    for (const auto t : train) ptrain.push_back(inverse[static_cast<std::size_t>(t)]);
    for (const auto t : test) ptest.push_back(inverse[static_cast<std::size_t>(t)]);
    std::sort(ptrain.begin(), ptrain.end());
    CHECK(knn_accuracy_for_split(pdist, plabels, ptrain, ptest) == doctest::Approx(base));
}

TEST_CASE("1-NN: single-class dataset rejected") {
    const Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(4, 4);
    CHECK_THROWS_AS(knn_from_distances(dist, {1, 1, 1, 1}, 2, 0.75, 0), contract_error);
}

TEST_CASE("sbm sequence: 50 graphs of 30 nodes, anchor signals") {
    const auto graphs = sbm_sequence_graphs(SbmSignal::constant, 5);
    REQUIRE(graphs.size() == 50);
    for (const auto& g : graphs) {
        CHECK(g.node_count() == 30);
        CHECK(g.attr_dim() == 1);
        CHECK(g.attributes.minCoeff() == 1.0);
        CHECK(g.attributes.maxCoeff() == 1.0);
    }
    const auto community = sbm_sequence_graphs(SbmSignal::community, 5);
    // two constant blocks per graph
    for (const auto& g : community) {
        const double v0 = g.attributes(0, 0), v1 = g.attributes(15, 0);
        for (int v = 0; v < 15; ++v) CHECK(g.attributes(v, 0) == v0);
        for (int v = 15; v < 30; ++v) CHECK(g.attributes(v, 0) == v1);
    }
    const auto gaussian = sbm_sequence_graphs(SbmSignal::gaussian, 5);
    CHECK(gaussian.back().attributes.minCoeff() == 1.0);  // sigma_49 = 0
}

TEST_CASE("experiment CSVs are reproducible byte for byte") {
    const fs::path dir = fs::temp_directory_path() / "didm_exp_test";
    fs::create_directories(dir);

    ExperimentConfig config;
    config.kind = ExperimentKind::sbm_correlate;
    config.signal = SbmSignal::constant;
    config.family = MpnnModel::Family::gin_meanpool;
    config.hidden = 4;
    config.model_layers = 1;
    config.depth = 1;
    config.graph_seed = 3;
    config.model_seed = 4;

    // small depth keeps this fast; byte-identical across runs is the point
    const CorrelationResult a = sbm_correlation_experiment(config);
    write_correlation_csv(a, config.describe(), "q", dir / "a.csv");
    const CorrelationResult b = sbm_correlation_experiment(config);
    write_correlation_csv(b, config.describe(), "q", dir / "b.csv");
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.csv").find("# config:") == 0);

    // anchor row: delta 0, output distance 0
    CHECK(a.rows.back().delta == doctest::Approx(0.0));
    CHECK(a.rows.back().output_distance == doctest::Approx(0.0));
    fs::remove_all(dir);
}

TEST_CASE("distance matrix CSV round trip") {
    std::mt19937_64 rng(431);
    const Eigen::MatrixXd d = random_symmetric_distances(rng, 7);
    const fs::path p = fs::temp_directory_path() / "didm_dist_test.csv";
    write_distance_matrix_csv(d, "test", p);
    const Eigen::MatrixXd back = read_distance_matrix_csv(p);
    CHECK((back - d).norm() == 0.0);
    fs::remove(p);
}

TEST_CASE("lipschitz check finds no violations on a small dataset") {
    std::mt19937_64 rng(443);
    Dataset ds;
    for (int i = 0; i < 5; ++i) {
        ds.graphs.push_back(testutil::random_graph_with_dim(rng, 4 + i % 3, 2));
        ds.labels.push_back(i % 2);
    }
    const LipschitzCheckResult result =
        lipschitz_check_experiment(ds, 2, 6, 0, std::nullopt, 4, 17);
    CHECK(result.rows.size() == 10);  // all pairs
    CHECK(result.violations == 0);
    CHECK(result.max_model_lipschitz > 0.0);
    for (const auto& row : result.rows) {
        CHECK(row.max_output_distance <= row.bound + 1e-6);
    }
}

TEST_CASE("dataset correlation: anchor at distance zero, bad anchor rejected") {
    std::mt19937_64 rng(449);
    Dataset ds;
    for (int i = 0; i < 4; ++i) {
        ds.graphs.push_back(testutil::random_graph_with_dim(rng, 4, 2));
        ds.labels.push_back(i % 2);
    }
    ExperimentConfig config;
    config.family = MpnnModel::Family::gc_meanpool;
    config.hidden = 4;
    config.model_layers = 1;
    config.depth = 1;
    config.model_seed = 5;
    const CorrelationResult r = dataset_correlation_experiment(ds, 2, config);
    CHECK(r.rows[2].delta == doctest::Approx(0.0));
    CHECK(r.rows[2].output_distance == doctest::Approx(0.0));
    CHECK_THROWS_AS(dataset_correlation_experiment(ds, 9, config), contract_error);
}
