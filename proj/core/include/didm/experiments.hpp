#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "didm/graph.hpp"
#include "didm/metric.hpp"
#include "didm/mpnn.hpp"

namespace didm {

enum class ExperimentKind { knn, sbm_correlate, dataset_correlate, lipschitz_check };

enum class SbmSignal { constant, community, gaussian };

/// Declarative description of one experiment run; every CSV written carries
/// its echo in the '# config:' header line.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::knn;
    std::filesystem::path dataset_root;
    std::string dataset_name;
    int depth = 2;
    MpnnModel::Family family = MpnnModel::Family::gin_meanpool;
    int hidden = 16;
    int model_layers = 2;
    SbmSignal signal = SbmSignal::constant;
    std::uint64_t split_seed = 0;
    std::uint64_t model_seed = 0;
    std::uint64_t graph_seed = 0;
    std::filesystem::path output;

    std::string describe() const;
};

// ---------------------------------------------------------------------------
// 1-NN classification
// ---------------------------------------------------------------------------

struct KnnResult {
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    std::vector<double> split_accuracies;
    int redrawn_splits = 0;
    double pairwise_seconds = 0.0;
};

/// Classifies each test graph by its nearest training graph's label under
/// the precomputed distance matrix; distance ties break to the smallest
/// training index. Train indices must be sorted ascending.
double knn_accuracy_for_split(const Eigen::MatrixXd& distances, const std::vector<int>& labels,
                              const std::vector<Eigen::Index>& train,
                              const std::vector<Eigen::Index>& test);

/// splits seeded 90/10 (train_frac) draws; a draw missing some class in the
/// training side is redrawn and counted.
KnnResult knn_from_distances(const Eigen::MatrixXd& distances, const std::vector<int>& labels,
                             int splits, double train_frac, std::uint64_t seed);

/// Computes the pairwise matrix once at the given depth, then runs
/// knn_from_distances.
KnnResult knn_experiment(const Dataset& ds, int depth, int splits, double train_frac,
                         std::uint64_t seed);

// ---------------------------------------------------------------------------
// Correlation experiments
// ---------------------------------------------------------------------------

struct CorrelationRow {
    int index = 0;
    double parameter = 0.0;  // q_i for the SBM sequence, graph index otherwise
    double delta = 0.0;
    double output_distance = 0.0;
};

struct CorrelationResult {
    std::vector<CorrelationRow> rows;
    double pearson_r = 0.0;
};

double pearson_correlation(const std::vector<double>& xs, const std::vector<double>& ys);

/// The SBM sequence: 50 graphs, two blocks of 15, p = 0.5,
/// q_i = 0.1 + 0.4 i / 49; anchor G_49. Rows hold delta_depth(G_i, anchor)
/// and the output distance of one seeded model.
CorrelationResult sbm_correlation_experiment(const ExperimentConfig& config);

/// Builds the graphs + signals of the SBM sequence (exposed for tests).
std::vector<GraphSignal> sbm_sequence_graphs(SbmSignal signal, std::uint64_t graph_seed);

/// Distances from one anchor graph against one seeded model's output
/// distances over the whole dataset.
CorrelationResult dataset_correlation_experiment(const Dataset& ds, Eigen::Index anchor_index,
                                                 const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Lipschitz bound check
// ---------------------------------------------------------------------------

struct LipschitzCheckRow {
    Eigen::Index g = 0, h = 0;
    double delta = 0.0;
    double max_output_distance = 0.0;
    double bound = 0.0;  // max_model_lipschitz * delta
};

struct LipschitzCheckResult {
    std::vector<LipschitzCheckRow> rows;
    double max_model_lipschitz = 0.0;
    int violations = 0;  // rows with max distance > bound + 1e-6
};

/// Max over model_count seeded models (families alternate unless forced) of
/// output distance per sampled pair, against the shared Lipschitz bound.
LipschitzCheckResult lipschitz_check_experiment(const Dataset& ds, int depth, int model_count,
                                                int pair_count, std::optional<MpnnModel::Family> family,
                                                int hidden, std::uint64_t seed);

// ---------------------------------------------------------------------------
// CSV emission (# config: header, 17 significant digits, reproducible)
// ---------------------------------------------------------------------------

void write_distance_matrix_csv(const Eigen::MatrixXd& distances, const std::string& config_line,
                               const std::filesystem::path& path);
Eigen::MatrixXd read_distance_matrix_csv(const std::filesystem::path& path);

void write_correlation_csv(const CorrelationResult& result, const std::string& config_line,
                           const std::string& parameter_name, const std::filesystem::path& path);

void write_lipschitz_csv(const LipschitzCheckResult& result, const std::string& config_line,
                         const std::filesystem::path& path);

void write_knn_csv(const KnnResult& result, const std::string& config_line,
                   const std::filesystem::path& path);

/// Derives an independent stream seed; used to give every graph/model/split
/// its own deterministic seed from one master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace didm
