#include "didm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "didm/parallel.hpp"

namespace didm {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* family_name(MpnnModel::Family f) {
    switch (f) {
        case MpnnModel::Family::gin_meanpool: return "gin";
        case MpnnModel::Family::gc_meanpool: return "gc";
        case MpnnModel::Family::custom: return "custom";
    }
    return "?";
}

const char* signal_name(SbmSignal s) {
    switch (s) {
        case SbmSignal::constant: return "constant";
        case SbmSignal::community: return "community";
        case SbmSignal::gaussian: return "gaussian";
    }
    return "?";
}

MpnnModel init_family(MpnnModel::Family family, int layers, int hidden, int attr_dim,
                      std::uint64_t seed) {
    if (family == MpnnModel::Family::gc_meanpool) {
        return init_gc_meanpool(layers, hidden, attr_dim, hidden, seed);
    }
    return init_gin_meanpool(layers, hidden, attr_dim, hidden, seed);
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path.string());
    return out;
}

}  // namespace

std::string ExperimentConfig::describe() const {
    std::ostringstream os;
    switch (kind) {
        case ExperimentKind::knn: os << "kind=knn"; break;
        case ExperimentKind::sbm_correlate: os << "kind=sbm_correlate"; break;
        case ExperimentKind::dataset_correlate: os << "kind=dataset_correlate"; break;
        case ExperimentKind::lipschitz_check: os << "kind=lipschitz_check"; break;
    }
    if (!dataset_name.empty()) os << " dataset=" << dataset_name;
    os << " depth=" << depth << " model=" << family_name(family) << " hidden=" << hidden
       << " layers=" << model_layers << " signal=" << signal_name(signal)
       << " split_seed=" << split_seed << " model_seed=" << model_seed
       << " graph_seed=" << graph_seed;
    return os.str();
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    // splitmix64 over master ^ golden-ratio-scrambled stream
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// 1-NN
// ---------------------------------------------------------------------------

double knn_accuracy_for_split(const Eigen::MatrixXd& distances, const std::vector<int>& labels,
                              const std::vector<Eigen::Index>& train,
                              const std::vector<Eigen::Index>& test) {
    if (train.empty() || test.empty()) throw contract_error("empty split");
    if (!std::is_sorted(train.begin(), train.end())) {
        throw contract_error("train indices must be sorted for deterministic tie-breaking");
    }
    int correct = 0;
    for (const Eigen::Index t : test) {
        Eigen::Index best = train.front();
        double best_d = distances(t, best);
        for (std::size_t k = 1; k < train.size(); ++k) {
            const double d = distances(t, train[k]);
            if (d < best_d) {
                best_d = d;
                best = train[k];
            }
        }
        if (labels[static_cast<std::size_t>(best)] == labels[static_cast<std::size_t>(t)]) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

KnnResult knn_from_distances(const Eigen::MatrixXd& distances, const std::vector<int>& labels,
                             int splits, double train_frac, std::uint64_t seed) {
    const Eigen::Index n = distances.rows();
    if (n != distances.cols() || n != static_cast<Eigen::Index>(labels.size())) {
        throw contract_error("distance matrix and labels disagree");
    }
    if (splits < 1) throw contract_error("need at least one split");
    const std::set<int> classes(labels.begin(), labels.end());
    if (classes.size() < 2) throw contract_error("1-NN experiment needs at least two classes");
    auto n_train = static_cast<Eigen::Index>(std::llround(train_frac * static_cast<double>(n)));
    n_train = std::clamp<Eigen::Index>(n_train, 1, n - 1);

    std::mt19937_64 rng(seed);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);

    KnnResult result;
    for (int s = 0; s < splits; ++s) {
        std::vector<Eigen::Index> train, test;
        for (int attempt = 0;; ++attempt) {
            if (attempt > 1000) throw error("could not draw a split covering every class");
            std::shuffle(perm.begin(), perm.end(), rng);
            train.assign(perm.begin(), perm.begin() + n_train);
            test.assign(perm.begin() + n_train, perm.end());
            std::set<int> seen;
            for (const Eigen::Index i : train) seen.insert(labels[static_cast<std::size_t>(i)]);
            if (seen == classes) break;
            ++result.redrawn_splits;
        }
        std::sort(train.begin(), train.end());
        result.split_accuracies.push_back(knn_accuracy_for_split(distances, labels, train, test));
    }
    const double mean = std::accumulate(result.split_accuracies.begin(),
                                        result.split_accuracies.end(), 0.0) /
                        static_cast<double>(splits);
    double var = 0.0;
    for (const double a : result.split_accuracies) var += (a - mean) * (a - mean);
    result.mean_accuracy = mean;
    result.std_accuracy = std::sqrt(var / static_cast<double>(splits));
    return result;
}

KnnResult knn_experiment(const Dataset& ds, int depth, int splits, double train_frac,
                         std::uint64_t seed) {
    const PairwiseReport report = pairwise_distance_matrix(ds, depth);
    KnnResult result = knn_from_distances(report.distances, ds.labels, splits, train_frac, seed);
    result.pairwise_seconds = report.seconds;
    return result;
}

// ---------------------------------------------------------------------------
// Correlation experiments
// ---------------------------------------------------------------------------

double pearson_correlation(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw contract_error("pearson correlation needs two aligned samples of size >= 2");
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

std::vector<GraphSignal> sbm_sequence_graphs(SbmSignal signal, std::uint64_t graph_seed) {
    constexpr int kCount = 50;
    constexpr int kBlock = 15;
    std::vector<GraphSignal> graphs;
    graphs.reserve(kCount);
    for (int i = 0; i < kCount; ++i) {
        SbmSpec spec;
        spec.block_sizes = {kBlock, kBlock};
        spec.intra_p = 0.5;
        spec.inter_q = 0.1 + 0.4 * static_cast<double>(i) / 49.0;
        spec.seed = derive_seed(graph_seed, static_cast<std::uint64_t>(i));
        GraphSignal g = generate_sbm(spec);
        const Eigen::Index n = g.node_count();
        Eigen::MatrixXd attrs(n, 1);
        std::mt19937_64 srng(derive_seed(graph_seed, 1000 + static_cast<std::uint64_t>(i)));
        switch (signal) {
            case SbmSignal::constant:
                attrs.setOnes();
                break;
            case SbmSignal::community: {
                std::uniform_real_distribution<double> unit(0.0, 1.0);
                const double v0 = unit(srng), v1 = unit(srng);
                for (Eigen::Index v = 0; v < n; ++v) attrs(v, 0) = v < kBlock ? v0 : v1;
                break;
            }
            case SbmSignal::gaussian: {
                const double sigma = static_cast<double>(49 - i) / 49.0;
                std::normal_distribution<double> gauss(1.0, sigma > 0.0 ? sigma : 1e-300);
                for (Eigen::Index v = 0; v < n; ++v) {
                    attrs(v, 0) = sigma > 0.0 ? gauss(srng) : 1.0;
                }
                break;
            }
        }
        graphs.emplace_back(g.adjacency, std::move(attrs));
    }
    return graphs;
}

CorrelationResult sbm_correlation_experiment(const ExperimentConfig& config) {
    const std::vector<GraphSignal> graphs = sbm_sequence_graphs(config.signal, config.graph_seed);
    const GraphSignal& anchor = graphs.back();
    MpnnModel model =
        init_family(config.family, config.model_layers, config.hidden, 1, config.model_seed);

    const Eigen::VectorXd anchor_out = forward(model, anchor).graph_output;
    const int count = static_cast<int>(graphs.size());
    CorrelationResult result;
    result.rows.resize(count);
    parallel_for(count, [&](Eigen::Index i) {
        CorrelationRow& row = result.rows[static_cast<std::size_t>(i)];
        row.index = static_cast<int>(i);
        row.parameter = 0.1 + 0.4 * static_cast<double>(i) / 49.0;
        row.delta = didm_distance(graphs[static_cast<std::size_t>(i)], anchor, config.depth);
        row.output_distance =
            (forward(model, graphs[static_cast<std::size_t>(i)]).graph_output - anchor_out).norm();
    });
    std::vector<double> deltas, outs;
    for (const auto& row : result.rows) {
        deltas.push_back(row.delta);
        outs.push_back(row.output_distance);
    }
    result.pearson_r = pearson_correlation(deltas, outs);
    return result;
}

CorrelationResult dataset_correlation_experiment(const Dataset& ds, Eigen::Index anchor_index,
                                                 const ExperimentConfig& config) {
    if (anchor_index < 0 || anchor_index >= ds.size()) {
        throw contract_error("anchor index out of range");
    }
    MpnnModel model = init_family(config.family, config.model_layers, config.hidden,
                                  static_cast<int>(ds.attr_dim()), config.model_seed);
    const GraphSignal& anchor = ds.graphs[static_cast<std::size_t>(anchor_index)];
    const Eigen::VectorXd anchor_out = forward(model, anchor).graph_output;

    CorrelationResult result;
    result.rows.resize(static_cast<std::size_t>(ds.size()));
    parallel_for(ds.size(), [&](Eigen::Index i) {
        CorrelationRow& row = result.rows[static_cast<std::size_t>(i)];
        row.index = static_cast<int>(i);
        row.parameter = static_cast<double>(i);
        row.delta = didm_distance(ds.graphs[static_cast<std::size_t>(i)], anchor, config.depth);
        row.output_distance =
            (forward(model, ds.graphs[static_cast<std::size_t>(i)]).graph_output - anchor_out)
                .norm();
    });
    std::vector<double> deltas, outs;
    for (const auto& row : result.rows) {
        deltas.push_back(row.delta);
        outs.push_back(row.output_distance);
    }
    result.pearson_r = pearson_correlation(deltas, outs);
    return result;
}

// ---------------------------------------------------------------------------
// Lipschitz check
// ---------------------------------------------------------------------------

LipschitzCheckResult lipschitz_check_experiment(const Dataset& ds, int depth, int model_count,
                                                int pair_count,
                                                std::optional<MpnnModel::Family> family,
                                                int hidden, std::uint64_t seed) {
    if (model_count < 1) throw contract_error("need at least one model");
    if (ds.size() < 2) throw contract_error("need at least two graphs");
    const int attr_dim = static_cast<int>(ds.attr_dim());
    if (attr_dim < 1) throw contract_error("dataset needs attributes (use degrees)");

    std::vector<MpnnModel> models;
    models.reserve(static_cast<std::size_t>(model_count));
    for (int k = 0; k < model_count; ++k) {
        const MpnnModel::Family f = family.value_or(k % 2 == 0
                                                        ? MpnnModel::Family::gin_meanpool
                                                        : MpnnModel::Family::gc_meanpool);
        models.push_back(
            init_family(f, depth, hidden, attr_dim, derive_seed(seed, 10000 + k)));
    }
    const double radius = std::max(attribute_radius(ds), 1e-12);
    LipschitzCheckResult result;
    for (const MpnnModel& model : models) {
        result.max_model_lipschitz = std::max(
            result.max_model_lipschitz, lipschitz_constants(model, radius).model_lipschitz);
    }

    // sampled unordered pairs, all pairs when the budget covers them
    const Eigen::Index n = ds.size();
    const Eigen::Index total = n * (n - 1) / 2;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    if (pair_count <= 0 || static_cast<Eigen::Index>(pair_count) >= total) {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
        }
    } else {
        std::mt19937_64 rng(derive_seed(seed, 1));
        std::set<std::pair<Eigen::Index, Eigen::Index>> chosen;
        std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
        while (static_cast<int>(chosen.size()) < pair_count) {
            Eigen::Index i = pick(rng), j = pick(rng);
            if (i == j) continue;
            chosen.emplace(std::min(i, j), std::max(i, j));
        }
        pairs.assign(chosen.begin(), chosen.end());
    }

    // outputs per (model, used graph)
    std::set<Eigen::Index> used;
    for (const auto& [i, j] : pairs) {
        used.insert(i);
        used.insert(j);
    }
    std::vector<Eigen::Index> used_list(used.begin(), used.end());
    std::vector<Eigen::Index> slot_of(static_cast<std::size_t>(n), -1);
    for (std::size_t s = 0; s < used_list.size(); ++s) slot_of[used_list[s]] = s;
    std::vector<std::vector<Eigen::VectorXd>> outputs(models.size());
    parallel_for(static_cast<Eigen::Index>(models.size()), [&](Eigen::Index k) {
        auto& per_graph = outputs[static_cast<std::size_t>(k)];
        per_graph.reserve(used_list.size());
        for (const Eigen::Index g : used_list) {
            per_graph.push_back(
                forward(models[static_cast<std::size_t>(k)], ds.graphs[g]).graph_output);
        }
    });

    result.rows.resize(pairs.size());
    parallel_for(static_cast<Eigen::Index>(pairs.size()), [&](Eigen::Index p) {
        const auto [i, j] = pairs[static_cast<std::size_t>(p)];
        LipschitzCheckRow& row = result.rows[static_cast<std::size_t>(p)];
        row.g = i;
        row.h = j;
        row.delta = didm_distance(ds.graphs[i], ds.graphs[j], depth);
        double max_dist = 0.0;
        for (std::size_t k = 0; k < models.size(); ++k) {
            const double d =
                (outputs[k][slot_of[i]] - outputs[k][slot_of[j]]).norm();
            max_dist = std::max(max_dist, d);
        }
        row.max_output_distance = max_dist;
        row.bound = result.max_model_lipschitz * row.delta;
    });
    for (const auto& row : result.rows) {
        if (row.max_output_distance > row.bound + 1e-6) ++result.violations;
    }
    return result;
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

void write_distance_matrix_csv(const Eigen::MatrixXd& distances, const std::string& config_line,
                               const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "# config: " << config_line << "\n";
    const Eigen::Index n = distances.rows();
    out << "index";
    for (Eigen::Index j = 0; j < n; ++j) out << "," << j;
    out << "\n";
    for (Eigen::Index i = 0; i < n; ++i) {
        out << i;
        for (Eigen::Index j = 0; j < n; ++j) out << "," << fmt17(distances(i, j));
        out << "\n";
    }
}

Eigen::MatrixXd read_distance_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    std::string line;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("index", 0) == 0) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        bool first = true;
        while (std::getline(ss, cell, ',')) {
            if (first) {
                first = false;  // row index column
                continue;
            }
            row.push_back(std::stod(cell));
        }
        rows.push_back(std::move(row));
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != n) {
            throw parse_error(path.string() + ": row " + std::to_string(i) + " has " +
                              std::to_string(rows[i].size()) + " entries, expected " +
                              std::to_string(n));
        }
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][j];
    }
    return m;
}

void write_correlation_csv(const CorrelationResult& result, const std::string& config_line,
                           const std::string& parameter_name, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "# config: " << config_line << "\n";
    out << "# note: the r>=0.8 pass threshold is an implementer calibration\n";
    out << "index," << parameter_name << ",delta,output_distance\n";
    for (const auto& row : result.rows) {
        out << row.index << "," << fmt17(row.parameter) << "," << fmt17(row.delta) << ","
            << fmt17(row.output_distance) << "\n";
    }
    out << "# pearson_r: " << fmt17(result.pearson_r) << "\n";
}

void write_lipschitz_csv(const LipschitzCheckResult& result, const std::string& config_line,
                         const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "# config: " << config_line << "\n";
    out << "# max_model_lipschitz: " << fmt17(result.max_model_lipschitz) << "\n";
    out << "g,h,delta,max_output_distance,bound\n";
    for (const auto& row : result.rows) {
        out << row.g << "," << row.h << "," << fmt17(row.delta) << ","
            << fmt17(row.max_output_distance) << "," << fmt17(row.bound) << "\n";
    }
    out << "# violations: " << result.violations << "\n";
}

void write_knn_csv(const KnnResult& result, const std::string& config_line,
                   const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "# config: " << config_line << "\n";
    out << "split,accuracy\n";
    for (std::size_t s = 0; s < result.split_accuracies.size(); ++s) {
        out << s << "," << fmt17(result.split_accuracies[s]) << "\n";
    }
    out << "# mean: " << fmt17(result.mean_accuracy) << "\n";
    out << "# std: " << fmt17(result.std_accuracy) << "\n";
    out << "# redrawn_splits: " << result.redrawn_splits << "\n";
}

}  // namespace didm
