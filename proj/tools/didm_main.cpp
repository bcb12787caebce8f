#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "didm/dataset_io.hpp"
#include "didm/experiments.hpp"
#include "didm/generalization.hpp"
#include "didm/graph.hpp"
#include "didm/metric.hpp"
#include "didm/mpnn.hpp"
#include "didm/parallel.hpp"

namespace {

didm::Dataset load_dataset(const std::string& dir, const std::string& name, bool degrees,
                           bool normalize_degrees, bool quiet = false) {
    didm::TuLoadResult loaded = didm::load_tudataset(dir, name);
    if (loaded.symmetrized_edges > 0 && !quiet) {
        std::cerr << "note: symmetrized " << loaded.symmetrized_edges
                  << " one-directional edges\n";
    }
    if (degrees || normalize_degrees) {
        for (auto& g : loaded.dataset.graphs) {
            g = didm::degrees_as_attributes(g, normalize_degrees);
        }
    }
    return std::move(loaded.dataset);
}

std::vector<int> parse_blocks(const std::string& text) {
    std::vector<int> blocks;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) blocks.push_back(std::stoi(cell));
    return blocks;
}

didm::MpnnModel::Family parse_family(const std::string& name) {
    if (name == "gin") return didm::MpnnModel::Family::gin_meanpool;
    if (name == "gc") return didm::MpnnModel::Family::gc_meanpool;
    throw CLI::ValidationError("--model must be gin or gc");
}

didm::SbmSignal parse_signal(const std::string& name) {
    if (name == "constant") return didm::SbmSignal::constant;
    if (name == "community") return didm::SbmSignal::community;
    if (name == "gaussian") return didm::SbmSignal::gaussian;
    throw CLI::ValidationError("--signal must be constant, community or gaussian");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DIDM mover's distance between attributed graphs, MPNN forward passes, "
                 "and the experiment drivers"};
    app.require_subcommand(1);

    // ---- dist ----
    std::string left_path, right_path;
    int dist_depth = 2;
    CLI::App* dist = app.add_subcommand("dist", "distance between two graph JSON files");
    dist->add_option("--left", left_path, "left graph JSON")->required();
    dist->add_option("--right", right_path, "right graph JSON")->required();
    dist->add_option("--depth", dist_depth, "metric depth L");

    // ---- pairwise ----
    std::string tu_dir, tu_name, out_path;
    int depth = 2;
    bool degrees = false, normalize_degrees = false;
    CLI::App* pairwise = app.add_subcommand("pairwise", "pairwise distance matrix over a TUDataset");
    pairwise->add_option("--tudataset", tu_dir, "dataset root directory")->required();
    pairwise->add_option("--name", tu_name, "dataset name")->required();
    pairwise->add_option("--depth", depth, "metric depth L");
    pairwise->add_option("--out", out_path, "output CSV")->required();
    pairwise->add_flag("--degrees", degrees, "use raw node degrees as attributes");
    pairwise->add_flag("--normalize-degrees", normalize_degrees,
                       "use degree/N as attributes (implies --degrees)");

    // ---- knn ----
    int splits = 10;
    double train_frac = 0.9;
    std::uint64_t seed = 0;
    std::string knn_out;
    CLI::App* knn = app.add_subcommand("knn", "1-NN classification over 90/10 splits");
    knn->add_option("--tudataset", tu_dir, "dataset root directory")->required();
    knn->add_option("--name", tu_name, "dataset name")->required();
    knn->add_option("--depth", depth, "metric depth L");
    knn->add_option("--splits", splits, "number of random splits");
    knn->add_option("--train-frac", train_frac, "training fraction");
    knn->add_option("--seed", seed, "split seed");
    knn->add_option("--out", knn_out, "optional per-split CSV");
    knn->add_flag("--degrees", degrees, "use raw node degrees as attributes");
    knn->add_flag("--normalize-degrees", normalize_degrees, "use degree/N as attributes");

    // ---- sbm-correlate ----
    std::string signal_name = "constant", model_name = "gin", out_dir = ".";
    int hidden = 16, layers = 2;
    CLI::App* sbm = app.add_subcommand("sbm-correlate",
                                       "metric vs MPNN output distance on the SBM sequence");
    sbm->add_option("--signal", signal_name, "constant | community | gaussian");
    sbm->add_option("--model", model_name, "gin | gc");
    sbm->add_option("--hidden", hidden, "hidden width");
    sbm->add_option("--layers", layers, "model layers");
    sbm->add_option("--depth", depth, "metric depth L");
    sbm->add_option("--seed", seed, "master seed");
    sbm->add_option("--out", out_dir, "output directory")->required();

    // ---- lipschitz-check ----
    int models = 100, pairs = 200;
    std::string family_mode = "both", lips_out;
    CLI::App* lips = app.add_subcommand("lipschitz-check",
                                        "max output distance over random models vs the bound");
    lips->add_option("--tudataset", tu_dir, "dataset root directory")->required();
    lips->add_option("--name", tu_name, "dataset name")->required();
    lips->add_option("--models", models, "number of random models");
    lips->add_option("--pairs", pairs, "sampled pair count (0 = all)");
    lips->add_option("--hidden", hidden, "hidden width");
    lips->add_option("--depth", depth, "model layers = metric depth");
    lips->add_option("--model", family_mode, "gin | gc | both");
    lips->add_option("--seed", seed, "master seed");
    lips->add_option("--out", lips_out, "output CSV");
    lips->add_flag("--degrees", degrees, "use raw node degrees as attributes");
    lips->add_flag("--normalize-degrees", normalize_degrees, "use degree/N as attributes");

    // ---- dataset-correlate ----
    long long anchor = 0;
    std::string corr_out;
    CLI::App* corr = app.add_subcommand("dataset-correlate",
                                        "metric vs one model's output distance from an anchor");
    corr->add_option("--tudataset", tu_dir, "dataset root directory")->required();
    corr->add_option("--name", tu_name, "dataset name")->required();
    corr->add_option("--anchor", anchor, "anchor graph index")->required();
    corr->add_option("--model", model_name, "gin | gc");
    corr->add_option("--hidden", hidden, "hidden width");
    corr->add_option("--layers", layers, "model layers");
    corr->add_option("--depth", depth, "metric depth L");
    corr->add_option("--seed", seed, "model seed");
    corr->add_option("--out", corr_out, "output CSV")->required();
    corr->add_flag("--degrees", degrees, "use raw node degrees as attributes");
    corr->add_flag("--normalize-degrees", normalize_degrees, "use degree/N as attributes");

    // ---- gen-sbm ----
    std::string blocks_text = "15,15", gen_out;
    double p = 0.5, q = 0.1;
    CLI::App* gen = app.add_subcommand("gen-sbm", "write one SBM draw as graph JSON");
    gen->add_option("--blocks", blocks_text, "comma separated block sizes");
    gen->add_option("--p", p, "intra-block probability");
    gen->add_option("--q", q, "inter-block probability");
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--out", gen_out, "output JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*dist) {
            const didm::GraphSignal a = didm::load_graph_json(left_path);
            const didm::GraphSignal b = didm::load_graph_json(right_path);
            std::printf("%.17g\n", didm::didm_distance(a, b, dist_depth));
            return 0;
        }

        if (*pairwise) {
            const didm::Dataset ds = load_dataset(tu_dir, tu_name, degrees, normalize_degrees);
            const didm::PairwiseReport report = didm::pairwise_distance_matrix(ds, depth);
            std::ostringstream config;
            config << "pairwise dataset=" << tu_name << " depth=" << depth
                   << " degrees=" << degrees << " normalize_degrees=" << normalize_degrees
                   << " graphs=" << ds.size();
            didm::write_distance_matrix_csv(report.distances, config.str(), out_path);
            std::cerr << report.pairs << " pairs in " << report.seconds << "s on "
                      << report.threads << " threads -> " << out_path << "\n";
            return 0;
        }

        if (*knn) {
            const didm::Dataset ds = load_dataset(tu_dir, tu_name, degrees, normalize_degrees);
            const didm::KnnResult result =
                didm::knn_experiment(ds, depth, splits, train_frac, seed);
            std::ostringstream config;
            config << "knn dataset=" << tu_name << " depth=" << depth << " splits=" << splits
                   << " train_frac=" << train_frac << " split_seed=" << seed
                   << " degrees=" << degrees << " normalize_degrees=" << normalize_degrees;
            if (!knn_out.empty()) didm::write_knn_csv(result, config.str(), knn_out);
            std::printf("accuracy: %.4f +- %.4f (pairwise %.1fs, %d redrawn splits)\n",
                        result.mean_accuracy, result.std_accuracy, result.pairwise_seconds,
                        result.redrawn_splits);
            return 0;
        }

        if (*sbm) {
            didm::ExperimentConfig config;
            config.kind = didm::ExperimentKind::sbm_correlate;
            config.signal = parse_signal(signal_name);
            config.family = parse_family(model_name);
            config.hidden = hidden;
            config.model_layers = layers;
            config.depth = depth;
            config.graph_seed = seed;
            config.model_seed = didm::derive_seed(seed, 777);
            const didm::CorrelationResult result = didm::sbm_correlation_experiment(config);
            const auto out_file = std::filesystem::path(out_dir) /
                                  ("sbm_" + signal_name + "_" + model_name + ".csv");
            didm::write_correlation_csv(result, config.describe(), "q", out_file);
            std::printf("pearson_r: %.6f -> %s\n", result.pearson_r, out_file.c_str());
            return 0;
        }

        if (*lips) {
            const didm::Dataset ds = load_dataset(tu_dir, tu_name, degrees, normalize_degrees);
            std::optional<didm::MpnnModel::Family> family;
            if (family_mode != "both") family = parse_family(family_mode);
            const didm::LipschitzCheckResult result = didm::lipschitz_check_experiment(
                ds, depth, models, pairs, family, hidden, seed);
            std::ostringstream config;
            config << "lipschitz_check dataset=" << tu_name << " depth=" << depth
                   << " models=" << models << " pairs=" << result.rows.size()
                   << " hidden=" << hidden << " family=" << family_mode << " seed=" << seed;
            if (!lips_out.empty()) didm::write_lipschitz_csv(result, config.str(), lips_out);
            std::printf("pairs: %zu  maxC: %.6g  violations: %d\n", result.rows.size(),
                        result.max_model_lipschitz, result.violations);
            return result.violations == 0 ? 0 : 1;
        }

        if (*corr) {
            const didm::Dataset ds = load_dataset(tu_dir, tu_name, degrees, normalize_degrees);
            didm::ExperimentConfig config;
            config.kind = didm::ExperimentKind::dataset_correlate;
            config.dataset_name = tu_name;
            config.family = parse_family(model_name);
            config.hidden = hidden;
            config.model_layers = layers;
            config.depth = depth;
            config.model_seed = seed;
            const didm::CorrelationResult result =
                didm::dataset_correlation_experiment(ds, anchor, config);
            didm::write_correlation_csv(result, config.describe() + " anchor=" +
                                        std::to_string(anchor), "graph", corr_out);
            std::printf("pearson_r: %.6f -> %s\n", result.pearson_r, corr_out.c_str());
            return 0;
        }

        if (*gen) {
            didm::SbmSpec spec;
            spec.block_sizes = parse_blocks(blocks_text);
            spec.intra_p = p;
            spec.inter_q = q;
            spec.seed = seed;
            didm::save_graph_json(didm::generate_sbm(spec), gen_out);
            std::cerr << "wrote " << gen_out << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
