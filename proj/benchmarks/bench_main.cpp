#include <benchmark/benchmark.h>

#include <random>

#include "didm/experiments.hpp"
#include "didm/metric.hpp"
#include "didm/mpnn.hpp"
#include "didm/ot.hpp"

namespace {

didm::GraphSignal sbm_graph(std::uint64_t seed, double q = 0.3) {
    didm::SbmSpec spec;
    spec.block_sizes = {15, 15};
    spec.intra_p = 0.5;
    spec.inter_q = q;
    spec.seed = seed;
    return didm::degrees_as_attributes(didm::generate_sbm(spec));
}

void BM_UnbalancedOt(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::MatrixXd cost(n, n);
    Eigen::VectorXd mu(n), nu(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        mu[i] = unit(rng) / static_cast<double>(n);
        nu[i] = unit(rng) / static_cast<double>(n);
        for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = unit(rng);
    }
    const didm::DiscreteMeasure m1{mu}, m2{nu};
    for (auto _ : state) {
        benchmark::DoNotOptimize(didm::solve_unbalanced_ot(cost, m1, m2).objective);
    }
}
BENCHMARK(BM_UnbalancedOt)->Arg(4)->Arg(16)->Arg(30)->Arg(64);

void BM_DidmDistance(benchmark::State& state) {
    const int depth = static_cast<int>(state.range(0));
    const didm::GraphSignal a = sbm_graph(1, 0.1);
    const didm::GraphSignal b = sbm_graph(2, 0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(didm::didm_distance(a, b, depth));
    }
}
BENCHMARK(BM_DidmDistance)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ForwardGin(benchmark::State& state) {
    const didm::GraphSignal g = sbm_graph(3);
    const didm::MpnnModel model = didm::init_gin_meanpool(2, 16, 1, 16, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(didm::forward(model, g).graph_output);
    }
}
BENCHMARK(BM_ForwardGin);

void BM_LipschitzConstants(benchmark::State& state) {
    const didm::MpnnModel model = didm::init_gin_meanpool(3, 32, 8, 32, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(didm::lipschitz_constants(model, 1.0).model_lipschitz);
    }
}
BENCHMARK(BM_LipschitzConstants);

}  // namespace

BENCHMARK_MAIN();
