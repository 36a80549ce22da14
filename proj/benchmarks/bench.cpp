// Microbenchmarks for the hot paths: forward passes, input gradients,
// prediction sensitivity, training steps, and ROC construction.

#include <benchmark/benchmark.h>

#include <vector>

#include "fairsense/audit.hpp"
#include "fairsense/monitor.hpp"
#include "fairsense/nn.hpp"
#include "fairsense/rng.hpp"
#include "fairsense/synthetic.hpp"

using namespace fairsense;

namespace {

NetworkParams make_network(std::size_t input_dim, std::size_t width, std::uint64_t seed) {
    NetworkSpec spec;
    spec.input_dim = input_dim;
    spec.hidden_widths = {width};
    spec.seed = seed;
    return init_network(spec);
}

std::vector<double> make_input(std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(dim);
    for (double& v : x) v = rng.normal();
    return x;
}

void BM_Forward(benchmark::State& state) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    const auto width = static_cast<std::size_t>(state.range(1));
    const NetworkParams params = make_network(dim, width, 1);
    const std::vector<double> x = make_input(dim, 2);
    for (auto _ : state) benchmark::DoNotOptimize(forward(params, x));
}
BENCHMARK(BM_Forward)->Args({3, 16})->Args({95, 32})->Args({399, 256});

void BM_InputGradient(benchmark::State& state) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    const auto width = static_cast<std::size_t>(state.range(1));
    const NetworkParams params = make_network(dim, width, 3);
    const std::vector<double> x = make_input(dim, 4);
    for (auto _ : state) benchmark::DoNotOptimize(input_gradient(params, x));
}
BENCHMARK(BM_InputGradient)->Args({3, 16})->Args({95, 32})->Args({399, 256});

void BM_PredictionSensitivity(benchmark::State& state) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    const auto width = static_cast<std::size_t>(state.range(1));
    const NetworkParams a = make_network(dim, width, 5);
    const NetworkParams f = make_network(dim, width, 6);
    const std::vector<double> x = make_input(dim, 7);
    for (auto _ : state) benchmark::DoNotOptimize(prediction_sensitivity(a, f, x));
}
BENCHMARK(BM_PredictionSensitivity)->Args({95, 32})->Args({399, 256});

void BM_TrainEpoch(benchmark::State& state) {
    CausalModelSpec spec;
    spec.n_samples = static_cast<std::size_t>(state.range(0));
    spec.seed = 11;
    const TabularDataset data = generate_fair_synthetic(spec);
    NetworkSpec net;
    net.input_dim = 3;
    net.hidden_widths = {16};
    net.seed = 12;
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.shuffle_seed = 13;
    const NetworkParams params = init_network(net);
    for (auto _ : state)
        benchmark::DoNotOptimize(train(params, data, cfg, TrainTarget::Label));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(spec.n_samples));
}
BENCHMARK(BM_TrainEpoch)->Arg(2000)->Arg(10000);

void BM_RocCurve(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(21);
    std::vector<double> scores(n);
    std::vector<std::uint8_t> positives(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = rng.normal();
        positives[i] = rng.bernoulli(0.3) ? 1 : 0;
    }
    positives[0] = 1;
    positives[1] = 0;
    for (auto _ : state) benchmark::DoNotOptimize(roc_curve(scores, positives));
}
BENCHMARK(BM_RocCurve)->Arg(1000)->Arg(10000);

void BM_MonitorScore(benchmark::State& state) {
    CausalModelSpec spec;
    spec.n_samples = 500;
    spec.seed = 31;
    const TabularDataset reference = generate_fair_synthetic(spec);
    const NetworkParams f = make_network(3, 16, 32);
    const NetworkParams a = make_network(3, 16, 33);
    const Baseline baseline = compute_baseline(f, a, reference);
    const Monitor monitor(f, a, baseline);
    const std::vector<std::string> names = reference.column_names();
    std::size_t row = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            monitor.score(row, reference.features.row(row % reference.n_rows()), names));
        ++row;
    }
}
BENCHMARK(BM_MonitorScore);

} // namespace

BENCHMARK_MAIN();
