#include "cellcast/eval.hpp"
#include "cellcast/lma.hpp"
#include "cellcast/model.hpp"
#include "cellcast/network.hpp"
#include "cellcast/rng.hpp"

#include <benchmark/benchmark.h>

using namespace cellcast;

namespace {

NetworkParams random_params(std::size_t input, std::size_t hidden, std::size_t layers) {
    TrainConfig cfg;
    cfg.hidden_size = hidden;
    cfg.num_layers = layers;
    return initialize_params(input, cfg);
}

struct Window {
    std::vector<double> lagged;
    std::vector<double> targets;
    Matrix cov;
};

Window random_window(std::size_t len, std::size_t channels) {
    Rng rng(1);
    Window w;
    w.targets.resize(len);
    w.lagged.resize(len);
    for (auto& v : w.targets) v = rng.exponential(1000.0);
    for (std::size_t t = 1; t < len; ++t) w.lagged[t] = w.targets[t - 1];
    w.cov = Matrix(len, channels);
    for (auto& v : w.cov.data()) v = rng.normal();
    return w;
}

} // namespace

// Training-sized window: 62 + 31 steps, two LMA channels.
static void BM_WindowLossAndGrad(benchmark::State& state) {
    const auto hidden = static_cast<std::size_t>(state.range(0));
    const auto params = random_params(3, hidden, 2);
    const auto w = random_window(93, 2);
    for (auto _ : state) {
        auto r = window_loss_and_grad(w.lagged, w.targets, w.cov, params, 1000.0, 1e-6);
        benchmark::DoNotOptimize(r.loss);
    }
}
BENCHMARK(BM_WindowLossAndGrad)->Arg(8)->Arg(40);

static void BM_ForwardWindow(benchmark::State& state) {
    const auto params = random_params(3, 40, 2);
    const auto w = random_window(93, 2);
    for (auto _ : state) {
        auto r = forward_window(w.lagged, w.cov, params, 1000.0, 1e-6);
        benchmark::DoNotOptimize(r.theta.data());
    }
}
BENCHMARK(BM_ForwardWindow);

static void BM_LmaFeatures(benchmark::State& state) {
    Rng rng(2);
    std::vector<double> z(static_cast<std::size_t>(state.range(0)));
    for (auto& v : z) v = rng.exponential(1000.0);
    LmaConfig cfg;
    for (auto _ : state) {
        auto out = lma_features(z, cfg);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_LmaFeatures)->Arg(181)->Arg(2000);

static void BM_RmslePooled(benchmark::State& state) {
    Rng rng(3);
    Matrix a(1000, 31), p(1000, 31);
    for (auto& v : a.data()) v = rng.exponential(1000.0);
    for (auto& v : p.data()) v = rng.exponential(1000.0);
    for (auto _ : state) benchmark::DoNotOptimize(rmsle_pooled(a, p));
}
BENCHMARK(BM_RmslePooled);
BENCHMARK_MAIN();
