#include <benchmark/benchmark.h>

#include <numbers>
#include <random>
#include <vector>

#include "evac/dataset.hpp"
#include "evac/dyngraph.hpp"
#include "evac/features.hpp"
#include "evac/neural.hpp"
#include "evac/oracle.hpp"
#include "evac/quantum_film.hpp"

namespace {

struct Inputs {
    std::vector<double> main, epi, params, upstream;
};

Inputs quantum_inputs() {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Inputs in;
    in.main.resize(34);
    in.epi.resize(2);
    in.params.resize(228);
    in.upstream.resize(5);
    for (auto &v : in.main) v = u(rng);
    for (auto &v : in.epi) v = u(rng);
    for (auto &v : in.params) v = 2 * std::numbers::pi * u(rng);
    for (auto &v : in.upstream) v = u(rng) - 0.5;
    return in;
}

void BM_QuantumForward(benchmark::State &state) {
    const evac::qsim::QuantumFilm model;
    const auto in = quantum_inputs();
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.forward(in.main, in.epi, in.params));
    }
}
BENCHMARK(BM_QuantumForward)->Unit(benchmark::kMicrosecond);

void BM_QuantumShiftJacobian(benchmark::State &state) {
    const evac::qsim::QuantumFilm model;
    const auto in = quantum_inputs();
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.evaluate(in.main, in.epi, in.params, true));
    }
}
BENCHMARK(BM_QuantumShiftJacobian)->Unit(benchmark::kMillisecond);

void BM_QuantumAdjointVjp(benchmark::State &state) {
    const evac::qsim::QuantumFilm model;
    const auto in = quantum_inputs();
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.vjp(in.main, in.epi, in.params, in.upstream));
    }
}
BENCHMARK(BM_QuantumAdjointVjp)->Unit(benchmark::kMicrosecond);

void BM_FilmNetForward(benchmark::State &state) {
    const evac::FilmNet net;
    std::vector<double> params(net.parameter_count());
    net.init(params, 2);
    const auto in = quantum_inputs();
    for (auto _ : state) {
        benchmark::DoNotOptimize(net.forward(params, in.main, in.epi));
    }
}
BENCHMARK(BM_FilmNetForward)->Unit(benchmark::kMicrosecond);

void BM_Dijkstra(benchmark::State &state) {
    const auto n = static_cast<int>(state.range(0));
    const auto g = evac::synth_city(n, n, 7);
    const auto w = evac::nominal_weights(g);
    const auto goal = g.id_at(g.node_count() - 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evac::dijkstra(g, w, g.id_at(0), goal));
    }
}
BENCHMARK(BM_Dijkstra)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_EdgeBetweenness(benchmark::State &state) {
    const auto n = static_cast<int>(state.range(0));
    const auto g = evac::synth_city(n, n, 7);
    const auto w = evac::nominal_weights(g);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evac::edge_betweenness(g, w));
    }
}
BENCHMARK(BM_EdgeBetweenness)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_EnvironmentAdvance(benchmark::State &state) {
    const auto g = evac::synth_city(8, 8, 7);
    const auto exits = evac::default_exits(g);
    auto sc = evac::sample_scenario(g, exits, 3, 0);
    sc.max_steps = 1 << 30;
    evac::Environment env(g, sc);
    for (auto _ : state) {
        benchmark::DoNotOptimize(env.advance());
    }
}
BENCHMARK(BM_EnvironmentAdvance);

} // namespace

BENCHMARK_MAIN();
