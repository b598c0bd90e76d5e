#include <benchmark/benchmark.h>

#include "eflh/evaluation.hpp"
#include "eflh/meta.hpp"

using namespace eflh;

namespace {

LossStream linear_stream(long horizon, std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.kind = ScenarioKind::PiecewiseLinear;
    cfg.horizon = horizon;
    cfg.dim = 2;
    cfg.radius = 1.0;
    cfg.n_segments = 8;
    cfg.seed = seed;
    return gen_piecewise_linear(cfg);
}

void BM_ScheduleReplayBasic(benchmark::State& state) {
    ProblemConstants pc;
    pc.horizon = state.range(0);
    for (auto _ : state) {
        const auto stats = replay_stats(ScheduleKind::basic(), pc);
        benchmark::DoNotOptimize(stats.max_active);
    }
}
BENCHMARK(BM_ScheduleReplayBasic)->Arg(1 << 16)->Arg(1 << 20);

void BM_ScheduleReplayDyadic(benchmark::State& state) {
    ProblemConstants pc;
    pc.horizon = state.range(0);
    for (auto _ : state) {
        const auto stats = replay_stats(ScheduleKind::dyadic(), pc);
        benchmark::DoNotOptimize(stats.max_active);
    }
}
BENCHMARK(BM_ScheduleReplayDyadic)->Arg(1 << 16)->Arg(1 << 20);

void BM_CoverageWitness(benchmark::State& state) {
    ProblemConstants pc;
    pc.horizon = 512;
    pc.tower_epsilon = 0.3;
    const ScheduleReplay replay(ScheduleKind::full(0.3), pc);
    long t = 64;
    for (auto _ : state) {
        const auto w = replay.witness(3, t);
        benchmark::DoNotOptimize(w);
        t = 64 + (t + 17) % 448;
    }
}
BENCHMARK(BM_CoverageWitness);

void BM_RunGame(benchmark::State& state) {
    const LossStream stream = linear_stream(state.range(0), 5);
    const auto algo = make_algo(state.range(1) == 0 ? "eflh-basic" : "flh-baseline", 0.0, stream);
    RunOptions opts;
    opts.record_expert_losses = false;
    for (auto _ : state) {
        const auto trace = run_game(algo, stream, opts);
        benchmark::DoNotOptimize(trace.rounds.back().cum_loss);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunGame)->Args({1024, 0})->Args({1024, 1})->Args({8192, 0})->Args({8192, 1});

void BM_NewtonStep(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    const Ball ball = Ball::unit(dim);
    ProblemConstants pc;
    pc.lipschitz = 4.0;
    pc.diameter = 2.0;
    pc.horizon = 1024;
    pc.exp_concavity = 0.1;
    Expert e = spawn_expert(1, 1 << 20, LearnerKind::NewtonStep, ball, pc);
    PortableRng rng(3);
    const Vec g = rng.in_ball(dim, 1.0);
    for (auto _ : state) {
        ons_step(e, g, ball, pc);
        benchmark::DoNotOptimize(e.point);
    }
}
BENCHMARK(BM_NewtonStep)->Arg(2)->Arg(8)->Arg(32);

void BM_OfflineOracleSweep(benchmark::State& state) {
    const LossStream stream = linear_stream(1024, 5);
    const auto trace = run_game(make_algo("eflh-basic", 0.0, stream), stream);
    for (auto _ : state) {
        const auto table = adaptive_regret_sweep(trace, stream, {64, 256});
        benchmark::DoNotOptimize(table.front().max_regret);
    }
}
BENCHMARK(BM_OfflineOracleSweep);

} // namespace

BENCHMARK_MAIN();
