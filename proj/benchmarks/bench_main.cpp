#include "lmc/chaos.hpp"
#include "lmc/malliavin.hpp"
#include "lmc/presets.hpp"
#include "lmc/sde.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

using namespace lmc;

namespace {

std::shared_ptr<LevyTriplet const> compound(double rate)
{
    LevyTriplet t;
    t.nu = LevyMeasure(DiscreteMeasure{{{1.0, 0.5 * rate}, {-0.5, 0.5 * rate}}});
    t.sigma = 0.5;
    return std::make_shared<LevyTriplet const>(t);
}

void simulate(benchmark::State& state)
{
    auto const trip = compound(static_cast<double>(state.range(0)));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_path(trip, 64, seed++));
    }
}
BENCHMARK(simulate)->Arg(5)->Arg(50)->Arg(500);

void multiple(benchmark::State& state)
{
    auto const trip = compound(20.0);
    auto const path = simulate_path(trip, 64, 7);
    auto const phi = product_integrand(time_independent_kernel([](double x) { return std::cos(x); }),
                                       static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(multiple_integral(path, JumpSet::all_nonzero(), phi));
    }
}
BENCHMARK(multiple)->DenseRange(1, 4);

void duality(benchmark::State& state)
{
    auto const d = make_duality_preset("poisson-tanh");
    MCConfig mc;
    mc.n_paths = static_cast<std::size_t>(state.range(0));
    mc.threads = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(duality_residual(mc, d.triplet, d.F, d.g, d.lambda, d.k));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(duality)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void additive_derivative(benchmark::State& state)
{
    auto const trip = compound(10.0);
    AdditiveJumpSDE sde{[](double z) { return z + std::sin(z); }, [](double z) { return 1.0 + std::cos(z); },
                        [](double x) { return x; }, 0.1, "bench"};
    auto const flow = make_flow(sde.f, sde.df, trip->horizon);
    auto const k = monotone_weight(sde.h, Monotone::increasing);
    std::uint64_t seed = 1;
    for (auto _ : state) {
        auto const path = simulate_path(trip, 64, seed++);
        auto const traj = solve_additive_jump(path, sde, flow);
        benchmark::DoNotOptimize(derivative_additive(traj, sde, k));
    }
}
BENCHMARK(additive_derivative)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
