// Microbenchmarks for the hot loops: substep evolution, correction
// (resampling), quadrature and the closed-form reference filter.
#include <benchmark/benchmark.h>

#include "gmf/error_analysis.hpp"
#include "gmf/filter.hpp"
#include "gmf/gaussmix.hpp"
#include "gmf/oracles.hpp"
#include "gmf/paths.hpp"

namespace {

using namespace gmf;

const TimeGrid kGrid = TimeGrid::create(1e-3, 0.05, 1.0);

ObservationPath bench_obs(const Model& m, const TimeGrid& g) {
  RngStream sig(12345, kSignalStream), obs(12345, kObservationStream);
  SignalPath s = simulate_signal(m, g, sig);
  return simulate_observation(m, s, obs);
}

void BM_EvolveSubstep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Model m = make_builtin_model("linear_ou");
  FilterConfig cfg = FilterConfig::from_epsilon(n, 0.5, 1.0, kGrid);
  RngStream rng(1, kParticleStreamBase);
  const FilterState base = init_filter(cfg, m, rng);
  FilterState s = base;
  for (auto _ : state) {
    if (s.step == kGrid.steps_per_correction) {  // boundary: restart interval
      state.PauseTiming();
      s = base;
      state.ResumeTiming();
    }
    evolve_substep(s, 0.01, cfg, m, rng);
    benchmark::DoNotOptimize(s.particles.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_EvolveSubstep)->Arg(100)->Arg(1000)->Arg(10000);

void BM_Correction(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Model m = make_builtin_model("linear_ou");
  FilterConfig cfg = FilterConfig::from_epsilon(n, 0.5, 1.0, kGrid);
  RngStream rng(2, kParticleStreamBase);
  FilterState base = init_filter(cfg, m, rng);
  for (long k = 0; k < kGrid.steps_per_correction; ++k)
    evolve_substep(base, 0.01, cfg, m, rng);
  for (auto _ : state) {
    FilterState s = base;
    correct(s, cfg, rng);
    benchmark::DoNotOptimize(s.particles.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Correction)->Arg(100)->Arg(1000)->Arg(10000);

void BM_GaussExpect(benchmark::State& state) {
  TestFunction phi = make_test_function("sin");
  double v = 0.3, w = 0.25;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gauss_expect({v, w}, phi));
    v += 1e-6;  // defeat caching of a constant argument
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GaussExpect);

void BM_MultinomialOffspring(benchmark::State& state) {
  const long n = state.range(0);
  RngStream rng(3, 0);
  std::vector<double> w(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& x : w) {
    x = rng.uniform() + 0.01;
    total += x;
  }
  for (auto& x : w) x /= total;
  for (auto _ : state) {
    auto counts = multinomial_offspring(w, n, rng);
    benchmark::DoNotOptimize(counts.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_MultinomialOffspring)->Arg(100)->Arg(1000)->Arg(10000);

void BM_KalmanBucy(benchmark::State& state) {
  Model m = make_builtin_model("linear_ou");
  ObservationPath obs = bench_obs(m, kGrid);
  for (auto _ : state) {
    MomentPath mp = kalman_bucy(m, obs);
    benchmark::DoNotOptimize(mp.mean.data());
  }
  state.SetItemsProcessed(state.iterations() * kGrid.steps);
}
BENCHMARK(BM_KalmanBucy);

void BM_FullFilterRun(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Model m = make_builtin_model("linear_ou");
  TimeGrid g = TimeGrid::create(1e-3, 0.05, 0.25);
  ObservationPath obs = bench_obs(m, g);
  FilterConfig cfg = FilterConfig::from_epsilon(n, 0.5, 1.0, g);
  RunOptions options;
  options.mode = RecordMode::kTerminal;
  options.phis = {make_test_function("x")};
  std::uint64_t stream = kParticleStreamBase;
  for (auto _ : state) {
    RngStream rng(4, stream++);
    FilterTrajectory traj = run_filter(cfg, m, obs, options, rng);
    benchmark::DoNotOptimize(traj.rho_one.data());
  }
  state.SetItemsProcessed(state.iterations() * n * g.steps);
}
BENCHMARK(BM_FullFilterRun)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
