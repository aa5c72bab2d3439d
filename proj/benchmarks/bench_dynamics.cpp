// Microbenchmarks for the propagator and element conversions.

#include <benchmark/benchmark.h>

#include <numbers>

#include "tlecascade/dynamics.hpp"

namespace {

using namespace tlecascade;

EciState leo_state(const ForceConfig& cfg) {
  KeplerElements el;
  el.a = 6921000.0;
  el.e = 0.001;
  el.i = 53.0 * std::numbers::pi / 180.0;
  el.raan = 2.1;
  el.argp = 0.7;
  el.mean_anomaly = 0.3;
  return kepler_to_eci(el, cfg.mu);
}

void BM_Rk4Step(benchmark::State& state) {
  const ForceConfig cfg;
  const EciState s0 = leo_state(cfg);
  for (auto _ : state) {
    // step from a fixed state: iterating in place would slowly deorbit
    EciState s1 = rk4_step(s0, 60.0, cfg, 1e-4);
    benchmark::DoNotOptimize(s1.r.data());
  }
}
BENCHMARK(BM_Rk4Step);

void BM_PropagateHour(benchmark::State& state) {
  const ForceConfig cfg;
  const EciState s0 = leo_state(cfg);
  for (auto _ : state) {
    const EciState s1 = propagate(s0, 0.0, 3600.0, cfg, 1e-4, 60.0);
    benchmark::DoNotOptimize(s1.r[0]);
  }
}
BENCHMARK(BM_PropagateHour);

void BM_ElementRoundTrip(benchmark::State& state) {
  const ForceConfig cfg;
  KeplerElements el;
  el.a = 7.2e6;
  el.e = 0.12;
  el.i = 1.1;
  el.raan = 2.9;
  el.argp = 4.4;
  el.mean_anomaly = 5.2;
  for (auto _ : state) {
    const KeplerElements back = eci_to_kepler(kepler_to_eci(el, cfg.mu), cfg.mu);
    benchmark::DoNotOptimize(back.a);
  }
}
BENCHMARK(BM_ElementRoundTrip);

void BM_SolveKepler(benchmark::State& state) {
  double m = 0.1;
  for (auto _ : state) {
    const double e_anom = solve_kepler(m, 0.7);
    benchmark::DoNotOptimize(e_anom);
    m += 1e-3;
    if (m > 6.2) m = 0.1;
  }
}
BENCHMARK(BM_SolveKepler);

}  // namespace

BENCHMARK_MAIN();
