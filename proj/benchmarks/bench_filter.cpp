// Microbenchmarks for the filter tier: sigma-point generation and full
// interacting-model update steps at observation cadences of one and eight
// hours (cost is dominated by the segmented covariance prediction).

#include <benchmark/benchmark.h>

#include "tlecascade/dynamics.hpp"
#include "tlecascade/filter.hpp"
#include "tlecascade/synth.hpp"

namespace {

using namespace tlecascade;

struct Fixture {
  ForceConfig force;
  ImmConfig imm;
  UkfConfig ukf;
  ObsNoise noise;
  std::array<ModeConfig, kModeCount> modes = default_modes();
  SynthResult data;
  ImmState warm;

  explicit Fixture(double cadence_h) {
    Scenario sc;
    sc.norad_id = 60001;
    sc.mean_motion = 15.05;
    sc.bstar = 2e-6;
    sc.seed = 3;
    sc.schedule_dt_h.assign(8, cadence_h);
    data = generate(sc, force);
    warm = init_state(data.records[0], imm, noise, force);
    for (std::size_t k = 1; k + 1 < data.records.size(); ++k)
      imm_step(warm, data.records[k], imm, ukf, modes, noise, force);
  }
};

void BM_SigmaPoints(benchmark::State& state) {
  const Fixture fx(1.0);
  const Vector6d mean = fx.warm.mean[0];
  const Matrix6d cov = fx.warm.cov[0];
  for (auto _ : state) {
    const SigmaPoints pts = sigma_points(mean, cov, fx.ukf);
    benchmark::DoNotOptimize(pts.points.data());
  }
}
BENCHMARK(BM_SigmaPoints);

void BM_ImmStep(benchmark::State& state) {
  const double cadence_h = static_cast<double>(state.range(0));
  const Fixture fx(cadence_h);
  const TleRecord& next = fx.data.records.back();
  for (auto _ : state) {
    ImmState st = fx.warm;
    const ImmStepResult r =
        imm_step(st, next, fx.imm, fx.ukf, fx.modes, fx.noise, fx.force);
    benchmark::DoNotOptimize(r.log_likelihood.data());
  }
}
BENCHMARK(BM_ImmStep)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
