// Microbenchmarks for the deterministic rule tier: single-pair labeling over
// a mixed fixture and pairwise labeling of a long chronological stream.

#include <benchmark/benchmark.h>

#include <vector>

#include "tlecascade/dynamics.hpp"
#include "tlecascade/rules.hpp"
#include "tlecascade/tle.hpp"

namespace {

using namespace tlecascade;

TleRecord at_altitude(double alt_km, double epoch_s) {
  TleRecord r;
  r.norad_id = 70001;
  r.epoch = epoch_s;
  r.mean_motion = sma_to_mean_motion((kMeanEarthRadiusKm + alt_km) * 1000.0);
  r.eccentricity = 0.001;
  r.inclination = 53.0;
  r.raan = 120.0;
  r.argp = 40.0;
  r.mean_anomaly = 10.0;
  r.bstar = 1e-4;
  return r;
}

// quiet pairs, maneuvers, decays, and a reentry: a realistic label mix
std::vector<std::pair<TleRecord, TleRecord>> mixed_pairs() {
  std::vector<std::pair<TleRecord, TleRecord>> pairs;
  auto add = [&](TleRecord prev, TleRecord cur) {
    cur.epoch = 3600.0;
    pairs.emplace_back(prev, cur);
  };
  add(at_altitude(550, 0), at_altitude(550.4, 0));  // quiet
  add(at_altitude(550, 0), at_altitude(548.9, 0));  // quiet
  add(at_altitude(550, 0), at_altitude(565, 0));    // altitude jump
  {
    TleRecord p = at_altitude(550, 0), c = at_altitude(550, 0);
    c.inclination = 53.2;
    add(p, c);  // inclination jump
  }
  add(at_altitude(390, 0), at_altitude(383, 0));  // low-altitude drop
  add(at_altitude(300, 0), at_altitude(200, 0));  // reentry
  {
    TleRecord p = at_altitude(550, 0), c = at_altitude(550, 0);
    p.bstar = 1e-2;
    c.bstar = 2.5e-2;
    add(p, c);  // drag-term ratio jump
  }
  add(at_altitude(700, 0), at_altitude(699.5, 0));  // quiet
  return pairs;
}

void BM_RulePair(benchmark::State& state) {
  const auto pairs = mixed_pairs();
  std::size_t i = 0, nonnormal = 0;
  for (auto _ : state) {
    const auto& p = pairs[i % pairs.size()];
    nonnormal += rule_label(p.first, p.second) != Label::NORMAL;
    ++i;
  }
  benchmark::DoNotOptimize(nonnormal);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_RulePair);

void BM_RuleSequence(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  std::vector<TleRecord> stream;
  stream.reserve(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) {
    TleRecord r = at_altitude(550.0 - 0.01 * static_cast<double>(k % 100),
                              28800.0 * static_cast<double>(k));
    if (k % 97 == 0) r.inclination += 0.2;  // sprinkle maneuvers
    stream.push_back(r);
  }
  for (auto _ : state) {
    const auto labels = rule_label_sequence(stream);
    benchmark::DoNotOptimize(labels.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_RuleSequence)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
