#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "tlecascade/dynamics.hpp"
#include "tlecascade/error.hpp"
#include "tlecascade/filter.hpp"
#include "tlecascade/synth.hpp"

using namespace tlecascade;

namespace {

bool is_spd(const Matrix6d& p) {
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-6 * p.cwiseAbs().maxCoeff()) return false;
  return Eigen::LLT<Matrix6d>(p).info() == Eigen::Success;
}

Matrix6d random_spd(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix6d a;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) a(i, j) = g(rng);
  return scale * (a * a.transpose()) + 1e-3 * scale * Matrix6d::Identity();
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::Io;
}

TleRecord obs_at(double alt_km, UnixSeconds epoch = 1.7e9) {
  TleRecord r;
  r.norad_id = 70000;
  r.epoch = epoch;
  r.mean_motion = sma_to_mean_motion((kMeanEarthRadiusKm + alt_km) * 1000.0);
  r.eccentricity = 0.001;
  r.inclination = 53.0;
  r.raan = 120.0;
  r.argp = 40.0;
  r.mean_anomaly = 10.0;
  r.bstar = 1e-5;
  return r;
}

}  // namespace

TEST_CASE("observation covariance diagonal reflects the source") {
  const ObsNoise n;
  const Vector6d tle = n.diagonal(Source::TLE);
  const Vector6d sup = n.diagonal(Source::SUPGP);
  for (int i = 0; i < 3; ++i) {
    CHECK(tle(i) == doctest::Approx(1.0e6));     // (1000 m)^2
    CHECK(tle(i + 3) == doctest::Approx(1.0));   // (1 m/s)^2
    CHECK(sup(i) == doctest::Approx(2500.0));    // (50 m)^2
    CHECK(sup(i + 3) == doctest::Approx(0.0025));
  }
}

TEST_CASE("sigma point weights reconstruct mean and covariance") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g(0.0, 1.0);
  const UkfConfig cfg;
  for (int trial = 0; trial < 50; ++trial) {
    Vector6d mean;
    for (int i = 0; i < 6; ++i) mean(i) = 1e6 * g(rng);
    const Matrix6d cov = random_spd(rng, 1e4);

    const SigmaPoints sp = sigma_points(mean, cov, cfg);
    // alpha = 0.01 puts the individual weights near +-1e4; their sum reaches 1
    // only through cancellation, so the achievable error is ~1e4 * epsilon
    CHECK(std::fabs(sp.wm.sum() - 1.0) < 1e-9);

    Vector6d m = Vector6d::Zero();
    for (int k = 0; k < kSigmaCount; ++k) m += sp.wm(k) * sp.points.col(k);
    CHECK((m - mean).norm() < 1e-9 * (1.0 + mean.norm()));

    Matrix6d p = Matrix6d::Zero();
    for (int k = 0; k < kSigmaCount; ++k) {
      const Vector6d d = sp.points.col(k) - mean;
      p += sp.wc(k) * (d * d.transpose());
    }
    CHECK((p - cov).cwiseAbs().maxCoeff() < 1e-7 * cov.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("sigma points survive a borderline covariance and reject a broken one") {
  const UkfConfig cfg;
  const Vector6d mean = Vector6d::Zero();

  // rank-deficient: needs the jitter retry, must not throw
  Matrix6d low = Matrix6d::Zero();
  low.diagonal() << 1.0, 1.0, 1.0, 1.0, 1.0, 0.0;
  CHECK_NOTHROW(sigma_points(mean, low, cfg));

  Matrix6d broken = Matrix6d::Identity();
  broken(5, 5) = -1.0;  // beyond any jitter rescue
  CHECK(code_of([&] { sigma_points(mean, broken, cfg); }) == ErrorCode::NotPositiveDefinite);
}

TEST_CASE("altitude adaptation keeps its transition matrix stochastic") {
  const ImmConfig cfg;
  for (double h : {120.0, 200.0, 275.0, 350.0, 430.0, 500.0, 550.0, 800.0, 1200.0}) {
    const AltitudeAdaptation ad = adapt_to_altitude(h, cfg);
    CHECK(std::fabs(ad.priors.sum() - 1.0) < 1e-12);
    for (int r = 0; r < 3; ++r) {
      CHECK(std::fabs(ad.transition.row(r).sum() - 1.0) < 1e-12);
      for (int c = 0; c < 3; ++c) CHECK(ad.transition(r, c) >= 0.0);
    }
  }
}

TEST_CASE("altitude adaptation interpolates priors between the regime anchors") {
  const ImmConfig cfg;
  const AltitudeAdaptation high = adapt_to_altitude(550.0, cfg);
  CHECK(high.priors(0) == doctest::Approx(cfg.prior_high(0)).epsilon(1e-12));
  CHECK(high.priors(2) == doctest::Approx(cfg.prior_high(2)).epsilon(1e-12));

  const AltitudeAdaptation low = adapt_to_altitude(150.0, cfg);
  CHECK(low.priors(0) == doctest::Approx(cfg.prior_low(0)).epsilon(1e-12));
  CHECK(low.priors(2) == doctest::Approx(cfg.prior_low(2)).epsilon(1e-12));

  // halfway between the 200 and 500 km anchors
  const AltitudeAdaptation mid = adapt_to_altitude(350.0, cfg);
  CHECK(mid.priors(0) == doctest::Approx(0.5 * (cfg.prior_low(0) + cfg.prior_high(0)))
                             .epsilon(1e-12));
}

TEST_CASE("decay pressure ramps in as altitude falls") {
  const ImmConfig cfg;
  const double base01 = adapt_to_altitude(550.0, cfg).transition(0, 2);
  const double mid = adapt_to_altitude(275.0, cfg).transition(0, 2);
  const double full = adapt_to_altitude(200.0, cfg).transition(0, 2);
  CHECK(base01 == doctest::Approx(cfg.base_transition(0, 2)).epsilon(1e-12));
  CHECK(mid > base01);
  CHECK(full > mid);
  CHECK(full == doctest::Approx(cfg.base_transition(0, 2) + cfg.t02_boost).epsilon(1e-12));
  // the boost is taken out of the stay-nominal entry
  CHECK(adapt_to_altitude(200.0, cfg).transition(0, 0) ==
        doctest::Approx(cfg.base_transition(0, 0) - cfg.t02_boost).epsilon(1e-12));
}

TEST_CASE("process noise scale strengthens with proximity to the ground") {
  const ImmConfig cfg;
  CHECK(adapt_to_altitude(550.0, cfg).q_scale == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(adapt_to_altitude(1100.0, cfg).q_scale == cfg.q_scale_min);  // clipped from 0.25
  CHECK(adapt_to_altitude(110.0, cfg).q_scale == cfg.q_scale_max);   // clipped from 25
  const double at_389 = adapt_to_altitude(389.0, cfg).q_scale;
  CHECK(at_389 == doctest::Approx((550.0 / 389.0) * (550.0 / 389.0)).epsilon(1e-12));
}

TEST_CASE("initial state adopts the observation and the altitude prior") {
  const ImmConfig imm;
  const ObsNoise noise;
  const ForceConfig force;
  const TleRecord first = obs_at(550.0);
  const ImmState st = init_state(first, imm, noise, force);

  CHECK(std::fabs(st.mu.sum() - 1.0) < 1e-12);
  CHECK(st.mu(0) == doctest::Approx(imm.prior_high(0)).epsilon(1e-12));
  CHECK(st.last_epoch == first.epoch);
  CHECK(st.last_bstar == first.bstar);
  for (int m = 0; m < kModeCount; ++m) {
    CHECK(is_spd(st.cov[m]));
    // same anchor state in every mode
    CHECK((st.mean[m] - st.mean[0]).norm() == 0.0);
    // covariance starts at the inflated observation noise
    CHECK(st.cov[m](0, 0) ==
          doctest::Approx(noise.tle_pos_sigma_m * noise.tle_pos_sigma_m *
                          imm.init_cov_inflation)
              .epsilon(1e-12));
  }
}

TEST_CASE("label assignment takes the confident argmax and defaults to NORMAL") {
  using V3 = Eigen::Vector3d;
  const double th = 0.3;
  CHECK(assign_label(V3(0.5, 0.3, 0.2), th) == Label::NORMAL);
  CHECK(assign_label(V3(0.2, 0.5, 0.3), th) == Label::MANEUVER);
  CHECK(assign_label(V3(0.1, 0.2, 0.7), th) == Label::DECAY);
  // the confidence gate is strict
  CHECK(assign_label(V3(0.34, 0.33, 0.33), 0.34) == Label::NORMAL);
  CHECK(assign_label(V3(0.3, 0.4, 0.3), 0.5) == Label::NORMAL);
  // exact ties break toward the lower-risk mode
  CHECK(assign_label(V3(0.4, 0.4, 0.2), th) == Label::NORMAL);
  CHECK(assign_label(V3(0.1, 0.45, 0.45), th) == Label::MANEUVER);
}

TEST_CASE("combined estimate is the probability-weighted mixture") {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> g(0.0, 1.0);
  ImmState st;
  for (int m = 0; m < kModeCount; ++m) {
    for (int i = 0; i < 6; ++i) st.mean[m](i) = 1e5 * g(rng);
    st.cov[m] = random_spd(rng, 100.0);
  }
  st.mu = Eigen::Vector3d(1.0, 0.0, 0.0);

  Vector6d mean;
  Matrix6d cov;
  combined_estimate(st, mean, cov);
  CHECK((mean - st.mean[0]).norm() < 1e-12 * st.mean[0].norm());
  CHECK((cov - st.cov[0]).cwiseAbs().maxCoeff() < 1e-9 * st.cov[0].cwiseAbs().maxCoeff());

  st.mu = Eigen::Vector3d(0.2, 0.5, 0.3);
  combined_estimate(st, mean, cov);
  Vector6d expect = Vector6d::Zero();
  for (int m = 0; m < kModeCount; ++m) expect += st.mu(m) * st.mean[m];
  CHECK((mean - expect).norm() < 1e-12 * expect.norm());
  CHECK(is_spd(cov));  // mixture covariance keeps the spread terms
}

TEST_CASE("filter steps preserve posterior hygiene on a live stream") {
  Scenario sc;
  sc.schedule_dt_h.assign(40, 1.0);  // hourly cadence
  sc.seed = 97;
  const ForceConfig force;
  const SynthResult sr = generate(sc, force);
  REQUIRE(sr.records.size() == 41);

  const ImmConfig imm;
  const UkfConfig ukf;
  const ObsNoise noise;
  const auto modes = default_modes();
  ImmState st = init_state(sr.records[0], imm, noise, force);

  for (std::size_t k = 1; k < sr.records.size(); ++k) {
    const ImmStepResult res = imm_step(st, sr.records[k], imm, ukf, modes, noise, force);
    CHECK(std::fabs(st.mu.sum() - 1.0) <= 1e-12);
    for (int m = 0; m < kModeCount; ++m) {
      CHECK(st.mu(m) >= 0.0);
      CHECK(is_spd(st.cov[m]));
      CHECK(std::isfinite(res.log_likelihood(m)));
    }
    CHECK(st.last_epoch == sr.records[k].epoch);
  }
  // a quiet stream should end nominal
  CHECK(st.mu(0) > 0.5);
}

TEST_CASE("filter rejects observations that move backward in time") {
  const ForceConfig force;
  const ImmConfig imm;
  const UkfConfig ukf;
  const ObsNoise noise;
  const auto modes = default_modes();

  const TleRecord first = obs_at(550.0, 1.7e9);
  ImmState st = init_state(first, imm, noise, force);
  TleRecord back = obs_at(550.0, 1.7e9 - 60.0);
  CHECK(code_of([&] { imm_step(st, back, imm, ukf, modes, noise, force); }) ==
        ErrorCode::EpochOrder);
}
