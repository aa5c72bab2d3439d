#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "tlecascade/dynamics.hpp"
#include "tlecascade/error.hpp"

using namespace tlecascade;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMu = 3.986004418e14;

double wrap_rad(double x) {
  x = std::fmod(x, 2.0 * kPi);
  if (x < 0.0) x += 2.0 * kPi;
  return x;
}

double angle_gap(double a, double b) {
  double d = std::fabs(wrap_rad(a) - wrap_rad(b));
  return std::min(d, 2.0 * kPi - d);
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

ForceConfig two_body() {
  ForceConfig f;
  f.enable_j2 = false;
  f.enable_drag = false;
  return f;
}

EciState circular_state(double a) {
  KeplerElements el;
  el.a = a;
  return kepler_to_eci(el, kMu);
}

double specific_energy(const EciState& s) {
  return 0.5 * s.v.squaredNorm() - kMu / s.r.norm();
}

}  // namespace

TEST_CASE("mean motion to semi-major axis hits frozen anchors") {
  // reference values computed independently from Kepler's third law
  CHECK(mean_motion_to_sma(15.5) == doctest::Approx(6794863.069216972).epsilon(1e-12));
  CHECK(altitude_km(mean_motion_to_sma(15.5)) ==
        doctest::Approx(423.8630692169718).epsilon(1e-12));
  CHECK(mean_motion_to_sma(1.0027444552) ==
        doctest::Approx(42163986.13734578).epsilon(1e-12));
}

TEST_CASE("mean motion conversion round trips and rejects nonpositive input") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> n_dist(0.9, 17.0);
  for (int i = 0; i < 1000; ++i) {
    const double n = n_dist(rng);
    CHECK(sma_to_mean_motion(mean_motion_to_sma(n)) == doctest::Approx(n).epsilon(1e-12));
  }
  CHECK(code_of([] { mean_motion_to_sma(0.0); }) == ErrorCode::NonPositive);
  CHECK(code_of([] { mean_motion_to_sma(-1.0); }) == ErrorCode::NonPositive);
  CHECK(code_of([] { sma_to_mean_motion(-7e6); }) == ErrorCode::NonPositive);
}

TEST_CASE("Kepler equation solver hits frozen anchors and residual bound") {
  CHECK(solve_kepler(1.0, 0.5) == doctest::Approx(1.4987011335178484).epsilon(1e-12));
  CHECK(solve_kepler(3.0, 0.9) == doctest::Approx(3.0670374966306886).epsilon(1e-12));
  CHECK(solve_kepler(0.0, 0.7) == doctest::Approx(0.0));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> m_dist(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> e_dist(0.0, 0.95);
  for (int i = 0; i < 2000; ++i) {
    const double m = m_dist(rng);
    const double e = e_dist(rng);
    const double ea = solve_kepler(m, e);
    CHECK(std::fabs(ea - e * std::sin(ea) - m) <= 1e-11);
    // the solution is odd around pi: E(2pi - M) = 2pi - E(M)
    CHECK(angle_gap(solve_kepler(2.0 * kPi - m, e), 2.0 * kPi - ea) < 1e-9);
  }
}

TEST_CASE("circular equatorial orbit maps to the analytic Cartesian state") {
  EciState s = circular_state(7.0e6);
  CHECK(s.r.x() == doctest::Approx(7.0e6).epsilon(1e-12));
  CHECK(s.r.y() == doctest::Approx(0.0));
  CHECK(s.r.z() == doctest::Approx(0.0));
  CHECK(s.v.x() == doctest::Approx(0.0));
  CHECK(s.v.y() == doctest::Approx(7546.053290107542).epsilon(1e-10));
  CHECK(s.v.z() == doctest::Approx(0.0));
}

TEST_CASE("element/state round trip over randomized bound orbits") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    KeplerElements el;
    el.a = 6.6e6 + u(rng) * (4.5e7 - 6.6e6);
    el.e = u(rng) * 0.9;
    el.i = u(rng) * kPi;
    el.raan = u(rng) * 2.0 * kPi;
    el.argp = u(rng) * 2.0 * kPi;
    el.mean_anomaly = u(rng) * 2.0 * kPi;

    const EciState s = kepler_to_eci(el, kMu);
    const KeplerElements back = eci_to_kepler(s, kMu);

    CHECK(std::fabs(back.a - el.a) / el.a < 1e-9);
    CHECK(std::fabs(back.e - el.e) < 1e-9);
    CHECK(angle_gap(back.i, el.i) < 1e-9);
    CHECK(angle_gap(back.raan, el.raan) < 1e-9);
    CHECK(angle_gap(back.argp, el.argp) < 1e-9);
    CHECK(angle_gap(back.mean_anomaly, el.mean_anomaly) < 1e-9);
  }
}

TEST_CASE("degenerate orbits use the zeroed-angle convention") {
  KeplerElements el;
  el.a = 7.2e6;  // circular equatorial

  const KeplerElements back = eci_to_kepler(kepler_to_eci(el, kMu), kMu);
  CHECK(back.e < 1e-8);
  CHECK(back.i < 1e-8);
  CHECK(back.raan == 0.0);
  CHECK(back.argp == 0.0);
}

TEST_CASE("unbound states are rejected") {
  EciState s;
  s.r = Eigen::Vector3d(7.0e6, 0.0, 0.0);
  s.v = Eigen::Vector3d(0.0, 12000.0, 0.0);  // above escape speed (~10.67 km/s)
  CHECK(code_of([&] { eci_to_kepler(s, kMu); }) == ErrorCode::Hyperbolic);
}

TEST_CASE("atmosphere density decreases with altitude and has a hard floor") {
  const ForceConfig f;
  REQUIRE(!f.atmosphere.empty());
  const double h_floor = f.atmosphere.front().h0_km;

  double prev = atmosphere_density(h_floor, f);
  CHECK(prev > 0.0);
  for (double h = h_floor + 25.0; h <= 1500.0; h += 25.0) {
    const double rho = atmosphere_density(h, f);
    CHECK(rho > 0.0);
    CHECK(rho < prev);
    prev = rho;
  }
  CHECK(code_of([&] { atmosphere_density(h_floor - 1.0, f); }) == ErrorCode::BelowModelFloor);
}

TEST_CASE("acceleration terms carry the right signs") {
  const EciState s = circular_state(6.921e6);

  const Eigen::Vector3d two_body_acc = acceleration(s, two_body(), 0.0);
  const Eigen::Vector3d expect = -kMu / std::pow(s.r.norm(), 3) * s.r;
  CHECK((two_body_acc - expect).norm() < 1e-12 * expect.norm());

  // oblateness strengthens the inward pull at the equator
  ForceConfig j2_only = two_body();
  j2_only.enable_j2 = true;
  const Eigen::Vector3d r_hat = s.r.normalized();
  CHECK(acceleration(s, j2_only, 0.0).dot(r_hat) < two_body_acc.dot(r_hat));

  // drag opposes the velocity and scales with the drag term
  ForceConfig drag_only = two_body();
  drag_only.enable_drag = true;
  const Eigen::Vector3d drag = acceleration(s, drag_only, 1e-4) - two_body_acc;
  CHECK(drag.dot(s.v) < 0.0);
  const Eigen::Vector3d drag2 = acceleration(s, drag_only, 2e-4) - two_body_acc;
  CHECK(drag2.norm() == doctest::Approx(2.0 * drag.norm()).epsilon(1e-9));
  // negative drag term must not produce thrust
  CHECK((acceleration(s, drag_only, -1e-4) - two_body_acc).norm() == doctest::Approx(0.0));
}

TEST_CASE("two-body propagation closes an elliptical orbit") {
  KeplerElements el;
  el.a = 7.5e6;
  el.e = 0.3;
  el.i = 0.9;
  el.raan = 1.0;
  el.argp = 2.0;
  el.mean_anomaly = 0.5;
  const EciState s0 = kepler_to_eci(el, kMu);
  const double period = 2.0 * kPi * std::sqrt(el.a * el.a * el.a / kMu);

  const ForceConfig f = two_body();
  const EciState s1 = propagate(s0, 0.0, period, f, 0.0);
  CHECK((s1.r - s0.r).norm() < 1.0);
  CHECK(std::fabs(specific_energy(s1) - specific_energy(s0)) /
            std::fabs(specific_energy(s0)) <
        1e-9);
}

TEST_CASE("propagation composes across a split interval") {
  const EciState s0 = circular_state(6.921e6);
  ForceConfig f;  // full force model
  const EciState direct = propagate(s0, 0.0, 3600.0, f, 1e-5);
  const EciState mid = propagate(s0, 0.0, 1800.0, f, 1e-5);
  const EciState split = propagate(mid, 1800.0, 3600.0, f, 1e-5);
  CHECK((direct.r - split.r).norm() < 1e-9 * direct.r.norm());
  CHECK((direct.v - split.v).norm() < 1e-9 * direct.v.norm());
}

TEST_CASE("drag removes orbital energy") {
  KeplerElements el;
  el.a = 6.671e6;  // ~300 km above the equatorial radius
  const EciState s0 = kepler_to_eci(el, kMu);
  ForceConfig f;
  const double period = 2.0 * kPi * std::sqrt(el.a * el.a * el.a / kMu);
  // a moderate drag term: strong enough to shed measurable energy in one
  // revolution, weak enough not to spiral below the atmosphere model floor
  const EciState s1 = propagate(s0, 0.0, period, f, 1e-6);
  CHECK(specific_energy(s1) < specific_energy(s0));
  CHECK(eci_to_kepler(s1, kMu).a < el.a);
}

TEST_CASE("propagate_batch matches per-state propagation column for column") {
  ForceConfig f;
  Eigen::Matrix<double, 6, Eigen::Dynamic> block(6, 3);
  const EciState a = circular_state(6.9e6);
  const EciState b = circular_state(7.1e6);
  const EciState c = circular_state(7.8e6);
  block.col(0) = a.vec();
  block.col(1) = b.vec();
  block.col(2) = c.vec();

  const auto moved = propagate_batch(block, 0.0, 1200.0, f, 1e-5);
  const EciState a1 = propagate(a, 0.0, 1200.0, f, 1e-5);
  const EciState b1 = propagate(b, 0.0, 1200.0, f, 1e-5);
  const EciState c1 = propagate(c, 0.0, 1200.0, f, 1e-5);
  CHECK((moved.col(0) - a1.vec()).norm() == doctest::Approx(0.0));
  CHECK((moved.col(1) - b1.vec()).norm() == doctest::Approx(0.0));
  CHECK((moved.col(2) - c1.vec()).norm() == doctest::Approx(0.0));
}
