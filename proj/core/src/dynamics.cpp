#include "tlecascade/dynamics.hpp"

#include <cmath>

#include "tlecascade/error.hpp"

namespace tlecascade {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double wrap_two_pi(double x) {
  double w = std::fmod(x, kTwoPi);
  if (w < 0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

Eigen::Vector3d accel_two_body(const Eigen::Vector3d& r, double mu) {
  const double rn = r.norm();
  return (-mu / (rn * rn * rn)) * r;
}

// J2 + drag only; the central term is handled separately so the integrator can
// difference it against the analytic reference without cancellation.
Eigen::Vector3d accel_pert(const Eigen::Vector3d& r, const Eigen::Vector3d& v,
                           const ForceConfig& cfg, double bstar) {
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  const double rn = r.norm();
  if (cfg.enable_j2) {
    const double re_r = cfg.re_equatorial_m / rn;
    const double k = -1.5 * cfg.j2 * cfg.mu * re_r * re_r / (rn * rn * rn);
    const double zr2 = (r.z() / rn) * (r.z() / rn);
    a.x() += k * r.x() * (1.0 - 5.0 * zr2);
    a.y() += k * r.y() * (1.0 - 5.0 * zr2);
    a.z() += k * r.z() * (3.0 - 5.0 * zr2);
  }
  if (cfg.enable_drag) {
    // density is evaluated even for B = 0 so reentry (below the model floor)
    // is detected regardless of the drag coefficient
    const double h_km = (rn - cfg.re_equatorial_m) / 1000.0;
    const double rho = atmosphere_density(h_km, cfg);
    const double ballistic = std::max(bstar, 0.0) * cfg.bstar_to_ballistic;
    if (ballistic > 0.0) a -= 0.5 * rho * ballistic * v.norm() * v;
  }
  return a;
}

// Analytic two-body motion through (r0, v0) via Lagrange f and g coefficients;
// exact to roundoff, used as the reference the integrator deviates from.
struct KeplerShift {
  Eigen::Vector3d r0, v0;
  double r0n, a, e, n, ecos_e0, esin_e0, e0, m0, sqrt_mua;

  KeplerShift(const EciState& s, double mu) : r0(s.r), v0(s.v) {
    r0n = r0.norm();
    if (!(r0n > 0.0)) raise(ErrorCode::Degenerate, "zero position vector");
    const double hn = r0.cross(v0).norm();
    if (hn <= 1e-9 * r0n * v0.norm())
      raise(ErrorCode::Degenerate, "near-rectilinear state");
    const double xi = 0.5 * v0.squaredNorm() - mu / r0n;
    if (!(xi < 0.0)) raise(ErrorCode::Hyperbolic, "state is not elliptic");
    a = -mu / (2.0 * xi);
    n = std::sqrt(mu / (a * a * a));
    ecos_e0 = 1.0 - r0n / a;
    esin_e0 = r0.dot(v0) / std::sqrt(mu * a);
    e = std::hypot(ecos_e0, esin_e0);
    e0 = std::atan2(esin_e0, ecos_e0);
    m0 = e0 - esin_e0;
    sqrt_mua = std::sqrt(mu * a);
  }

  EciState at(double tau) const {
    const double ea = solve_kepler(m0 + n * tau, e);
    const double de = ea - e0;
    const double s = std::sin(de);
    const double c = std::cos(de);
    const double rn = a * (1.0 - (ecos_e0 * c - esin_e0 * s));
    const double f = 1.0 - (a / r0n) * (1.0 - c);
    const double g = tau + (s - de) / n;
    const double fdot = -sqrt_mua * s / (rn * r0n);
    const double gdot = 1.0 - (a / rn) * (1.0 - c);
    return {f * r0 + g * v0, fdot * r0 + gdot * v0};
  }
};

std::vector<AtmosphereBand> default_atmosphere() {
  // Standard exponential-atmosphere table, 100 km and up: base altitude km,
  // base density kg/m^3, scale height km. Bands are mutually consistent
  // (each base density equals the previous band extrapolated to that base).
  return {
      {100.0, 5.297e-7, 5.877},  {110.0, 9.661e-8, 7.263},  {120.0, 2.438e-8, 9.473},
      {130.0, 8.484e-9, 12.636}, {140.0, 3.845e-9, 16.149}, {150.0, 2.070e-9, 22.523},
      {180.0, 5.464e-10, 29.740}, {200.0, 2.789e-10, 37.105}, {250.0, 7.248e-11, 45.546},
      {300.0, 2.418e-11, 53.628}, {350.0, 9.518e-12, 53.298}, {400.0, 3.725e-12, 58.515},
      {450.0, 1.585e-12, 60.828}, {500.0, 6.967e-13, 63.822}, {600.0, 1.454e-13, 71.835},
      {700.0, 3.614e-14, 88.667}, {800.0, 1.170e-14, 124.64}, {900.0, 5.245e-15, 181.05},
      {1000.0, 3.019e-15, 268.00},
  };
}

}  // namespace

ForceConfig::ForceConfig() : atmosphere(default_atmosphere()) {}

double mean_motion_to_sma(double n_rev_per_day, double mu) {
  if (!(n_rev_per_day > 0.0)) raise(ErrorCode::NonPositive, "mean motion");
  const double n_rad = n_rev_per_day * kTwoPi / 86400.0;
  return std::cbrt(mu / (n_rad * n_rad));
}

double sma_to_mean_motion(double a_m, double mu) {
  if (!(a_m > 0.0)) raise(ErrorCode::NonPositive, "semi-major axis");
  return std::sqrt(mu / (a_m * a_m * a_m)) * 86400.0 / kTwoPi;
}

double altitude_km(double a_m) { return a_m / 1000.0 - kMeanEarthRadiusKm; }

double solve_kepler(double mean_anomaly_rad, double e) {
  if (e < 0.0 || e >= 1.0) raise(ErrorCode::Hyperbolic, "eccentricity outside [0, 1)");
  double ea = mean_anomaly_rad;
  for (int it = 0; it <= 50; ++it) {
    const double f = ea - e * std::sin(ea) - mean_anomaly_rad;
    if (std::fabs(f) <= 1e-12) return ea;
    if (it == 50) break;
    ea -= f / (1.0 - e * std::cos(ea));
  }
  raise(ErrorCode::NoConvergence, "Kepler iteration exceeded 50 steps");
}

EciState kepler_to_eci(const KeplerElements& el, double mu) {
  if (!(el.a > 0.0)) raise(ErrorCode::NonPositive, "semi-major axis");
  if (el.e < 0.0 || el.e >= 1.0) raise(ErrorCode::Hyperbolic, "eccentricity outside [0, 1)");
  const double ea = solve_kepler(el.mean_anomaly, el.e);
  const double nu =
      2.0 * std::atan2(std::sqrt(1.0 + el.e) * std::sin(0.5 * ea),
                       std::sqrt(1.0 - el.e) * std::cos(0.5 * ea));
  const double p = el.a * (1.0 - el.e * el.e);
  const double rn = el.a * (1.0 - el.e * std::cos(ea));
  const double cnu = std::cos(nu), snu = std::sin(nu);
  const Eigen::Vector3d r_pf(rn * cnu, rn * snu, 0.0);
  const double vf = std::sqrt(mu / p);
  const Eigen::Vector3d v_pf(-vf * snu, vf * (el.e + cnu), 0.0);

  const double co = std::cos(el.raan), so = std::sin(el.raan);
  const double ci = std::cos(el.i), si = std::sin(el.i);
  const double cw = std::cos(el.argp), sw = std::sin(el.argp);
  Eigen::Matrix3d rot;
  rot << co * cw - so * sw * ci, -co * sw - so * cw * ci, so * si,
         so * cw + co * sw * ci, -so * sw + co * cw * ci, -co * si,
         sw * si,                 cw * si,                 ci;
  return {rot * r_pf, rot * v_pf};
}

KeplerElements eci_to_kepler(const EciState& s, double mu) {
  const double rn = s.r.norm();
  if (!(rn > 0.0)) raise(ErrorCode::Degenerate, "zero position vector");
  const Eigen::Vector3d h = s.r.cross(s.v);
  const double hn = h.norm();
  if (hn <= 1e-9 * rn * s.v.norm()) raise(ErrorCode::Degenerate, "zero angular momentum");
  const double xi = 0.5 * s.v.squaredNorm() - mu / rn;
  if (!(xi < 0.0)) raise(ErrorCode::Hyperbolic, "non-elliptic energy");

  KeplerElements el;
  el.a = -mu / (2.0 * xi);
  const Eigen::Vector3d evec = s.v.cross(h) / mu - s.r / rn;
  el.e = evec.norm();
  if (el.e >= 1.0) raise(ErrorCode::Hyperbolic, "eccentricity >= 1 reconstructed");
  el.i = std::acos(std::clamp(h.z() / hn, -1.0, 1.0));

  const Eigen::Vector3d node(-h.y(), h.x(), 0.0);
  const double nn = node.norm();
  const bool node_defined = nn > 1e-8 * hn;  // fails for i near 0 or pi
  const bool circular = el.e < 1e-8;

  double nu;  // true anomaly measured from the chosen reference direction
  if (node_defined) {
    el.raan = wrap_two_pi(std::atan2(node.y(), node.x()));
    if (circular) {
      el.argp = 0.0;  // anomaly measured from the ascending node
      nu = std::acos(std::clamp(node.dot(s.r) / (nn * rn), -1.0, 1.0));
      if (s.r.z() < 0.0) nu = kTwoPi - nu;
    } else {
      el.argp = std::acos(std::clamp(node.dot(evec) / (nn * el.e), -1.0, 1.0));
      if (evec.z() < 0.0) el.argp = kTwoPi - el.argp;
      nu = std::acos(std::clamp(evec.dot(s.r) / (el.e * rn), -1.0, 1.0));
      if (s.r.dot(s.v) < 0.0) nu = kTwoPi - nu;
    }
  } else {
    el.raan = 0.0;  // node undefined: reference direction is the x-axis
    if (circular) {
      el.argp = 0.0;
      nu = std::atan2(s.r.y(), s.r.x());
      if (h.z() < 0.0) nu = -nu;  // retrograde: anomaly increases clockwise
    } else {
      el.argp = std::atan2(evec.y(), evec.x());
      if (h.z() < 0.0) el.argp = -el.argp;
      el.argp = wrap_two_pi(el.argp);
      nu = std::acos(std::clamp(evec.dot(s.r) / (el.e * rn), -1.0, 1.0));
      if (s.r.dot(s.v) < 0.0) nu = kTwoPi - nu;
    }
  }
  const double ea = 2.0 * std::atan2(std::sqrt(1.0 - el.e) * std::sin(0.5 * nu),
                                     std::sqrt(1.0 + el.e) * std::cos(0.5 * nu));
  el.mean_anomaly = wrap_two_pi(ea - el.e * std::sin(ea));
  return el;
}

double atmosphere_density(double h_km, const ForceConfig& cfg) {
  const auto& bands = cfg.atmosphere;
  if (bands.empty()) raise(ErrorCode::BelowModelFloor, "empty atmosphere table");
  if (h_km < bands.front().h0_km)
    raise(ErrorCode::BelowModelFloor,
          "altitude " + std::to_string(h_km) + " km below model floor");
  std::size_t lo = 0;
  for (std::size_t k = bands.size(); k-- > 0;) {
    if (h_km >= bands[k].h0_km) {
      lo = k;
      break;
    }
  }
  const AtmosphereBand& b = bands[lo];
  return b.rho0 * std::exp(-(h_km - b.h0_km) / b.scale_height_km);
}

Eigen::Vector3d acceleration(const EciState& s, const ForceConfig& cfg, double bstar) {
  return accel_two_body(s.r, cfg.mu) + accel_pert(s.r, s.v, cfg, bstar);
}

EciState rk4_step(const EciState& s, double dt, const ForceConfig& cfg, double bstar) {
  if (dt == 0.0) return s;
  const KeplerShift ref(s, cfg.mu);
  const EciState ref_mid = ref.at(0.5 * dt);
  const EciState ref_end = ref.at(dt);

  using V6 = Eigen::Matrix<double, 6, 1>;
  const auto deriv = [&](const EciState& rs, const V6& d) -> V6 {
    const Eigen::Vector3d rt = rs.r + d.head<3>();
    const Eigen::Vector3d vt = rs.v + d.tail<3>();
    const Eigen::Vector3d acc = accel_two_body(rt, cfg.mu) - accel_two_body(rs.r, cfg.mu) +
                                accel_pert(rt, vt, cfg, bstar);
    V6 out;
    out << d.tail<3>(), acc;
    return out;
  };
  // classical 4-stage Runge-Kutta on the deviation from the reference; the
  // deviation starts at exactly zero because the reference passes through s
  const V6 k1 = deriv(s, V6::Zero());
  const V6 k2 = deriv(ref_mid, 0.5 * dt * k1);
  const V6 k3 = deriv(ref_mid, 0.5 * dt * k2);
  const V6 k4 = deriv(ref_end, dt * k3);
  const V6 d = (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return {ref_end.r + d.head<3>(), ref_end.v + d.tail<3>()};
}

EciState propagate(const EciState& s, double t0, double t1, const ForceConfig& cfg,
                   double bstar, double max_step) {
  if (!(max_step > 0.0)) raise(ErrorCode::NonPositive, "max_step");
  if (!std::isfinite(t0) || !std::isfinite(t1))
    raise(ErrorCode::Degenerate, "non-finite propagation interval");
  const double span = t1 - t0;
  if (span == 0.0) return s;
  const auto steps = static_cast<long>(std::ceil(std::fabs(span) / max_step));
  const double h = span / static_cast<double>(steps);
  EciState cur = s;
  for (long k = 0; k < steps; ++k) cur = rk4_step(cur, h, cfg, bstar);
  return cur;
}

Eigen::Matrix<double, 6, Eigen::Dynamic> propagate_batch(
    const Eigen::Matrix<double, 6, Eigen::Dynamic>& states, double t0, double t1,
    const ForceConfig& cfg, double bstar, double max_step) {
  Eigen::Matrix<double, 6, Eigen::Dynamic> out(6, states.cols());
  for (Eigen::Index c = 0; c < states.cols(); ++c) {
    const EciState s = EciState::from_vec(states.col(c));
    out.col(c) = propagate(s, t0, t1, cfg, bstar, max_step).vec();
  }
  return out;
}

}  // namespace tlecascade
