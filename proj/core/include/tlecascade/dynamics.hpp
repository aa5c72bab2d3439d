#pragma once

/// @file dynamics.hpp
/// @brief Keplerian element conversions and the perturbed two-body force
///        model (central body + J2 + exponential-atmosphere drag) with an
///        RK4-based propagator.

#include <Eigen/Dense>
#include <vector>

namespace tlecascade {

/// Cartesian inertial state, meters and meters/second.
struct EciState {
  Eigen::Vector3d r = Eigen::Vector3d::Zero();
  Eigen::Vector3d v = Eigen::Vector3d::Zero();

  Eigen::Matrix<double, 6, 1> vec() const {
    Eigen::Matrix<double, 6, 1> x;
    x << r, v;
    return x;
  }
  static EciState from_vec(const Eigen::Matrix<double, 6, 1>& x) {
    return {x.head<3>(), x.tail<3>()};
  }
};

/// Classical elements: a in meters, angles in radians.
struct KeplerElements {
  double a = 0.0;
  double e = 0.0;
  double i = 0.0;
  double raan = 0.0;
  double argp = 0.0;
  double mean_anomaly = 0.0;
};

/// One piecewise-exponential atmosphere band.
struct AtmosphereBand {
  double h0_km = 0.0;          ///< base altitude
  double rho0 = 0.0;           ///< density at base, kg/m^3
  double scale_height_km = 0.0;
};

/// Force-model constants and toggles. Defaults are the values used everywhere
/// in this project; the atmosphere is the standard 19-band exponential table
/// covering 100 km and up.
struct ForceConfig {
  double mu = 3.986004418e14;        ///< m^3/s^2
  double re_equatorial_m = 6378137.0;
  double j2 = 1.08262668e-3;
  bool enable_j2 = true;
  bool enable_drag = true;
  /// Ballistic coefficient per unit bstar: B [m^2/kg] = bstar_to_ballistic * bstar.
  /// 2 / rho_ref with the TLE reference density 2.461e-5 kg m^-2 (Earth radius)^-1.
  double bstar_to_ballistic = 2.0 / 2.461e-5;
  std::vector<AtmosphereBand> atmosphere;  ///< contiguous, density decreasing

  ForceConfig();  ///< fills the default atmosphere table
};

/// Mean radius used for the altitude *feature*, km. Forces use re_equatorial_m.
inline constexpr double kMeanEarthRadiusKm = 6371.0;

/// n [rev/day] -> semi-major axis [m] via Kepler's third law.
double mean_motion_to_sma(double n_rev_per_day, double mu = 3.986004418e14);

/// Inverse of mean_motion_to_sma: a [m] -> n [rev/day].
double sma_to_mean_motion(double a_m, double mu = 3.986004418e14);

/// Altitude above the mean Earth radius: a/1000 - 6371.0 km.
double altitude_km(double a_m);

/// Newton's method for E - e*sin(E) = M, started at E0 = M, |residual| <= 1e-12.
double solve_kepler(double mean_anomaly_rad, double e);

/// Perifocal construction rotated by argp, i, raan.
EciState kepler_to_eci(const KeplerElements& el, double mu);

/// Inverse conversion; angles wrapped to [0, 2*pi). Near-singular conventions:
/// argp := 0 when e < 1e-8 (anomaly measured from the node), raan := 0 when
/// i < 1e-8 (node replaced by the x-axis).
KeplerElements eci_to_kepler(const EciState& s, double mu);

/// Piecewise-exponential density; above the top band extrapolates with the top
/// band's scale height. h below the lowest base raises BelowModelFloor.
double atmosphere_density(double h_km, const ForceConfig& cfg);

/// Total acceleration: central body, optional J2, optional drag
/// (-0.5 rho B |v| v, B clamped to >= 0).
Eigen::Vector3d acceleration(const EciState& s, const ForceConfig& cfg, double bstar);

/// One integrator step of size dt. The two-body part is advanced analytically
/// (Lagrange f and g coefficients); the classical 4-stage Runge-Kutta scheme
/// integrates the 6-dimensional deviation driven by the perturbing
/// accelerations, rectified every step. Two-body motion is therefore exact to
/// roundoff at any step size, and perturbation error scales with the (small)
/// perturbing acceleration rather than with the central attraction.
EciState rk4_step(const EciState& s, double dt, const ForceConfig& cfg, double bstar);

/// Propagate from t0 to t1 splitting the interval into equal steps <= max_step.
EciState propagate(const EciState& s, double t0, double t1, const ForceConfig& cfg,
                   double bstar, double max_step = 60.0);

/// Column-wise propagate over a 6xN state block (one orbit per column).
Eigen::Matrix<double, 6, Eigen::Dynamic> propagate_batch(
    const Eigen::Matrix<double, 6, Eigen::Dynamic>& states, double t0, double t1,
    const ForceConfig& cfg, double bstar, double max_step = 60.0);

}  // namespace tlecascade
