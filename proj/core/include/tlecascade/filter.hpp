#pragma once

/// @file filter.hpp
/// @brief Interacting-multiple-model unscented Kalman filter over
///        {nominal, maneuver, decay} motion modes with altitude-dependent
///        process noise, mode priors and transition probabilities, and
///        source-dependent observation noise.

#include <Eigen/Dense>
#include <array>
#include <limits>

#include "tlecascade/dynamics.hpp"
#include "tlecascade/rules.hpp"
#include "tlecascade/tle.hpp"

namespace tlecascade {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

inline constexpr int kStateDim = 6;
inline constexpr int kSigmaCount = 2 * kStateDim + 1;
inline constexpr int kModeCount = 3;

struct UkfConfig {
  double alpha = 1e-2;
  double beta = 2.0;
  double kappa = 0.0;

  double lambda() const {
    return alpha * alpha * (kStateDim + kappa) - kStateDim;
  }
};

/// Process-noise intensity per mode. M0 nominal station-keeping (small noise),
/// M1 maneuver (large velocity channel), M2 decay (large position channel,
/// altitude-scaled via q_scale).
struct ModeConfig {
  int id = 0;
  double sigma_pos_m = 0.0;
  double sigma_vel_mps = 0.0;
};

inline std::array<ModeConfig, kModeCount> default_modes() {
  return {{{0, 100.0, 0.01}, {1, 500.0, 1.0}, {2, 2000.0, 0.1}}};
}

/// Diagonal observation covariances by record source.
struct ObsNoise {
  double tle_pos_sigma_m = 1000.0;
  double tle_vel_sigma_mps = 1.0;
  double supgp_pos_sigma_m = 50.0;
  double supgp_vel_sigma_mps = 0.05;

  Vector6d diagonal(Source s) const {
    const double sp = s == Source::SUPGP ? supgp_pos_sigma_m : tle_pos_sigma_m;
    const double sv = s == Source::SUPGP ? supgp_vel_sigma_mps : tle_vel_sigma_mps;
    Vector6d d;
    d << sp * sp, sp * sp, sp * sp, sv * sv, sv * sv, sv * sv;
    return d;
  }
};

struct ImmConfig {
  /// Base Markov transition matrix (row = from, col = to), tuned for ~550 km.
  Eigen::Matrix3d base_transition = (Eigen::Matrix3d() << 0.97, 0.015, 0.015,
                                                          0.10, 0.85, 0.05,
                                                          0.02, 0.03, 0.95).finished();
  double label_threshold = 0.3;  ///< posterior needed before a non-normal label
  double q_scale_min = 1.0;
  double q_scale_max = 20.0;
  Eigen::Vector3d prior_high{0.90, 0.05, 0.05};  ///< mode priors at >= prior_h_high_km
  Eigen::Vector3d prior_low{0.05, 0.05, 0.90};   ///< mode priors at <= prior_h_low_km
  double prior_h_high_km = 500.0;
  double prior_h_low_km = 200.0;
  double t02_boost = 0.10;            ///< extra nominal->decay probability, fully applied
  double t02_ramp_start_km = 350.0;   ///< ramp begins below this altitude
  double t02_ramp_span_km = 150.0;    ///< reaches the full boost this far below
  double init_cov_inflation = 10.0;   ///< initial covariance = R_TLE * this
  double predict_max_step_s = 300.0;  ///< integrator step bound inside predictions
};

struct ImmState {
  std::array<Vector6d, kModeCount> mean;
  std::array<Matrix6d, kModeCount> cov;
  Eigen::Vector3d mu = Eigen::Vector3d::Zero();  ///< mode probabilities, sums to 1
  UnixSeconds last_epoch = 0.0;
  double last_bstar = 0.0;  ///< drag term used for the next prediction gap
};

struct SigmaPoints {
  Eigen::Matrix<double, kStateDim, kSigmaCount> points;
  Eigen::Matrix<double, kSigmaCount, 1> wm;  ///< mean weights, sum to 1
  Eigen::Matrix<double, kSigmaCount, 1> wc;  ///< covariance weights
};

/// Unscented point set for (mean, cov). The covariance square root is taken
/// after symmetrization, retrying with escalating relative diagonal jitter
/// (1e-9 up to 1e-3) before giving up.
SigmaPoints sigma_points(const Vector6d& mean, const Matrix6d& cov, const UkfConfig& cfg);

/// Propagate the distribution over a gap of dt seconds through the force
/// model, then add Q = diag(sigma_pos^2 I3, sigma_vel^2 I3) * (dt/3600) * q_scale.
void ukf_predict(const ModeConfig& mode, Vector6d& mean, Matrix6d& cov, double dt,
                 const ForceConfig& force, double bstar, double q_scale,
                 const UkfConfig& cfg, double max_step_s = 300.0);

/// Measurement update with the identity observation model on the full state.
/// Returns the observation log-likelihood log N(y; 0, S).
double ukf_update(Vector6d& mean, Matrix6d& cov, const EciState& obs, const Vector6d& r_diag);

struct AltitudeAdaptation {
  double q_scale = 1.0;
  Eigen::Vector3d priors = Eigen::Vector3d::Zero();
  Eigen::Matrix3d transition = Eigen::Matrix3d::Identity();
};

/// q_scale = clip((550/h)^2, min, max); priors linearly interpolated between
/// the low/high endpoints; nominal->decay transition boosted linearly below
/// the ramp start, taken out of the nominal->nominal entry.
AltitudeAdaptation adapt_to_altitude(double h_km, const ImmConfig& cfg);

ImmState init_state(const TleRecord& first_obs, const ImmConfig& imm, const ObsNoise& noise,
                    const ForceConfig& force);

struct ImmStepResult {
  Eigen::Vector3d log_likelihood;  ///< per mode; -inf marks a failed mode
  ImmStepResult() { log_likelihood.setConstant(-std::numeric_limits<double>::infinity()); }
};

/// One mixing + predict + update cycle for a new observation. Mode-level
/// propagation or update failures zero that mode's posterior probability; the
/// step fails only when every mode fails.
ImmStepResult imm_step(ImmState& state, const TleRecord& obs, const ImmConfig& imm,
                       const UkfConfig& ukf, const std::array<ModeConfig, kModeCount>& modes,
                       const ObsNoise& noise, const ForceConfig& force);

/// argmax of mu mapped {M0 -> NORMAL, M1 -> MANEUVER, M2 -> DECAY} when the
/// winning probability exceeds threshold, NORMAL otherwise; ties break low.
Label assign_label(const Eigen::Vector3d& mu, double threshold);

/// Moment-matched single-Gaussian summary of the mode mixture.
void combined_estimate(const ImmState& state, Vector6d& mean, Matrix6d& cov);

}  // namespace tlecascade
