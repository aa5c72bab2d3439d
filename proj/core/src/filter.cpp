#include "tlecascade/filter.hpp"

#include <cmath>

#include "tlecascade/error.hpp"

namespace tlecascade {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

EciState record_to_eci(const TleRecord& rec, const ForceConfig& force) {
  KeplerElements el;
  el.a = mean_motion_to_sma(rec.mean_motion, force.mu);
  el.e = rec.eccentricity;
  el.i = rec.inclination * kDegToRad;
  el.raan = rec.raan * kDegToRad;
  el.argp = rec.argp * kDegToRad;
  el.mean_anomaly = rec.mean_anomaly * kDegToRad;
  return kepler_to_eci(el, force.mu);
}

Matrix6d symmetrize(const Matrix6d& m) { return 0.5 * (m + m.transpose()); }

// Cholesky factor with the escalating-jitter policy shared by all callers.
Matrix6d robust_cholesky(const Matrix6d& cov) {
  const Matrix6d sym = symmetrize(cov);
  const double scale = std::max(sym.diagonal().maxCoeff(), 1e-300);
  for (double jitter = 0.0; jitter <= 1e-3;
       jitter = jitter == 0.0 ? 1e-9 : jitter * 10.0) {
    const Matrix6d attempt = sym + jitter * scale * Matrix6d::Identity();
    const Eigen::LLT<Matrix6d> llt(attempt);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  raise(ErrorCode::NotPositiveDefinite, "covariance square root failed after jitter escalation");
}

double log_likelihood(const Vector6d& y, const Matrix6d& s) {
  const Eigen::LDLT<Matrix6d> ldlt(symmetrize(s));
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    raise(ErrorCode::SingularInnovationCovariance, "innovation covariance not positive");
  const double quad = y.dot(ldlt.solve(y));
  const double logdet = ldlt.vectorD().array().log().sum();
  return -0.5 * (quad + logdet + kStateDim * std::log(2.0 * kPi));
}

}  // namespace

SigmaPoints sigma_points(const Vector6d& mean, const Matrix6d& cov, const UkfConfig& cfg) {
  const double lambda = cfg.lambda();
  const double nl = kStateDim + lambda;
  SigmaPoints sp;
  const Matrix6d root = robust_cholesky(nl * cov);
  sp.points.col(0) = mean;
  for (int i = 0; i < kStateDim; ++i) {
    sp.points.col(1 + i) = mean + root.col(i);
    sp.points.col(1 + kStateDim + i) = mean - root.col(i);
  }
  sp.wm.setConstant(1.0 / (2.0 * nl));
  sp.wc.setConstant(1.0 / (2.0 * nl));
  sp.wm(0) = lambda / nl;
  sp.wc(0) = lambda / nl + (1.0 - cfg.alpha * cfg.alpha + cfg.beta);
  return sp;
}

namespace {

// One unscented transform over a single interval. Callers cap the interval so
// the sigma spread stays inside the transform's quadratic validity range.
void ut_predict_once(const ModeConfig& mode, Vector6d& mean, Matrix6d& cov, double dt,
                     const ForceConfig& force, double bstar, double q_scale,
                     const UkfConfig& cfg, double max_step_s) {
  SigmaPoints sp = sigma_points(mean, cov, cfg);
  Eigen::Matrix<double, kStateDim, kSigmaCount> prop;
  if (dt == 0.0) {
    prop = sp.points;
  } else {
    try {
      prop = propagate_batch(sp.points, 0.0, dt, force, bstar, max_step_s);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::BelowModelFloor)
        raise(ErrorCode::ReentryDuringPredict, e.what());
      throw;
    }
  }
  // Predicted mean is the propagated center point, not the weighted sigma mean.
  // Over multi-hour gaps the in-track position spread bends along the orbit arc,
  // shifting the weighted mean inward by ~a*sigma_phi^2/2 (km-scale); the gain
  // converts that shift into a spurious velocity correction and the filter never
  // converges. Covariance stays the unscented second moment about the center.
  mean = prop.col(0);
  Matrix6d p = Matrix6d::Zero();
  for (int i = 1; i < kSigmaCount; ++i) {
    const Vector6d d = prop.col(i) - mean;
    p += sp.wc(i) * d * d.transpose();
  }
  Vector6d q;
  const double s = dt / 3600.0 * q_scale;
  q << mode.sigma_pos_m * mode.sigma_pos_m, mode.sigma_pos_m * mode.sigma_pos_m,
      mode.sigma_pos_m * mode.sigma_pos_m, mode.sigma_vel_mps * mode.sigma_vel_mps,
      mode.sigma_vel_mps * mode.sigma_vel_mps, mode.sigma_vel_mps * mode.sigma_vel_mps;
  cov = symmetrize(p) + (s * q).asDiagonal().toDenseMatrix();
}

// Transform segment cap. A 1 m/s velocity sigma shears into ~11 km of in-track
// spread per hour; one hour keeps the arc short enough that the second moment
// of the bent distribution stays faithful even for km-scale covariances.
constexpr double kUtSegmentMaxS = 3600.0;

}  // namespace

void ukf_predict(const ModeConfig& mode, Vector6d& mean, Matrix6d& cov, double dt,
                 const ForceConfig& force, double bstar, double q_scale,
                 const UkfConfig& cfg, double max_step_s) {
  if (dt < 0.0) raise(ErrorCode::EpochOrder, "negative prediction interval");
  // Long gaps run as a chain of shorter transforms, re-forming sigma points at
  // each boundary. Q is linear in dt, so the pro-rata pieces compose exactly.
  double done = 0.0;
  do {
    const double seg = std::min(dt - done, kUtSegmentMaxS);
    ut_predict_once(mode, mean, cov, seg, force, bstar, q_scale, cfg, max_step_s);
    done += seg;
  } while (done < dt);
}

double ukf_update(Vector6d& mean, Matrix6d& cov, const EciState& obs, const Vector6d& r_diag) {
  // identity observation model: the UKF update reduces to the linear form
  // S = P + R, K = P S^-1, with cross-covariance equal to P
  const Vector6d y = obs.vec() - mean;
  const Matrix6d s = symmetrize(cov) + Matrix6d(r_diag.asDiagonal());
  const double ll = log_likelihood(y, s);
  const Eigen::LDLT<Matrix6d> ldlt(s);
  const Matrix6d gain = ldlt.solve(symmetrize(cov)).transpose();  // P S^-1 (P, S symmetric)
  mean += gain * y;
  // Joseph form keeps the posterior symmetric positive definite under roundoff
  const Matrix6d ikh = Matrix6d::Identity() - gain;
  cov = symmetrize(ikh * cov * ikh.transpose() +
                   gain * Matrix6d(r_diag.asDiagonal()) * gain.transpose());
  return ll;
}

AltitudeAdaptation adapt_to_altitude(double h_km, const ImmConfig& cfg) {
  AltitudeAdaptation out;
  const double raw = (550.0 / h_km) * (550.0 / h_km);
  out.q_scale = std::clamp(raw, cfg.q_scale_min, cfg.q_scale_max);

  const double span = cfg.prior_h_high_km - cfg.prior_h_low_km;
  const double t = std::clamp((h_km - cfg.prior_h_low_km) / span, 0.0, 1.0);
  out.priors = cfg.prior_low + t * (cfg.prior_high - cfg.prior_low);

  out.transition = cfg.base_transition;
  const double ramp =
      std::clamp((cfg.t02_ramp_start_km - h_km) / cfg.t02_ramp_span_km, 0.0, 1.0);
  const double boost = cfg.t02_boost * ramp;
  out.transition(0, 2) += boost;
  out.transition(0, 0) -= boost;  // row re-normalized by reducing T00
  return out;
}

ImmState init_state(const TleRecord& first_obs, const ImmConfig& imm, const ObsNoise& noise,
                    const ForceConfig& force) {
  ImmState st;
  const EciState x0 = record_to_eci(first_obs, force);
  const Matrix6d p0 =
      imm.init_cov_inflation * Matrix6d(noise.diagonal(Source::TLE).asDiagonal());
  for (int m = 0; m < kModeCount; ++m) {
    st.mean[static_cast<std::size_t>(m)] = x0.vec();
    st.cov[static_cast<std::size_t>(m)] = p0;
  }
  const double h = altitude_km(mean_motion_to_sma(first_obs.mean_motion, force.mu));
  st.mu = adapt_to_altitude(h, imm).priors;
  st.mu /= st.mu.sum();
  st.last_epoch = first_obs.epoch;
  st.last_bstar = first_obs.bstar;
  return st;
}

ImmStepResult imm_step(ImmState& state, const TleRecord& obs, const ImmConfig& imm,
                       const UkfConfig& ukf, const std::array<ModeConfig, kModeCount>& modes,
                       const ObsNoise& noise, const ForceConfig& force) {
  if (obs.epoch < state.last_epoch)
    raise(ErrorCode::EpochOrder, "observation before filter time");
  const double dt = obs.epoch - state.last_epoch;
  const EciState z = record_to_eci(obs, force);
  const double h_km = altitude_km(mean_motion_to_sma(obs.mean_motion, force.mu));
  const AltitudeAdaptation adapt = adapt_to_altitude(h_km, imm);
  const Eigen::Matrix3d& tr = adapt.transition;

  // IMM mixing: c_j = sum_i T_ij mu_i, mixed moments with weights T_ij mu_i / c_j
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (int j = 0; j < kModeCount; ++j)
    for (int i = 0; i < kModeCount; ++i) c(j) += tr(i, j) * state.mu(i);
  std::array<Vector6d, kModeCount> mixed_mean;
  std::array<Matrix6d, kModeCount> mixed_cov;
  for (int j = 0; j < kModeCount; ++j) {
    Vector6d m = Vector6d::Zero();
    for (int i = 0; i < kModeCount; ++i) {
      const double w = c(j) > 0.0 ? tr(i, j) * state.mu(i) / c(j) : (i == j ? 1.0 : 0.0);
      m += w * state.mean[static_cast<std::size_t>(i)];
    }
    Matrix6d p = Matrix6d::Zero();
    for (int i = 0; i < kModeCount; ++i) {
      const double w = c(j) > 0.0 ? tr(i, j) * state.mu(i) / c(j) : (i == j ? 1.0 : 0.0);
      const Vector6d d = state.mean[static_cast<std::size_t>(i)] - m;
      p += w * (state.cov[static_cast<std::size_t>(i)] + d * d.transpose());
    }
    mixed_mean[static_cast<std::size_t>(j)] = m;
    mixed_cov[static_cast<std::size_t>(j)] = symmetrize(p);
  }

  ImmStepResult result;
  const Vector6d r_diag = noise.diagonal(obs.source);
  Eigen::Vector3d log_post;
  log_post.setConstant(kNegInf);
  for (int j = 0; j < kModeCount; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    Vector6d m = mixed_mean[sj];
    Matrix6d p = mixed_cov[sj];
    try {
      const double q_scale = j == 2 ? adapt.q_scale : 1.0;
      ukf_predict(modes[sj], m, p, dt, force, state.last_bstar, q_scale, ukf,
                  imm.predict_max_step_s);
      const double ll = ukf_update(m, p, z, r_diag);
      state.mean[sj] = m;
      state.cov[sj] = p;
      result.log_likelihood(j) = ll;
      log_post(j) = c(j) > 0.0 ? std::log(c(j)) + ll : kNegInf;
    } catch (const Error&) {
      // failure is attributed to this mode: posterior probability goes to zero
      state.mean[sj] = mixed_mean[sj];
      state.cov[sj] = mixed_cov[sj];
    }
  }

  const double lmax = log_post.maxCoeff();
  if (!std::isfinite(lmax))
    raise(ErrorCode::AllModesFailed, "every mode failed at epoch " + std::to_string(obs.epoch));
  const Eigen::Vector3d shifted = (log_post.array() - lmax).exp();
  state.mu = shifted / shifted.sum();
  state.last_epoch = obs.epoch;
  state.last_bstar = obs.bstar;
  return result;
}

Label assign_label(const Eigen::Vector3d& mu, double threshold) {
  int best = 0;
  for (int k = 1; k < kModeCount; ++k)
    if (mu(k) > mu(best)) best = k;  // ties break toward the lower index
  if (mu(best) <= threshold) return Label::NORMAL;
  switch (best) {
    case 1: return Label::MANEUVER;
    case 2: return Label::DECAY;
    default: return Label::NORMAL;
  }
}

void combined_estimate(const ImmState& state, Vector6d& mean, Matrix6d& cov) {
  mean.setZero();
  for (int i = 0; i < kModeCount; ++i)
    mean += state.mu(i) * state.mean[static_cast<std::size_t>(i)];
  cov.setZero();
  for (int i = 0; i < kModeCount; ++i) {
    const Vector6d d = state.mean[static_cast<std::size_t>(i)] - mean;
    cov += state.mu(i) * (state.cov[static_cast<std::size_t>(i)] + d * d.transpose());
  }
  cov = symmetrize(cov);
}

}  // namespace tlecascade
