#include "tlecascade/cascade.hpp"

#include <cmath>

#include "tlecascade/error.hpp"

namespace tlecascade {
namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_deg(double x) {
  double w = std::fmod(x, 360.0);
  if (w < 0) w += 360.0;
  if (w >= 360.0) w = 0.0;
  return w;
}

// difference on the circle into (-180, 180]
double angle_diff_deg(double a, double b) {
  double d = std::fmod(a - b, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

}  // namespace

double TierStats::ratio() const {
  if (rule_nonnormal == 0)
    raise(ErrorCode::UndefinedRatio, "no rule-tier anomalies to ratio against");
  return static_cast<double>(imm_nonnormal) / static_cast<double>(rule_nonnormal);
}

void TierStats::merge(const TierStats& other) {
  rule_nonnormal += other.rule_nonnormal;
  imm_nonnormal += other.imm_nonnormal;
  both_fire += other.both_fire;
  only_rule += other.only_rule;
  only_imm += other.only_imm;
  both_ran += other.both_ran;
  rule_only_timesteps += other.rule_only_timesteps;
}

TierStats tier_stats(const std::vector<CascadeRecord>& records) {
  TierStats st;
  for (const CascadeRecord& r : records) {
    if (!r.imm_label.has_value()) {
      ++st.rule_only_timesteps;
      continue;
    }
    ++st.both_ran;
    const bool rule_fired = r.rule_label != Label::NORMAL;
    const bool imm_fired = *r.imm_label != Label::NORMAL;
    st.rule_nonnormal += rule_fired;
    st.imm_nonnormal += imm_fired;
    st.both_fire += rule_fired && imm_fired;
    st.only_rule += rule_fired && !imm_fired;
    st.only_imm += imm_fired && !rule_fired;
  }
  return st;
}

FeatureVector physics_predict_elements(const FeatureVector& v, double dt_hours,
                                       const ForceConfig& force, double k_e) {
  FeatureVector out = v;
  const double dt_days = dt_hours / 24.0;
  const double dt_s = dt_hours * 3600.0;
  const double n0 = v[kFeatMeanMotion];

  // the carried n_dot field is the half-rate convention, hence the factor 2
  double n1 = n0 + 2.0 * v[kFeatNDot] * dt_days;
  if (!(n1 > 0.0)) n1 = 1e-6;  // this op never errors; keep the orbit defined
  out[kFeatMeanMotion] = n1;
  out[kFeatAltitudeKm] = altitude_km(mean_motion_to_sma(n1, force.mu));

  const double a = mean_motion_to_sma(n0, force.mu);
  const double n_rad = n0 * 2.0 * kPi / 86400.0;

  // drag-driven circularization: de/dt = -k_e rho B n a e, clamped at zero;
  // density is looked up at the force-model altitude and clamped to the table
  double e1 = v[kFeatEccentricity];
  if (force.enable_drag && e1 > 0.0) {
    const double h_force_km =
        std::max((a - force.re_equatorial_m) / 1000.0,
                 force.atmosphere.empty() ? 0.0 : force.atmosphere.front().h0_km);
    const double rho = force.atmosphere.empty() ? 0.0 : atmosphere_density(h_force_km, force);
    const double ballistic = std::max(v[kFeatBstar], 0.0) * force.bstar_to_ballistic;
    e1 = std::max(0.0, e1 - k_e * rho * ballistic * n_rad * a * e1 * dt_s);
  }
  out[kFeatEccentricity] = e1;

  if (force.enable_j2) {
    const double p = a * (1.0 - v[kFeatEccentricity] * v[kFeatEccentricity]);
    const double re_p = force.re_equatorial_m / p;
    const double ci = std::cos(v[kFeatInclination] * kPi / 180.0);
    const double raan_rate = -1.5 * n_rad * force.j2 * re_p * re_p * ci;           // rad/s
    const double argp_rate = 0.75 * n_rad * force.j2 * re_p * re_p * (5.0 * ci * ci - 1.0);
    out[kFeatRaan] = wrap_deg(v[kFeatRaan] + raan_rate * dt_s * 180.0 / kPi);
    out[kFeatArgp] = wrap_deg(v[kFeatArgp] + argp_rate * dt_s * 180.0 / kPi);
  }
  out[kFeatMeanAnomaly] = wrap_deg(v[kFeatMeanAnomaly] + n0 * dt_days * 360.0);
  out[kFeatEpochHours] = v[kFeatEpochHours] + dt_hours;
  out[kFeatDtHours] = dt_hours;
  // bstar and n_dot persist unchanged
  return out;
}

std::vector<InnovationRecord> innovation_score(const Window& window,
                                               const std::array<double, kFeatureCount>& sigma,
                                               const ForceConfig& force, double k_e) {
  if (window.rows.size() < 2)
    raise(ErrorCode::LengthMismatch, "innovation needs at least two rows");
  for (const double s : sigma)
    if (!(s > 0.0)) raise(ErrorCode::NonPositiveSigma, "innovation scale must be positive");

  std::vector<InnovationRecord> out;
  out.reserve(window.rows.size() - 1);
  for (std::size_t t = 0; t + 1 < window.rows.size(); ++t) {
    const FeatureVector& next = window.rows[t + 1];
    const FeatureVector pred =
        physics_predict_elements(window.rows[t], next[kFeatDtHours], force, k_e);
    InnovationRecord rec;
    for (int i = 0; i < kFeatureCount; ++i) {
      const bool on_circle = i == kFeatRaan || i == kFeatArgp || i == kFeatMeanAnomaly;
      rec.innovation(i) =
          on_circle ? angle_diff_deg(next[i], pred[i]) : next[i] - pred[i];
    }
    double sum = 0.0;
    for (int i = 0; i < kFeatureCount; ++i) {
      const double z = rec.innovation(i) / sigma[static_cast<std::size_t>(i)];
      sum += z * z;
    }
    rec.score = std::sqrt(sum);
    out.push_back(rec);
  }
  return out;
}

CascadeResult run_cascade(const std::vector<TleRecord>& history, const CascadeConfigs& cfg,
                          const CascadeTiers& tiers) {
  CascadeResult out;
  if (history.empty()) return out;

  const std::vector<Label> rule_labels = rule_label_sequence(history, cfg.rules);

  std::vector<Label> imm_labels;
  std::vector<Eigen::Vector3d> imm_mu;
  bool imm_ok = false;
  if (tiers.imm) {
    imm_ok = true;
    int restarts_left = cfg.max_filter_restarts;
    try {
      ImmState st = init_state(history.front(), cfg.imm, cfg.noise, cfg.force);
      imm_mu.push_back(st.mu);
      imm_labels.push_back(assign_label(st.mu, cfg.imm.label_threshold));
      for (std::size_t k = 1; k < history.size(); ++k) {
        try {
          imm_step(st, history[k], cfg.imm, cfg.ukf, cfg.modes, cfg.noise, cfg.force);
        } catch (const Error&) {
          // A diverged track is unrecoverable in place: once a mode's state has
          // been pulled onto an absurd orbit its covariance no longer admits the
          // correction. Start a fresh track at the failing observation instead,
          // a bounded number of times, before giving the satellite up.
          if (restarts_left == 0) throw;
          --restarts_left;
          ++out.filter_restarts;
          st = init_state(history[k], cfg.imm, cfg.noise, cfg.force);
        }
        imm_mu.push_back(st.mu);
        imm_labels.push_back(assign_label(st.mu, cfg.imm.label_threshold));
      }
    } catch (const Error& e) {
      imm_ok = false;
      out.filter_degraded = true;
      out.warning = "satellite " + std::to_string(history.front().norad_id) +
                    " degraded to rule-only output: " + e.what();
    }
  }

  std::vector<double> scores;  // aligned with timesteps 1..N-1
  if (tiers.innovation && history.size() >= 2) {
    const std::vector<FeatureVector> rows = extract_feature_sequence(history, cfg.clip);
    std::array<double, kFeatureCount> sigma{};
    if (cfg.sigma.has_value()) {
      sigma = *cfg.sigma;
    } else {
      // per-history fallback scale; constant features get a neutral 1.0
      RunningStats acc;
      for (const FeatureVector& r : rows) acc.add(r);
      for (std::size_t i = 0; i < kFeatureCount; ++i) {
        const double var = acc.m2[i] / static_cast<double>(acc.count);
        sigma[i] = var > 0.0 ? std::sqrt(var) : 1.0;
      }
    }
    Window whole;
    whole.norad_id = history.front().norad_id;
    whole.rows = rows;
    const std::vector<InnovationRecord> recs =
        innovation_score(whole, sigma, cfg.force, cfg.k_e);
    scores.reserve(recs.size());
    for (const InnovationRecord& r : recs) scores.push_back(r.score);
  }

  out.records.reserve(history.size());
  for (std::size_t k = 0; k < history.size(); ++k) {
    CascadeRecord rec;
    rec.norad_id = history[k].norad_id;
    rec.epoch = history[k].epoch;
    rec.rule_label = rule_labels[k];
    rec.source = history[k].source;
    if (tiers.imm && imm_ok) {
      rec.imm_label = imm_labels[k];
      rec.mu = imm_mu[k];
    }
    if (k >= 1 && k - 1 < scores.size()) rec.innovation_score = scores[k - 1];
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace tlecascade
