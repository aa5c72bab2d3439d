#include "tlecascade/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "tlecascade/error.hpp"

namespace tlecascade {
namespace {

constexpr double kPi = 3.14159265358979323846;

// radial / in-track / cross-track unit frame of an inertial state
Eigen::Matrix3d ric_frame(const EciState& s) {
  const Eigen::Vector3d r_hat = s.r.normalized();
  const Eigen::Vector3d c_hat = s.r.cross(s.v).normalized();
  const Eigen::Vector3d i_hat = c_hat.cross(r_hat);
  Eigen::Matrix3d m;
  m.col(0) = r_hat;
  m.col(1) = i_hat;
  m.col(2) = c_hat;
  return m;
}

TleRecord state_to_record(const EciState& s, const Scenario& sc, UnixSeconds epoch,
                          Source source, const ForceConfig& force) {
  const KeplerElements el = eci_to_kepler(s, force.mu);
  TleRecord rec;
  rec.norad_id = sc.norad_id;
  rec.epoch = epoch;
  rec.mean_motion = sma_to_mean_motion(el.a, force.mu);
  rec.eccentricity = el.e;
  rec.inclination = el.i * 180.0 / kPi;
  rec.raan = el.raan * 180.0 / kPi;
  rec.argp = el.argp * 180.0 / kPi;
  rec.mean_anomaly = el.mean_anomaly * 180.0 / kPi;
  rec.bstar = sc.bstar;  // events never alter the reported drag term
  rec.n_dot = sc.n_dot;
  rec.source = source;
  return rec;
}

}  // namespace

SynthResult generate(const Scenario& sc, const ForceConfig& force) {
  for (const double dt : sc.schedule_dt_h)
    if (!(dt > 0.0)) raise(ErrorCode::NonPositive, "schedule gaps must be positive");
  double span_h = 0.0;
  for (const double dt : sc.schedule_dt_h) span_h += dt;
  for (const SynthEvent& ev : sc.events)
    if (ev.at_hours < 0.0 || ev.at_hours > span_h)
      raise(ErrorCode::EpochOrder, "event outside the observation span");

  std::vector<SynthEvent> events = sc.events;
  std::stable_sort(events.begin(), events.end(),
                   [](const SynthEvent& a, const SynthEvent& b) { return a.at_hours < b.at_hours; });

  KeplerElements el0;
  el0.a = mean_motion_to_sma(sc.mean_motion, force.mu);
  el0.e = sc.eccentricity;
  el0.i = sc.inclination_deg * kPi / 180.0;
  el0.raan = sc.raan_deg * kPi / 180.0;
  el0.argp = sc.argp_deg * kPi / 180.0;
  el0.mean_anomaly = sc.mean_anomaly_deg * kPi / 180.0;

  std::mt19937_64 rng(sc.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SynthResult out;
  EciState truth = kepler_to_eci(el0, force.mu);
  double t_h = 0.0;              // hours since epoch0
  double drag_multiplier = 1.0;  // product of all drag-scale events so far
  std::size_t next_event = 0;

  const auto apply_events_through = [&](double upto_h) -> bool {
    // advance truth to upto_h, applying events that occur on the way
    while (next_event < events.size() && events[next_event].at_hours <= upto_h) {
      const SynthEvent& ev = events[next_event];
      truth = propagate(truth, t_h * 3600.0, ev.at_hours * 3600.0, force,
                        sc.bstar * drag_multiplier);
      t_h = ev.at_hours;
      if (ev.kind == SynthEvent::Kind::IMPULSE) {
        truth.v += ric_frame(truth) * ev.dv_ric_mps;
      } else {
        drag_multiplier *= ev.drag_multiplier;
      }
      ++next_event;
    }
    truth = propagate(truth, t_h * 3600.0, upto_h * 3600.0, force,
                      sc.bstar * drag_multiplier);
    t_h = upto_h;
    return true;
  };

  const auto emit = [&](std::size_t obs_index) {
    const bool supgp = sc.supgp_stride > 0 &&
                       obs_index % static_cast<std::size_t>(sc.supgp_stride) == 0 &&
                       obs_index > 0;
    const NoiseProfile& np = supgp ? sc.supgp_noise : sc.tle_noise;
    EciState noisy = truth;
    for (int i = 0; i < 3; ++i) noisy.r(i) += np.pos_sigma_m * gauss(rng);
    for (int i = 0; i < 3; ++i) noisy.v(i) += np.vel_sigma_mps * gauss(rng);
    out.records.push_back(state_to_record(noisy, sc, sc.epoch0 + t_h * 3600.0,
                                          supgp ? Source::SUPGP : Source::TLE, force));
  };

  emit(0);
  double cum_h = 0.0;
  for (std::size_t k = 0; k < sc.schedule_dt_h.size(); ++k) {
    cum_h += sc.schedule_dt_h[k];
    try {
      apply_events_through(cum_h);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BelowModelFloor) throw;
      out.reentered = true;  // fell below the model floor: truncate here
      break;
    }
    emit(k + 1);
  }

  // truth labels: impulses mark the first observation at or after the event;
  // drag changes mark every subsequent observation; reentry marks the end
  out.truth.assign(out.records.size(), Label::NORMAL);
  double decay_from_h = std::numeric_limits<double>::infinity();
  for (const SynthEvent& ev : events)
    if (ev.kind == SynthEvent::Kind::DRAG_SCALE)
      decay_from_h = std::min(decay_from_h, ev.at_hours);
  std::vector<double> obs_h(out.records.size());
  for (std::size_t k = 0; k < out.records.size(); ++k)
    obs_h[k] = (out.records[k].epoch - sc.epoch0) / 3600.0;
  for (std::size_t k = 0; k < out.records.size(); ++k)
    if (obs_h[k] >= decay_from_h) out.truth[k] = Label::DECAY;
  for (const SynthEvent& ev : events) {
    if (ev.kind != SynthEvent::Kind::IMPULSE) continue;
    for (std::size_t k = 0; k < out.records.size(); ++k) {
      if (obs_h[k] >= ev.at_hours) {
        out.truth[k] = Label::MANEUVER;
        break;
      }
    }
  }
  if (out.reentered && !out.truth.empty()) out.truth.back() = Label::BREAKUP;
  return out;
}

DetectionReport detection_report(const std::vector<Label>& truth,
                                 const std::vector<Label>& predicted, int tolerance) {
  if (truth.size() != predicted.size())
    raise(ErrorCode::LengthMismatch, std::to_string(truth.size()) + " truth vs " +
                                         std::to_string(predicted.size()) + " predicted");
  DetectionReport rep;
  const auto near_same_class = [&](const std::vector<Label>& in, std::size_t idx, Label cls) {
    const std::size_t lo = idx >= static_cast<std::size_t>(tolerance)
                               ? idx - static_cast<std::size_t>(tolerance)
                               : 0;
    const std::size_t hi = std::min(truth.size(), idx + static_cast<std::size_t>(tolerance) + 1);
    for (std::size_t k = lo; k < hi; ++k)
      if (in[k] == cls) return true;
    return false;
  };
  for (int c = 1; c <= 3; ++c) {
    const Label cls = static_cast<Label>(c);
    ClassReport& cr = rep.per_class[static_cast<std::size_t>(c - 1)];
    std::size_t truth_hit = 0, pred_hit = 0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
      if (truth[k] == cls) {
        ++cr.truth_count;
        truth_hit += near_same_class(predicted, k, cls);
      }
      if (predicted[k] == cls) {
        ++cr.predicted_count;
        pred_hit += near_same_class(truth, k, cls);
      }
    }
    cr.recall_defined = cr.truth_count > 0;
    cr.precision_defined = cr.predicted_count > 0;
    cr.recall = cr.recall_defined
                    ? static_cast<double>(truth_hit) / static_cast<double>(cr.truth_count)
                    : 0.0;
    cr.precision = cr.precision_defined
                       ? static_cast<double>(pred_hit) / static_cast<double>(cr.predicted_count)
                       : 0.0;
  }
  return rep;
}

}  // namespace tlecascade
