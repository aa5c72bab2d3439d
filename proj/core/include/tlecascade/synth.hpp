#pragma once

/// @file synth.hpp
/// @brief Ground-truth oracle: synthetic element-set histories with injected
///        impulsive maneuvers and drag changes, plus detection scoring.

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "tlecascade/dynamics.hpp"
#include "tlecascade/rules.hpp"
#include "tlecascade/tle.hpp"

namespace tlecascade {

struct NoiseProfile {
  double pos_sigma_m = 1000.0;
  double vel_sigma_mps = 1.0;
};

struct SynthEvent {
  enum class Kind { IMPULSE, DRAG_SCALE };
  Kind kind = Kind::IMPULSE;
  double at_hours = 0.0;  ///< offset from the scenario epoch, within the schedule span
  /// IMPULSE: delta-v in the radial / in-track / cross-track frame of the
  /// instantaneous truth state, m/s.
  Eigen::Vector3d dv_ric_mps = Eigen::Vector3d::Zero();
  /// DRAG_SCALE: bstar multiplier applied to the truth propagation from
  /// at_hours onward. Emitted records keep the unscaled bstar, so the change
  /// is visible only through the trajectory.
  double drag_multiplier = 1.0;
};

struct Scenario {
  int norad_id = 90001;
  UnixSeconds epoch0 = 1735689600.0;  ///< 2025-01-01T00:00:00Z
  double mean_motion = 15.1;          ///< rev/day
  double eccentricity = 1e-3;
  double inclination_deg = 53.0;
  double raan_deg = 120.0;
  double argp_deg = 40.0;
  double mean_anomaly_deg = 10.0;
  double bstar = 1e-6;  ///< ~0.08 m^2/kg ballistic: slow nominal decay in LEO
  double n_dot = 0.0;
  std::vector<double> schedule_dt_h;  ///< positive inter-observation gaps
  NoiseProfile tle_noise{1000.0, 1.0};
  NoiseProfile supgp_noise{50.0, 0.05};
  int supgp_stride = 0;  ///< every k-th observation tagged SUPGP; 0 = never
  std::vector<SynthEvent> events;
  std::uint64_t seed = 1;
};

struct SynthResult {
  std::vector<TleRecord> records;
  std::vector<Label> truth;  ///< same length as records
  bool reentered = false;    ///< history truncated below the model floor
};

/// Integrate the truth trajectory with the full force model, apply events at
/// their epochs, and emit noisy element-set observations on the schedule.
/// Truth labels: MANEUVER at the first observation at or after each impulse,
/// DECAY from a drag-scale epoch onward, trailing BREAKUP if the trajectory
/// fell below the model floor (history truncated at the last good record).
SynthResult generate(const Scenario& sc, const ForceConfig& force);

struct ClassReport {
  double precision = 0.0;
  double recall = 0.0;
  bool precision_defined = false;  ///< false when there were no predictions
  bool recall_defined = false;     ///< false when there were no truth events
  std::size_t truth_count = 0;
  std::size_t predicted_count = 0;
};

struct DetectionReport {
  std::array<ClassReport, 3> per_class;  ///< MANEUVER, DECAY, BREAKUP

  const ClassReport& for_label(Label l) const {
    return per_class[static_cast<std::size_t>(l) - 1];
  }
};

/// A truth timestep counts as detected if any same-class prediction lies
/// within +-tolerance timesteps; precision mirrors this from the prediction
/// side. Undefined quantities are reported as 0 with their flag cleared.
DetectionReport detection_report(const std::vector<Label>& truth,
                                 const std::vector<Label>& predicted, int tolerance = 3);

}  // namespace tlecascade
