#pragma once

/// @file cascade.hpp
/// @brief Per-satellite orchestration of the labeling tiers, cross-tier
///        statistics, and the frozen element-space physics innovation score.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tlecascade/features.hpp"
#include "tlecascade/filter.hpp"
#include "tlecascade/rules.hpp"
#include "tlecascade/tle.hpp"
#include "tlecascade/windowing.hpp"

namespace tlecascade {

struct CascadeRecord {
  int norad_id = 0;
  UnixSeconds epoch = 0.0;
  Label rule_label = Label::NORMAL;
  std::optional<Label> imm_label;          ///< absent when the filter tier did not run
  std::optional<Eigen::Vector3d> mu;       ///< present iff imm_label present
  Source source = Source::TLE;
  std::optional<double> innovation_score;  ///< absent for the first timestep
};

struct TierStats {
  std::size_t rule_nonnormal = 0;
  std::size_t imm_nonnormal = 0;
  std::size_t both_fire = 0;
  std::size_t only_rule = 0;
  std::size_t only_imm = 0;
  std::size_t both_ran = 0;   ///< timesteps where both tiers produced a label
  std::size_t rule_only_timesteps = 0;

  /// imm:rule anomaly-count ratio over the both-ran timesteps.
  double ratio() const;
  /// fraction of rule positives that the filter tier also flags
  double rule_overlap_fraction() const {
    return rule_nonnormal ? static_cast<double>(both_fire) / static_cast<double>(rule_nonnormal)
                          : 0.0;
  }
  void merge(const TierStats& other);
};

TierStats tier_stats(const std::vector<CascadeRecord>& records);

/// Analytic first-order element-space prediction over dt hours: mean motion
/// advanced by its (doubled, see TleRecord::n_dot) rate, eccentricity decayed
/// toward circular in proportion to drag strength, the plane angles advanced
/// by the standard secular J2 rates, mean anomaly by n*dt. The dt_hours slot
/// of the result carries dt so a same-gap observation differences to zero.
FeatureVector physics_predict_elements(const FeatureVector& v, double dt_hours,
                                       const ForceConfig& force, double k_e = 1.0);

struct InnovationRecord {
  Eigen::Matrix<double, kFeatureCount, 1> innovation;  ///< observation minus prediction
  double score = 0.0;                                  ///< sigma-normalized Euclidean norm
};

/// Innovation of each window row against the physics prediction from the
/// previous row; entry k corresponds to window row k+1. The raan/argp/mean
/// anomaly components are differenced on the circle into (-180, 180].
std::vector<InnovationRecord> innovation_score(const Window& window,
                                               const std::array<double, kFeatureCount>& sigma,
                                               const ForceConfig& force, double k_e = 1.0);

struct CascadeTiers {
  bool imm = true;
  bool innovation = true;
};

struct CascadeConfigs {
  ForceConfig force;
  RuleThresholds rules;
  UkfConfig ukf;
  ImmConfig imm;
  std::array<ModeConfig, kModeCount> modes = default_modes();
  ObsNoise noise;
  ClipBounds clip;
  double k_e = 1.0;  ///< eccentricity-decay coefficient of the physics prediction
  /// Innovation scale; when absent, per-feature stds of this history's own
  /// feature stream are used (zero-variance features fall back to scale 1).
  std::optional<std::array<double, kFeatureCount>> sigma;
  /// Diverged filters are re-initialized from the failing observation this
  /// many times before the satellite degrades to rule-only output.
  int max_filter_restarts = 3;
};

struct CascadeResult {
  std::vector<CascadeRecord> records;
  bool filter_degraded = false;  ///< filter tier failed; records are rule-only
  int filter_restarts = 0;       ///< divergence recoveries consumed by this satellite
  std::string warning;
};

/// Run the enabled tiers over one satellite's chronological history. Filter
/// failures degrade that satellite to rule-only output rather than aborting.
CascadeResult run_cascade(const std::vector<TleRecord>& history, const CascadeConfigs& cfg,
                          const CascadeTiers& tiers = {});

}  // namespace tlecascade
