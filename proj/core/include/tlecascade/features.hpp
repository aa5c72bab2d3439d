#pragma once

/// @file features.hpp
/// @brief The eleven-feature per-record representation with clipping and
///        corpus z-score normalization.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tlecascade/tle.hpp"

namespace tlecascade {

inline constexpr int kFeatureCount = 11;

/// Frozen feature index order; every downstream module indexes through these.
enum FeatureIndex : int {
  kFeatEpochHours = 0,    ///< epoch, hours (absolute at extraction, window-relative later)
  kFeatMeanMotion = 1,    ///< rev/day
  kFeatEccentricity = 2,
  kFeatInclination = 3,   ///< deg
  kFeatBstar = 4,         ///< clipped to [-1, 1]
  kFeatAltitudeKm = 5,    ///< derived from mean motion, mean-radius convention
  kFeatDtHours = 6,       ///< gap to previous record, clipped to [0, 240]
  kFeatRaan = 7,          ///< deg
  kFeatArgp = 8,          ///< deg
  kFeatMeanAnomaly = 9,   ///< deg
  kFeatNDot = 10,         ///< rev/day^2, raw half-rate field
};

extern const std::array<const char*, kFeatureCount> kFeatureNames;

struct FeatureVector {
  std::array<double, kFeatureCount> v{};

  double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
};

struct ClipBounds {
  double bstar_abs = 1.0;
  double dt_hours_max = 240.0;
};

/// Extract the raw feature row for cur; prev supplies the dt_hours gap and may
/// be null for the first record of a stream (dt_hours = 0).
FeatureVector extract_features(const TleRecord* prev, const TleRecord& cur,
                               const ClipBounds& clip = {});

/// extract_features over a chronological single-satellite stream.
std::vector<FeatureVector> extract_feature_sequence(const std::vector<TleRecord>& records,
                                                    const ClipBounds& clip = {});

/// Per-feature corpus mean and population standard deviation.
struct NormStats {
  std::array<double, kFeatureCount> mean{};
  std::array<double, kFeatureCount> std{};
};

/// Single-pass (count, mean, M2) accumulator, mergeable across shards.
struct RunningStats {
  long long count = 0;
  std::array<double, kFeatureCount> mean{};
  std::array<double, kFeatureCount> m2{};

  void add(const FeatureVector& x);
  void merge(const RunningStats& other);
  /// Population-convention finalization; any zero-variance feature is rejected.
  NormStats finalize() const;
};

NormStats compute_norm_stats(const std::vector<FeatureVector>& rows);

FeatureVector normalize(const FeatureVector& x, const NormStats& s);
FeatureVector denormalize(const FeatureVector& x, const NormStats& s);

/// Stats persistence (small JSON document with feature names) and the digest
/// embedded in dataset headers so consumers can detect scaling mismatches.
void save_norm_stats(const std::string& path, const NormStats& s);
NormStats load_norm_stats(const std::string& path);
std::uint64_t norm_stats_digest(const NormStats& s);

}  // namespace tlecascade
