#include "tlecascade/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "tlecascade/dynamics.hpp"
#include "tlecascade/error.hpp"

namespace tlecascade {

const std::array<const char*, kFeatureCount> kFeatureNames = {
    "epoch_h",  "mean_motion", "eccentricity", "inclination", "bstar",  "alt_km",
    "dt_hours", "raan",        "argp",         "mean_anomaly", "n_dot",
};

FeatureVector extract_features(const TleRecord* prev, const TleRecord& cur,
                               const ClipBounds& clip) {
  if (prev != nullptr) {
    if (prev->norad_id != cur.norad_id)
      raise(ErrorCode::SatelliteMismatch, std::to_string(prev->norad_id) + " vs " +
                                              std::to_string(cur.norad_id));
    if (prev->epoch > cur.epoch) raise(ErrorCode::EpochOrder, "previous record after current");
  }
  FeatureVector f;
  f[kFeatEpochHours] = cur.epoch / 3600.0;
  f[kFeatMeanMotion] = cur.mean_motion;
  f[kFeatEccentricity] = cur.eccentricity;
  f[kFeatInclination] = cur.inclination;
  f[kFeatBstar] = std::clamp(cur.bstar, -clip.bstar_abs, clip.bstar_abs);
  f[kFeatAltitudeKm] = altitude_km(mean_motion_to_sma(cur.mean_motion));
  f[kFeatDtHours] =
      prev == nullptr
          ? 0.0
          : std::clamp((cur.epoch - prev->epoch) / 3600.0, 0.0, clip.dt_hours_max);
  f[kFeatRaan] = cur.raan;
  f[kFeatArgp] = cur.argp;
  f[kFeatMeanAnomaly] = cur.mean_anomaly;
  f[kFeatNDot] = cur.n_dot;
  return f;
}

std::vector<FeatureVector> extract_feature_sequence(const std::vector<TleRecord>& records,
                                                    const ClipBounds& clip) {
  std::vector<FeatureVector> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i)
    out.push_back(extract_features(i == 0 ? nullptr : &records[i - 1], records[i], clip));
  return out;
}

void RunningStats::add(const FeatureVector& x) {
  ++count;
  for (int i = 0; i < kFeatureCount; ++i) {
    const double delta = x[i] - mean[static_cast<std::size_t>(i)];
    mean[static_cast<std::size_t>(i)] += delta / static_cast<double>(count);
    m2[static_cast<std::size_t>(i)] += delta * (x[i] - mean[static_cast<std::size_t>(i)]);
  }
}

void RunningStats::merge(const RunningStats& other) {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count);
  const double nb = static_cast<double>(other.count);
  const double nab = na + nb;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    const double delta = other.mean[i] - mean[i];
    mean[i] += delta * nb / nab;
    m2[i] += other.m2[i] + delta * delta * na * nb / nab;
  }
  count += other.count;
}

NormStats RunningStats::finalize() const {
  if (count == 0) raise(ErrorCode::DegenerateFeature, "empty feature stream");
  NormStats s;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    s.mean[i] = mean[i];
    const double var = m2[i] / static_cast<double>(count);
    if (!(var > 0.0))
      raise(ErrorCode::DegenerateFeature,
            std::string("feature '") + kFeatureNames[i] + "' has zero variance");
    s.std[i] = std::sqrt(var);
  }
  return s;
}

NormStats compute_norm_stats(const std::vector<FeatureVector>& rows) {
  RunningStats acc;
  for (const FeatureVector& r : rows) acc.add(r);
  return acc.finalize();
}

FeatureVector normalize(const FeatureVector& x, const NormStats& s) {
  FeatureVector out;
  for (std::size_t i = 0; i < kFeatureCount; ++i)
    out.v[i] = (x.v[i] - s.mean[i]) / s.std[i];
  return out;
}

FeatureVector denormalize(const FeatureVector& x, const NormStats& s) {
  FeatureVector out;
  for (std::size_t i = 0; i < kFeatureCount; ++i) out.v[i] = x.v[i] * s.std[i] + s.mean[i];
  return out;
}

void save_norm_stats(const std::string& path, const NormStats& s) {
  nlohmann::json j;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    j["features"].push_back(kFeatureNames[i]);
    j["mean"].push_back(s.mean[i]);
    j["std"].push_back(s.std[i]);
  }
  std::ofstream out(path);
  if (!out) raise(ErrorCode::Io, "cannot write " + path);
  out << j.dump(2) << '\n';
}

NormStats load_norm_stats(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::Io, "cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ConfigParse, path + ": " + e.what());
  }
  NormStats s;
  if (j.at("mean").size() != kFeatureCount || j.at("std").size() != kFeatureCount)
    raise(ErrorCode::ConfigParse, path + ": expected 11 features");
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    s.mean[i] = j["mean"][i].get<double>();
    s.std[i] = j["std"][i].get<double>();
    if (!(s.std[i] > 0.0)) raise(ErrorCode::DegenerateFeature, "non-positive std loaded");
  }
  return s;
}

std::uint64_t norm_stats_digest(const NormStats& s) {
  // FNV-1a over the canonical little-endian byte image of means then stds
  std::uint64_t h = 1469598103934665603ull;
  const auto mix = [&h](double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  for (const double m : s.mean) mix(m);
  for (const double sd : s.std) mix(sd);
  return h;
}

}  // namespace tlecascade
