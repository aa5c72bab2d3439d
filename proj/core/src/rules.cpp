#include "tlecascade/rules.hpp"

#include <cmath>

#include "tlecascade/dynamics.hpp"
#include "tlecascade/error.hpp"

namespace tlecascade {

RuleVerdict rule_label_ex(const TleRecord& prev, const TleRecord& cur,
                          const RuleThresholds& th) {
  if (prev.norad_id != cur.norad_id)
    raise(ErrorCode::SatelliteMismatch,
          std::to_string(prev.norad_id) + " vs " + std::to_string(cur.norad_id));
  if (prev.epoch > cur.epoch) raise(ErrorCode::EpochOrder, "previous record after current");

  // same altitude derivation as the feature layer, bit for bit
  const double alt_prev = altitude_km(mean_motion_to_sma(prev.mean_motion));
  const double alt_cur = altitude_km(mean_motion_to_sma(cur.mean_motion));

  if (alt_cur < th.h_reentry_km) return {Label::BREAKUP, 1};
  if (alt_prev - alt_cur > th.dh_decay_km && alt_cur < th.h_low_km) return {Label::DECAY, 2};
  if (std::fabs(cur.inclination - prev.inclination) > th.di_man_deg)
    return {Label::MANEUVER, 3};
  if (std::fabs(alt_cur - alt_prev) > th.dh_man_km) return {Label::MANEUVER, 4};
  if (std::fabs(cur.eccentricity - prev.eccentricity) > th.de_man) return {Label::MANEUVER, 5};
  if (prev.bstar * cur.bstar < 0.0 && std::fabs(prev.bstar) > th.bstar_floor &&
      std::fabs(cur.bstar) > th.bstar_floor)
    return {Label::MANEUVER, 6};
  // ratio test is guarded on the previous magnitude so noise-level bstar
  // values cannot produce spurious firings (and the ratio stays defined)
  if (std::fabs(prev.bstar) > th.bstar_floor &&
      std::fabs(cur.bstar) / std::fabs(prev.bstar) > th.bstar_ratio)
    return {Label::DECAY, 7};
  return {Label::NORMAL, 0};
}

Label rule_label(const TleRecord& prev, const TleRecord& cur, const RuleThresholds& th) {
  return rule_label_ex(prev, cur, th).label;
}

std::vector<Label> rule_label_sequence(const std::vector<TleRecord>& records,
                                       const RuleThresholds& th) {
  std::vector<Label> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i)
    out.push_back(i == 0 ? Label::NORMAL : rule_label(records[i - 1], records[i], th));
  return out;
}

}  // namespace tlecascade
