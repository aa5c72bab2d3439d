#pragma once

/// @file rules.hpp
/// @brief Tier 1: the deterministic physical-rule labeler over consecutive
///        element-set pairs.

#include <cstdint>
#include <vector>

#include "tlecascade/tle.hpp"

namespace tlecascade {

enum class Label : std::uint8_t { NORMAL = 0, MANEUVER = 1, DECAY = 2, BREAKUP = 3 };

constexpr const char* to_string(Label l) noexcept {
  switch (l) {
    case Label::NORMAL: return "normal";
    case Label::MANEUVER: return "maneuver";
    case Label::DECAY: return "decay";
    case Label::BREAKUP: return "breakup";
  }
  return "?";
}

/// All thresholds are strict: a pair sitting exactly at a threshold does not
/// fire that rule.
struct RuleThresholds {
  double h_reentry_km = 250.0;
  double h_low_km = 400.0;
  double dh_decay_km = 5.0;
  double dh_man_km = 10.0;
  double di_man_deg = 0.1;
  double de_man = 0.01;
  double bstar_floor = 5e-3;
  double bstar_ratio = 2.0;
};

struct RuleVerdict {
  Label label = Label::NORMAL;
  int rule_index = 0;  ///< 1-based rule that fired; 0 when NORMAL
};

/// Highest-priority matching rule wins:
///   1 reentry altitude -> BREAKUP        2 altitude drop while low -> DECAY
///   3 inclination jump -> MANEUVER       4 altitude jump -> MANEUVER
///   5 eccentricity jump -> MANEUVER      6 bstar sign flip -> MANEUVER
///   7 bstar ratio jump -> DECAY          else NORMAL
RuleVerdict rule_label_ex(const TleRecord& prev, const TleRecord& cur,
                          const RuleThresholds& th = {});

Label rule_label(const TleRecord& prev, const TleRecord& cur, const RuleThresholds& th = {});

/// Pairwise application along a chronological stream; label[0] = NORMAL.
std::vector<Label> rule_label_sequence(const std::vector<TleRecord>& records,
                                       const RuleThresholds& th = {});

}  // namespace tlecascade
