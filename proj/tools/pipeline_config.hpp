#pragma once

/// @file pipeline_config.hpp
/// @brief Aggregated run configuration with defaults for every tunable in the
///        pipeline. INI-backed; unknown sections or keys are rejected so
///        typos cannot silently fall back to defaults.

#include <array>
#include <cstdint>
#include <string>

#include "tlecascade/cascade.hpp"
#include "tlecascade/dynamics.hpp"
#include "tlecascade/features.hpp"
#include "tlecascade/filter.hpp"
#include "tlecascade/rules.hpp"
#include "tlecascade/windowing.hpp"

namespace tlecascade::cli {

struct SplitConfig {
  std::uint64_t seed = 42;
  SplitFractions fractions;
};

struct IoConfig {
  std::string out;        ///< primary output path; empty means stdout
  std::string stats_out;  ///< normalization stats sidecar; empty means derived
};

struct PipelineConfig {
  ForceConfig force;
  RuleThresholds rules;
  UkfConfig ukf;
  std::array<ModeConfig, kModeCount> modes = default_modes();
  ObsNoise obs_noise;
  ImmConfig imm;
  ClipBounds features;
  WindowParams window;
  SplitConfig split;
  IoConfig io;

  CascadeConfigs cascade_configs() const {
    CascadeConfigs c;
    c.force = force;
    c.rules = rules;
    c.ukf = ukf;
    c.imm = imm;
    c.modes = modes;
    c.noise = obs_noise;
    c.clip = features;
    return c;
  }
};

/// Defaults overlaid with the INI file at `path`; every key optional, unknown
/// keys fatal (ConfigParse).
PipelineConfig load_pipeline_config(const std::string& path);

/// Apply an already-parsed document onto defaults (exposed for tests).
PipelineConfig apply_pipeline_ini(const struct IniDocument& doc, const std::string& origin);

/// Full resolved configuration, serialized back to INI. Logged by every run
/// so outputs are reproducible from logs alone.
std::string resolved_ini(const PipelineConfig& cfg);

}  // namespace tlecascade::cli
