#pragma once

/// @file scenario.hpp
/// @brief INI loader for synthetic-trajectory scenario files: one [scenario]
///        section plus zero or more ordered [event] sections.

#include <string>

#include "tlecascade/synth.hpp"

namespace tlecascade::cli {

/// Strict parse; unknown keys, missing schedule, or kind/key mismatches raise
/// ConfigParse.
Scenario load_scenario(const std::string& path);

}  // namespace tlecascade::cli
