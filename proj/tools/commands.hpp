#pragma once

/// @file commands.hpp
/// @brief Subcommand implementations. Each returns a process exit code:
///        0 success, 1 partial per-satellite failures, 2 fatal (also raised
///        as Error and mapped by main).

#include <string>
#include <vector>

#include "pipeline_config.hpp"

namespace tlecascade::cli {

struct CommonOpts {
  PipelineConfig cfg;
  int jobs = 1;
};

int cmd_parse(const CommonOpts& o, const std::string& archive, const std::string& out,
              const std::string& source_tag);

int cmd_features(const CommonOpts& o, const std::string& archive, const std::string& out,
                 const std::string& stats_out);

int cmd_windows(const CommonOpts& o, const std::string& archive, const std::string& out,
                const std::string& stats_out, const std::vector<std::string>& label_tiers);

int cmd_label_rule(const CommonOpts& o, const std::string& archive, const std::string& out,
                   const std::string& labels_out);

int cmd_label_imm(const CommonOpts& o, const std::string& archive, const std::string& supgp,
                  const std::string& out);

int cmd_cascade(const CommonOpts& o, const std::string& archive, const std::string& supgp,
                const std::string& out, bool no_imm, bool no_innovation);

int cmd_stats(const std::string& jsonl_path);

int cmd_synth(const CommonOpts& o, const std::string& scenario_path, const std::string& out,
              const std::string& supgp_out, const std::string& truth_out);

}  // namespace tlecascade::cli
