#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "tlecascade/error.hpp"

namespace {

using namespace tlecascade;
using namespace tlecascade::cli;

int run(int argc, char** argv) {
  CLI::App app{"TLE anomaly labeling cascade"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  int jobs = 1;
  app.add_option("--config", config_path, "pipeline config file (INI)")
      ->envname("TLECASCADE_CONFIG");
  app.add_option("--jobs", jobs, "worker threads over satellites")
      ->check(CLI::PositiveNumber);

  std::string archive, out, stats_out, supgp, labels_out, source_tag = "TLE";
  std::vector<std::string> label_tiers;
  bool no_imm = false, no_innovation = false;
  std::string scenario_path, supgp_out, truth_out, stats_in;

  auto* parse = app.add_subcommand("parse", "parse a bulk element-set archive to JSONL");
  parse->add_option("archive", archive, "archive file")->required();
  parse->add_option("--out", out, "output JSONL path (default stdout)");
  parse->add_option("--source", source_tag, "tag records TLE or SUPGP");

  auto* features = app.add_subcommand("features", "extract feature rows and corpus stats");
  features->add_option("archive", archive, "archive file")->required();
  features->add_option("--out", out, "output JSONL path (default stdout)");
  features->add_option("--stats-out", stats_out, "normalization stats path");

  auto* windows = app.add_subcommand("windows", "build the windowed binary dataset");
  windows->add_option("archive", archive, "archive file")->required();
  windows->add_option("--out", out, "dataset path")->required();
  windows->add_option("--stats-out", stats_out, "normalization stats path");
  windows->add_option("--labels", label_tiers, "label tiers to attach (rule, imm)")
      ->delimiter(',');

  auto* label_rule = app.add_subcommand("label-rule", "deterministic physical rule labels");
  label_rule->add_option("archive", archive, "archive file")->required();
  label_rule->add_option("--out", out, "non-normal event JSONL (default stdout)");
  label_rule->add_option("--labels-out", labels_out, "per-timestep label bytes (binary)");

  auto* label_imm = app.add_subcommand("label-imm", "filter-bank labels with posteriors");
  label_imm->add_option("archive", archive, "archive file")->required();
  label_imm->add_option("--supgp", supgp, "second archive tagged SUPGP");
  label_imm->add_option("--out", out, "per-timestep JSONL (default stdout)");

  auto* cascade = app.add_subcommand("cascade", "full tier cascade with summary stats");
  cascade->add_option("archive", archive, "archive file")->required();
  cascade->add_option("--supgp", supgp, "second archive tagged SUPGP");
  cascade->add_option("--out", out, "record JSONL path (default stdout)");
  cascade->add_flag("--no-imm", no_imm, "skip the filter tier");
  cascade->add_flag("--no-innovation", no_innovation, "skip innovation scores");

  auto* stats = app.add_subcommand("stats", "recompute tier stats from cascade JSONL");
  stats->add_option("records", stats_in, "cascade JSONL file")->required();

  auto* synth = app.add_subcommand("synth", "generate a synthetic element-set archive");
  synth->add_option("scenario", scenario_path, "scenario file (INI)")->required();
  synth->add_option("--out", out, "element-set archive path (default stdout)");
  synth->add_option("--supgp-out", supgp_out, "route SUPGP-tagged records here");
  synth->add_option("--truth-out", truth_out, "ground-truth label JSONL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help() << "\n";
    return 2;
  }

  CommonOpts common;
  common.cfg = load_pipeline_config(config_path);
  common.jobs = jobs;
  if (common.cfg.io.out.empty()) common.cfg.io.out = out;
  if (common.cfg.io.stats_out.empty()) common.cfg.io.stats_out = stats_out;
  if (!out.empty()) common.cfg.io.out = out;  // flags override config
  if (!stats_out.empty()) common.cfg.io.stats_out = stats_out;

  // reproducibility: the full resolved configuration goes to the log on
  // every run, overrides included
  std::cerr << "# resolved config (" << (config_path.empty() ? "defaults" : config_path)
            << ")\n"
            << resolved_ini(common.cfg) << "# end config\n";

  if (*parse) return cmd_parse(common, archive, common.cfg.io.out, source_tag);
  if (*features)
    return cmd_features(common, archive, common.cfg.io.out, common.cfg.io.stats_out);
  if (*windows)
    return cmd_windows(common, archive, common.cfg.io.out, common.cfg.io.stats_out,
                       label_tiers);
  if (*label_rule) return cmd_label_rule(common, archive, common.cfg.io.out, labels_out);
  if (*label_imm) return cmd_label_imm(common, archive, supgp, common.cfg.io.out);
  if (*cascade)
    return cmd_cascade(common, archive, supgp, common.cfg.io.out, no_imm, no_innovation);
  if (*stats) return cmd_stats(stats_in);
  if (*synth) return cmd_synth(common, scenario_path, common.cfg.io.out, supgp_out, truth_out);
  return 2;  // unreachable with require_subcommand(1)
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
