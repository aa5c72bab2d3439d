#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "scenario.hpp"
#include "tlecascade/cascade.hpp"
#include "tlecascade/error.hpp"
#include "tlecascade/synth.hpp"
#include "tlecascade/windowing.hpp"

namespace tlecascade::cli {

namespace {

using json = nlohmann::json;

/// Output stream bound to a file, or stdout when the path is empty.
class OutStream {
 public:
  explicit OutStream(const std::string& path) {
    if (path.empty()) return;
    file_.open(path, std::ios::binary);  // binary: byte-identical across platforms
    if (!file_) raise(ErrorCode::Io, "cannot open output file '" + path + "'");
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

/// Index-claiming worker pool; results land in caller-provided slots so the
/// emission order never depends on scheduling.
void parallel_over(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

/// Per-satellite result slot: emitted text plus an error note when the
/// satellite failed (partial-failure exit code 1).
struct SatSlot {
  std::string text;
  std::string error;
};

int finish_slots(const std::vector<SatSlot>& slots, const Archive& arch, std::ostream& out) {
  std::size_t failed = 0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    out << slots[i].text;
    if (!slots[i].error.empty()) {
      ++failed;
      std::cerr << "satellite " << arch.satellites[i].norad_id << ": " << slots[i].error
                << "\n";
    }
  }
  if (failed == 0) return 0;
  if (failed == slots.size()) {
    std::cerr << "all " << failed << " satellites failed\n";
    return 2;
  }
  std::cerr << failed << " of " << slots.size() << " satellites failed\n";
  return 1;
}

Archive load_inputs(const std::string& archive, const std::string& supgp) {
  Archive arch = read_bulk_archive(archive, Source::TLE);
  if (!supgp.empty()) merge_archives(arch, read_bulk_archive(supgp, Source::SUPGP));
  return arch;
}

json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

json record_json(const TleRecord& r) {
  return json{{"norad", r.norad_id},
              {"epoch", r.epoch},
              {"mean_motion", r.mean_motion},
              {"eccentricity", r.eccentricity},
              {"inclination", r.inclination},
              {"raan", r.raan},
              {"argp", r.argp},
              {"mean_anomaly", r.mean_anomaly},
              {"bstar", r.bstar},
              {"n_dot", r.n_dot},
              {"source", to_string(r.source)}};
}

Label label_from_string(const std::string& s, const std::string& context) {
  if (s == "normal") return Label::NORMAL;
  if (s == "maneuver") return Label::MANEUVER;
  if (s == "decay") return Label::DECAY;
  if (s == "breakup") return Label::BREAKUP;
  raise(ErrorCode::FieldParse, context + ": unknown label '" + s + "'");
}

Source source_from_string(const std::string& s, const std::string& context) {
  if (s == "TLE") return Source::TLE;
  if (s == "SUPGP") return Source::SUPGP;
  raise(ErrorCode::FieldParse, context + ": unknown source '" + s + "'");
}

json tier_stats_json(const TierStats& ts) {
  json j{{"rule_nonnormal", ts.rule_nonnormal},
         {"imm_nonnormal", ts.imm_nonnormal},
         {"both_fire", ts.both_fire},
         {"only_rule", ts.only_rule},
         {"only_imm", ts.only_imm},
         {"both_ran", ts.both_ran},
         {"rule_only_timesteps", ts.rule_only_timesteps}};
  j["ratio"] = ts.rule_nonnormal ? json(ts.ratio()) : json(nullptr);
  j["rule_overlap_fraction"] = ts.rule_overlap_fraction();
  return j;
}

json cascade_record_json(const CascadeRecord& r) {
  json j{{"norad", r.norad_id},
         {"epoch", r.epoch},
         {"source", to_string(r.source)},
         {"rule_label", to_string(r.rule_label)}};
  j["imm_label"] = r.imm_label ? json(to_string(*r.imm_label)) : json(nullptr);
  if (r.mu) {
    j["mu"] = json::array({(*r.mu)(0), (*r.mu)(1), (*r.mu)(2)});
  } else {
    j["mu"] = nullptr;
  }
  j["innovation_score"] = r.innovation_score ? json(*r.innovation_score) : json(nullptr);
  return j;
}

std::string derive_stats_path(const std::string& explicit_path, const std::string& out) {
  if (!explicit_path.empty()) return explicit_path;
  if (!out.empty()) return out + ".stats.json";
  return "norm_stats.json";
}

void write_u32(std::ostream& o, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  o.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

int cmd_parse(const CommonOpts& o, const std::string& archive, const std::string& out,
              const std::string& source_tag) {
  const Source tag = source_from_string(source_tag, "--source");
  const Archive arch = read_bulk_archive(archive, tag);
  OutStream os(out);
  for (const auto& sat : arch.satellites)
    for (const auto& r : sat.records) os.get() << record_json(r).dump() << "\n";
  std::cerr << "parse: entries=" << arch.stats.total_entries << " parsed=" << arch.stats.parsed
            << " skipped=" << arch.stats.skipped
            << " deduplicated=" << arch.stats.deduplicated
            << " satellites=" << arch.satellites.size() << "\n";
  return 0;
}

int cmd_features(const CommonOpts& o, const std::string& archive, const std::string& out,
                 const std::string& stats_out) {
  const Archive arch = load_inputs(archive, "");
  const std::size_t n = arch.satellites.size();
  std::vector<SatSlot> slots(n);
  std::vector<RunningStats> stats(n);
  parallel_over(n, o.jobs, [&](std::size_t i) {
    const auto& sat = arch.satellites[i];
    try {
      const auto rows = extract_feature_sequence(sat.records, o.cfg.features);
      std::ostringstream lines;
      for (const auto& row : rows) {
        json j{{"norad", sat.norad_id}};
        j["features"] = row.v;
        lines << j.dump() << "\n";
        stats[i].add(row);
      }
      slots[i].text = lines.str();
    } catch (const Error& e) {
      slots[i].error = e.what();
    }
  });

  RunningStats merged;
  for (const auto& s : stats) merged.merge(s);
  const NormStats norm = merged.finalize();
  const std::string stats_path = derive_stats_path(stats_out, out);
  save_norm_stats(stats_path, norm);

  OutStream os(out);
  const int rc = finish_slots(slots, arch, os.get());
  std::cerr << "features: satellites=" << n << " rows=" << merged.count
            << " stats=" << stats_path << " digest=" << norm_stats_digest(norm) << "\n";
  return rc;
}

int cmd_windows(const CommonOpts& o, const std::string& archive, const std::string& out,
                const std::string& stats_out, const std::vector<std::string>& label_tiers) {
  for (const auto& tier : label_tiers)
    if (tier != "rule" && tier != "imm")
      raise(ErrorCode::ConfigParse, "--labels accepts 'rule' and 'imm', got '" + tier + "'");

  const Archive arch = load_inputs(archive, "");
  const std::size_t n = arch.satellites.size();
  std::vector<SatSlot> slots(n);
  std::vector<RunningStats> stats(n);
  std::vector<std::vector<Window>> windows(n);

  const bool want_rule =
      std::find(label_tiers.begin(), label_tiers.end(), "rule") != label_tiers.end();
  const bool want_imm =
      std::find(label_tiers.begin(), label_tiers.end(), "imm") != label_tiers.end();
  CascadeConfigs ccfg = o.cfg.cascade_configs();

  parallel_over(n, o.jobs, [&](std::size_t i) {
    const auto& sat = arch.satellites[i];
    try {
      const auto rows = extract_feature_sequence(sat.records, o.cfg.features);
      for (const auto& row : rows) stats[i].add(row);
      windows[i] = make_windows(rows, sat.norad_id, o.cfg.window);
      if (windows[i].empty()) return;
      if (want_rule)
        attach_labels(windows[i], "rule", rule_label_sequence(sat.records, o.cfg.rules));
      if (want_imm) {
        CascadeTiers tiers;
        tiers.imm = true;
        tiers.innovation = false;
        const CascadeResult res = run_cascade(sat.records, ccfg, tiers);
        if (res.filter_degraded) slots[i].error = res.warning;
        std::vector<Label> labels;
        labels.reserve(res.records.size());
        for (const auto& r : res.records) labels.push_back(r.imm_label.value_or(Label::NORMAL));
        attach_labels(windows[i], "imm", labels);
      }
    } catch (const Error& e) {
      windows[i].clear();
      slots[i].error = e.what();
    }
  });

  RunningStats merged;
  for (const auto& s : stats) merged.merge(s);
  const NormStats norm = merged.finalize();
  const std::string stats_path = derive_stats_path(stats_out, out);
  save_norm_stats(stats_path, norm);

  std::vector<Window> all;
  for (auto& w : windows) all.insert(all.end(), w.begin(), w.end());
  write_dataset(out, all, o.cfg.split.seed, norm_stats_digest(norm));

  const auto splits = assign_splits(all, o.cfg.split.seed, o.cfg.split.fractions);
  std::size_t per_split[3] = {0, 0, 0};
  for (const Split s : splits) ++per_split[static_cast<std::size_t>(s)];

  OutStream devnull("");
  const int rc = finish_slots(slots, arch, devnull.get());
  std::cerr << "windows: satellites=" << n << " windows=" << all.size()
            << " train=" << per_split[0] << " val=" << per_split[1] << " test=" << per_split[2]
            << " dataset=" << out << " stats=" << stats_path
            << " digest=" << norm_stats_digest(norm) << "\n";
  return rc;
}

int cmd_label_rule(const CommonOpts& o, const std::string& archive, const std::string& out,
                   const std::string& labels_out) {
  const Archive arch = load_inputs(archive, "");
  OutStream os(out);
  std::ofstream bin;
  if (!labels_out.empty()) {
    bin.open(labels_out, std::ios::binary);
    if (!bin) raise(ErrorCode::Io, "cannot open output file '" + labels_out + "'");
  }
  for (const auto& sat : arch.satellites) {
    const auto labels = rule_label_sequence(sat.records, o.cfg.rules);
    for (std::size_t k = 1; k < sat.records.size(); ++k) {
      const RuleVerdict v = rule_label_ex(sat.records[k - 1], sat.records[k], o.cfg.rules);
      if (v.label == Label::NORMAL) continue;
      os.get() << json{{"norad", sat.norad_id},
                       {"epoch", sat.records[k].epoch},
                       {"rule", v.rule_index},
                       {"label", to_string(v.label)}}
                      .dump()
               << "\n";
    }
    if (bin.is_open()) {
      write_u32(bin, static_cast<std::uint32_t>(sat.norad_id));
      write_u32(bin, static_cast<std::uint32_t>(labels.size()));
      for (const Label l : labels) bin.put(static_cast<char>(static_cast<std::uint8_t>(l)));
    }
  }
  std::cerr << "label-rule: satellites=" << arch.satellites.size() << "\n";
  return 0;
}

int cmd_label_imm(const CommonOpts& o, const std::string& archive, const std::string& supgp,
                  const std::string& out) {
  const Archive arch = load_inputs(archive, supgp);
  const std::size_t n = arch.satellites.size();
  std::vector<SatSlot> slots(n);
  parallel_over(n, o.jobs, [&](std::size_t i) {
    const auto& sat = arch.satellites[i];
    std::ostringstream lines;
    try {
      ImmState state = init_state(sat.records[0], o.cfg.imm, o.cfg.obs_noise, o.cfg.force);
      auto emit = [&](const TleRecord& r, const Eigen::Vector3d& mu, const json& ll) {
        json j{{"norad", sat.norad_id},
               {"epoch", r.epoch},
               {"mu", json::array({mu(0), mu(1), mu(2)})},
               {"label", to_string(assign_label(mu, o.cfg.imm.label_threshold))},
               {"source", to_string(r.source)}};
        j["log_likelihood"] = ll;
        lines << j.dump() << "\n";
      };
      emit(sat.records[0], state.mu, nullptr);
      for (std::size_t k = 1; k < sat.records.size(); ++k) {
        const ImmStepResult res = imm_step(state, sat.records[k], o.cfg.imm, o.cfg.ukf,
                                           o.cfg.modes, o.cfg.obs_noise, o.cfg.force);
        emit(sat.records[k], state.mu,
             json::array({number_or_null(res.log_likelihood(0)),
                          number_or_null(res.log_likelihood(1)),
                          number_or_null(res.log_likelihood(2))}));
      }
    } catch (const Error& e) {
      slots[i].error = e.what();
    }
    slots[i].text = lines.str();
  });
  OutStream os(out);
  const int rc = finish_slots(slots, arch, os.get());
  std::cerr << "label-imm: satellites=" << n << "\n";
  return rc;
}

int cmd_cascade(const CommonOpts& o, const std::string& archive, const std::string& supgp,
                const std::string& out, bool no_imm, bool no_innovation) {
  const Archive arch = load_inputs(archive, supgp);
  const std::size_t n = arch.satellites.size();
  CascadeConfigs ccfg = o.cfg.cascade_configs();
  CascadeTiers tiers;
  tiers.imm = !no_imm;
  tiers.innovation = !no_innovation;

  std::vector<SatSlot> slots(n);
  std::vector<TierStats> stats(n);
  std::vector<std::string> warnings(n);
  parallel_over(n, o.jobs, [&](std::size_t i) {
    const auto& sat = arch.satellites[i];
    try {
      const CascadeResult res = run_cascade(sat.records, ccfg, tiers);
      std::ostringstream lines;
      for (const auto& r : res.records) lines << cascade_record_json(r).dump() << "\n";
      slots[i].text = lines.str();
      stats[i] = tier_stats(res.records);
      if (res.filter_degraded) warnings[i] = res.warning;
    } catch (const Error& e) {
      slots[i].error = e.what();
    }
  });

  OutStream os(out);
  const int rc = finish_slots(slots, arch, os.get());
  for (std::size_t i = 0; i < n; ++i)
    if (!warnings[i].empty())
      std::cerr << "satellite " << arch.satellites[i].norad_id
                << ": filter degraded: " << warnings[i] << "\n";

  TierStats total;
  for (const auto& s : stats) total.merge(s);
  std::cout << json{{"tier_stats", tier_stats_json(total)}}.dump() << "\n";
  return rc;
}

int cmd_stats(const std::string& jsonl_path) {
  std::ifstream in(jsonl_path);
  if (!in) raise(ErrorCode::Io, "cannot open '" + jsonl_path + "'");
  std::vector<CascadeRecord> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      raise(ErrorCode::FieldParse,
            jsonl_path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (j.contains("tier_stats")) continue;  // summary block from a previous run
    const std::string ctx = jsonl_path + ":" + std::to_string(lineno);
    CascadeRecord r;
    r.norad_id = j.at("norad").get<int>();
    r.epoch = j.at("epoch").get<double>();
    r.source = source_from_string(j.at("source").get<std::string>(), ctx);
    r.rule_label = label_from_string(j.at("rule_label").get<std::string>(), ctx);
    if (j.contains("imm_label") && !j.at("imm_label").is_null())
      r.imm_label = label_from_string(j.at("imm_label").get<std::string>(), ctx);
    if (j.contains("mu") && !j.at("mu").is_null()) {
      const auto m = j.at("mu");
      r.mu = Eigen::Vector3d(m.at(0).get<double>(), m.at(1).get<double>(),
                             m.at(2).get<double>());
    }
    if (j.contains("innovation_score") && !j.at("innovation_score").is_null())
      r.innovation_score = j.at("innovation_score").get<double>();
    records.push_back(std::move(r));
  }
  const TierStats total = tier_stats(records);
  std::cout << json{{"tier_stats", tier_stats_json(total)}}.dump() << "\n";
  std::cerr << "stats: records=" << records.size() << "\n";
  return 0;
}

int cmd_synth(const CommonOpts& o, const std::string& scenario_path, const std::string& out,
              const std::string& supgp_out, const std::string& truth_out) {
  const Scenario sc = load_scenario(scenario_path);
  const SynthResult res = generate(sc, o.cfg.force);

  OutStream os(out);
  std::ofstream supgp_file;
  if (!supgp_out.empty()) {
    supgp_file.open(supgp_out, std::ios::binary);
    if (!supgp_file) raise(ErrorCode::Io, "cannot open output file '" + supgp_out + "'");
  }
  std::size_t supgp_count = 0;
  for (const auto& r : res.records) {
    const auto [l1, l2] = format_tle_lines(r);
    if (r.source == Source::SUPGP && supgp_file.is_open()) {
      supgp_file << l1 << "\n" << l2 << "\n";
      ++supgp_count;
    } else {
      os.get() << l1 << "\n" << l2 << "\n";
    }
  }

  if (!truth_out.empty()) {
    std::ofstream tf(truth_out, std::ios::binary);
    if (!tf) raise(ErrorCode::Io, "cannot open output file '" + truth_out + "'");
    for (std::size_t i = 0; i < res.records.size(); ++i)
      tf << json{{"index", i},
                 {"epoch", res.records[i].epoch},
                 {"label", to_string(res.truth[i])}}
                .dump()
         << "\n";
  }

  std::size_t nonnormal = 0;
  for (const Label l : res.truth)
    if (l != Label::NORMAL) ++nonnormal;
  std::cerr << "synth: records=" << res.records.size() << " supgp=" << supgp_count
            << " nonnormal_truth=" << nonnormal
            << " reentered=" << (res.reentered ? "true" : "false") << "\n";
  return 0;
}

}  // namespace tlecascade::cli
