#include "pipeline_config.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include "ini.hpp"
#include "tlecascade/error.hpp"

namespace tlecascade::cli {

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  raise(ErrorCode::ConfigParse, origin + ":" + std::to_string(line) + ": " + what);
}

/// Marks entries as consumed; whatever is left at the end is an unknown key.
class SectionReader {
 public:
  SectionReader(const IniSection& s, const std::string& origin) : s_(s), origin_(origin) {
    used_.assign(s.entries.size(), false);
  }

  const IniEntry* find(const std::string& key) {
    const IniEntry* hit = nullptr;
    for (std::size_t i = 0; i < s_.entries.size(); ++i) {
      if (s_.entries[i].key != key) continue;
      if (hit) fail(origin_, s_.entries[i].line, "duplicate key '" + key + "'");
      hit = &s_.entries[i];
      used_[i] = true;
    }
    return hit;
  }

  void get(const std::string& key, double& out) {
    if (const auto* e = find(key)) out = ini_double(*e, origin_);
  }
  void get(const std::string& key, bool& out) {
    if (const auto* e = find(key)) out = ini_bool(*e, origin_);
  }
  void get(const std::string& key, int& out) {
    if (const auto* e = find(key)) out = static_cast<int>(ini_int(*e, origin_));
  }
  void get(const std::string& key, std::uint64_t& out) {
    if (const auto* e = find(key)) out = static_cast<std::uint64_t>(ini_int(*e, origin_));
  }
  void get(const std::string& key, std::string& out) {
    if (const auto* e = find(key)) out = e->value;
  }
  void get_vec3(const std::string& key, Eigen::Vector3d& out) {
    if (const auto* e = find(key)) {
      const auto v = ini_doubles(*e, origin_);
      if (v.size() != 3) fail(origin_, e->line, "key '" + key + "': expected 3 numbers");
      out = Eigen::Vector3d(v[0], v[1], v[2]);
    }
  }

  void finish() const {
    for (std::size_t i = 0; i < s_.entries.size(); ++i)
      if (!used_[i])
        fail(origin_, s_.entries[i].line,
             "unknown key '" + s_.entries[i].key + "' in [" + s_.name + "]");
  }

  const IniSection& section() const { return s_; }

 private:
  const IniSection& s_;
  std::string origin_;
  std::vector<bool> used_;
};

void apply_force(SectionReader& r, ForceConfig& f) {
  r.get("mu", f.mu);
  r.get("re_equatorial_m", f.re_equatorial_m);
  r.get("j2", f.j2);
  r.get("enable_j2", f.enable_j2);
  r.get("enable_drag", f.enable_drag);
  r.get("bstar_to_ballistic", f.bstar_to_ballistic);
  r.finish();
}

void apply_atmosphere(const IniSection& s, const std::string& origin, ForceConfig& f) {
  std::vector<AtmosphereBand> bands;
  for (const auto& e : s.entries) {
    if (e.key != "band")
      fail(origin, e.line, "unknown key '" + e.key + "' in [atmosphere] (only 'band')");
    const auto v = ini_doubles(e, origin);
    if (v.size() != 3)
      fail(origin, e.line, "band: expected 'h0_km rho0_kg_m3 scale_height_km'");
    if (v[1] <= 0 || v[2] <= 0) fail(origin, e.line, "band: density and scale height must be > 0");
    bands.push_back({v[0], v[1], v[2]});
  }
  if (bands.empty()) fail(origin, s.line, "[atmosphere] present but has no 'band' entries");
  for (std::size_t i = 1; i < bands.size(); ++i)
    if (bands[i].h0_km <= bands[i - 1].h0_km)
      fail(origin, s.line, "[atmosphere] bands must be in ascending h0_km order");
  f.atmosphere = std::move(bands);
}

void apply_rules(SectionReader& r, RuleThresholds& t) {
  r.get("h_reentry_km", t.h_reentry_km);
  r.get("h_low_km", t.h_low_km);
  r.get("dh_decay_km", t.dh_decay_km);
  r.get("dh_maneuver_km", t.dh_man_km);
  r.get("di_maneuver_deg", t.di_man_deg);
  r.get("de_maneuver", t.de_man);
  r.get("bstar_floor", t.bstar_floor);
  r.get("bstar_ratio", t.bstar_ratio);
  r.finish();
}

void apply_ukf(SectionReader& r, UkfConfig& u) {
  r.get("alpha", u.alpha);
  r.get("beta", u.beta);
  r.get("kappa", u.kappa);
  r.finish();
}

void apply_modes(SectionReader& r, std::array<ModeConfig, kModeCount>& m) {
  r.get("m0_sigma_pos_m", m[0].sigma_pos_m);
  r.get("m0_sigma_vel_mps", m[0].sigma_vel_mps);
  r.get("m1_sigma_pos_m", m[1].sigma_pos_m);
  r.get("m1_sigma_vel_mps", m[1].sigma_vel_mps);
  r.get("m2_sigma_pos_m", m[2].sigma_pos_m);
  r.get("m2_sigma_vel_mps", m[2].sigma_vel_mps);
  r.finish();
}

void apply_obs_noise(SectionReader& r, ObsNoise& n) {
  r.get("tle_pos_sigma_m", n.tle_pos_sigma_m);
  r.get("tle_vel_sigma_mps", n.tle_vel_sigma_mps);
  r.get("supgp_pos_sigma_m", n.supgp_pos_sigma_m);
  r.get("supgp_vel_sigma_mps", n.supgp_vel_sigma_mps);
  r.finish();
}

void apply_imm(SectionReader& r, ImmConfig& c, const std::string& origin) {
  for (int row = 0; row < 3; ++row) {
    const std::string key = "transition_row" + std::to_string(row);
    if (const auto* e = r.find(key)) {
      const auto v = ini_doubles(*e, origin);
      if (v.size() != 3) fail(origin, e->line, "key '" + key + "': expected 3 numbers");
      for (int col = 0; col < 3; ++col) c.base_transition(row, col) = v[col];
    }
  }
  r.get("label_threshold", c.label_threshold);
  r.get("q_scale_min", c.q_scale_min);
  r.get("q_scale_max", c.q_scale_max);
  r.get_vec3("prior_high", c.prior_high);
  r.get_vec3("prior_low", c.prior_low);
  r.get("prior_h_high_km", c.prior_h_high_km);
  r.get("prior_h_low_km", c.prior_h_low_km);
  r.get("t02_boost", c.t02_boost);
  r.get("t02_ramp_start_km", c.t02_ramp_start_km);
  r.get("t02_ramp_span_km", c.t02_ramp_span_km);
  r.get("init_cov_inflation", c.init_cov_inflation);
  r.get("predict_max_step_s", c.predict_max_step_s);
  r.finish();
}

void apply_features(SectionReader& r, ClipBounds& b) {
  r.get("bstar_clip_abs", b.bstar_abs);
  r.get("dt_hours_max", b.dt_hours_max);
  r.finish();
}

void apply_window(SectionReader& r, WindowParams& w, const std::string& origin) {
  r.get("length", w.T);
  r.get("stride", w.stride);
  if (w.T < 1 || w.stride < 1)
    fail(origin, r.section().line, "[window] length and stride must be >= 1");
  r.finish();
}

void apply_split(SectionReader& r, SplitConfig& s, const std::string& origin) {
  r.get("seed", s.seed);
  r.get("train_fraction", s.fractions.train);
  r.get("val_fraction", s.fractions.val);
  if (s.fractions.train < 0 || s.fractions.val < 0 ||
      s.fractions.train + s.fractions.val > 1.0)
    fail(origin, r.section().line, "[split] fractions must be >= 0 and sum to <= 1");
  r.finish();
}

void apply_io(SectionReader& r, IoConfig& io) {
  r.get("out", io.out);
  r.get("stats_out", io.stats_out);
  r.finish();
}

std::string fmt(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string fmt(bool v) { return v ? "true" : "false"; }

}  // namespace

PipelineConfig apply_pipeline_ini(const IniDocument& doc, const std::string& origin) {
  PipelineConfig cfg;
  std::set<std::string> seen;
  for (const auto& s : doc.sections) {
    if (!seen.insert(s.name).second)
      fail(origin, s.line, "duplicate section [" + s.name + "]");
    SectionReader r(s, origin);
    if (s.name == "force") apply_force(r, cfg.force);
    else if (s.name == "atmosphere") apply_atmosphere(s, origin, cfg.force);
    else if (s.name == "rules") apply_rules(r, cfg.rules);
    else if (s.name == "ukf") apply_ukf(r, cfg.ukf);
    else if (s.name == "modes") apply_modes(r, cfg.modes);
    else if (s.name == "obs_noise") apply_obs_noise(r, cfg.obs_noise);
    else if (s.name == "imm") apply_imm(r, cfg.imm, origin);
    else if (s.name == "features") apply_features(r, cfg.features);
    else if (s.name == "window") apply_window(r, cfg.window, origin);
    else if (s.name == "split") apply_split(r, cfg.split, origin);
    else if (s.name == "io") apply_io(r, cfg.io);
    else fail(origin, s.line, "unknown section [" + s.name + "]");
  }
  return cfg;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  if (path.empty()) return {};
  return apply_pipeline_ini(read_ini_file(path), path);
}

std::string resolved_ini(const PipelineConfig& cfg) {
  std::ostringstream o;
  o << "[force]\n"
    << "mu = " << fmt(cfg.force.mu) << "\n"
    << "re_equatorial_m = " << fmt(cfg.force.re_equatorial_m) << "\n"
    << "j2 = " << fmt(cfg.force.j2) << "\n"
    << "enable_j2 = " << fmt(cfg.force.enable_j2) << "\n"
    << "enable_drag = " << fmt(cfg.force.enable_drag) << "\n"
    << "bstar_to_ballistic = " << fmt(cfg.force.bstar_to_ballistic) << "\n";
  o << "\n[atmosphere]\n";
  for (const auto& b : cfg.force.atmosphere)
    o << "band = " << fmt(b.h0_km) << " " << fmt(b.rho0) << " " << fmt(b.scale_height_km)
      << "\n";
  o << "\n[rules]\n"
    << "h_reentry_km = " << fmt(cfg.rules.h_reentry_km) << "\n"
    << "h_low_km = " << fmt(cfg.rules.h_low_km) << "\n"
    << "dh_decay_km = " << fmt(cfg.rules.dh_decay_km) << "\n"
    << "dh_maneuver_km = " << fmt(cfg.rules.dh_man_km) << "\n"
    << "di_maneuver_deg = " << fmt(cfg.rules.di_man_deg) << "\n"
    << "de_maneuver = " << fmt(cfg.rules.de_man) << "\n"
    << "bstar_floor = " << fmt(cfg.rules.bstar_floor) << "\n"
    << "bstar_ratio = " << fmt(cfg.rules.bstar_ratio) << "\n";
  o << "\n[ukf]\n"
    << "alpha = " << fmt(cfg.ukf.alpha) << "\n"
    << "beta = " << fmt(cfg.ukf.beta) << "\n"
    << "kappa = " << fmt(cfg.ukf.kappa) << "\n";
  o << "\n[modes]\n";
  for (int i = 0; i < kModeCount; ++i)
    o << "m" << i << "_sigma_pos_m = " << fmt(cfg.modes[i].sigma_pos_m) << "\n"
      << "m" << i << "_sigma_vel_mps = " << fmt(cfg.modes[i].sigma_vel_mps) << "\n";
  o << "\n[obs_noise]\n"
    << "tle_pos_sigma_m = " << fmt(cfg.obs_noise.tle_pos_sigma_m) << "\n"
    << "tle_vel_sigma_mps = " << fmt(cfg.obs_noise.tle_vel_sigma_mps) << "\n"
    << "supgp_pos_sigma_m = " << fmt(cfg.obs_noise.supgp_pos_sigma_m) << "\n"
    << "supgp_vel_sigma_mps = " << fmt(cfg.obs_noise.supgp_vel_sigma_mps) << "\n";
  o << "\n[imm]\n";
  for (int row = 0; row < 3; ++row) {
    o << "transition_row" << row << " =";
    for (int col = 0; col < 3; ++col) o << " " << fmt(cfg.imm.base_transition(row, col));
    o << "\n";
  }
  o << "label_threshold = " << fmt(cfg.imm.label_threshold) << "\n"
    << "q_scale_min = " << fmt(cfg.imm.q_scale_min) << "\n"
    << "q_scale_max = " << fmt(cfg.imm.q_scale_max) << "\n"
    << "prior_high = " << fmt(cfg.imm.prior_high.x()) << " " << fmt(cfg.imm.prior_high.y())
    << " " << fmt(cfg.imm.prior_high.z()) << "\n"
    << "prior_low = " << fmt(cfg.imm.prior_low.x()) << " " << fmt(cfg.imm.prior_low.y()) << " "
    << fmt(cfg.imm.prior_low.z()) << "\n"
    << "prior_h_high_km = " << fmt(cfg.imm.prior_h_high_km) << "\n"
    << "prior_h_low_km = " << fmt(cfg.imm.prior_h_low_km) << "\n"
    << "t02_boost = " << fmt(cfg.imm.t02_boost) << "\n"
    << "t02_ramp_start_km = " << fmt(cfg.imm.t02_ramp_start_km) << "\n"
    << "t02_ramp_span_km = " << fmt(cfg.imm.t02_ramp_span_km) << "\n"
    << "init_cov_inflation = " << fmt(cfg.imm.init_cov_inflation) << "\n"
    << "predict_max_step_s = " << fmt(cfg.imm.predict_max_step_s) << "\n";
  o << "\n[features]\n"
    << "bstar_clip_abs = " << fmt(cfg.features.bstar_abs) << "\n"
    << "dt_hours_max = " << fmt(cfg.features.dt_hours_max) << "\n";
  o << "\n[window]\n"
    << "length = " << cfg.window.T << "\n"
    << "stride = " << cfg.window.stride << "\n";
  o << "\n[split]\n"
    << "seed = " << cfg.split.seed << "\n"
    << "train_fraction = " << fmt(cfg.split.fractions.train) << "\n"
    << "val_fraction = " << fmt(cfg.split.fractions.val) << "\n";
  o << "\n[io]\n"
    << "out = " << cfg.io.out << "\n"
    << "stats_out = " << cfg.io.stats_out << "\n";
  return o.str();
}

}  // namespace tlecascade::cli
