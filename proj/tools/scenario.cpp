#include "scenario.hpp"

#include <string>

#include "ini.hpp"
#include "tlecascade/error.hpp"

namespace tlecascade::cli {

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  raise(ErrorCode::ConfigParse, origin + ":" + std::to_string(line) + ": " + what);
}

SynthEvent parse_event(const IniSection& s, const std::string& origin) {
  SynthEvent ev;
  std::string kind;
  bool have_at = false;
  bool have_dv = false;
  bool have_mult = false;
  for (const auto& e : s.entries) {
    if (e.key == "kind") kind = e.value;
    else if (e.key == "at_h") { ev.at_hours = ini_double(e, origin); have_at = true; }
    else if (e.key == "dv_radial_mps") { ev.dv_ric_mps[0] = ini_double(e, origin); have_dv = true; }
    else if (e.key == "dv_intrack_mps") { ev.dv_ric_mps[1] = ini_double(e, origin); have_dv = true; }
    else if (e.key == "dv_cross_mps") { ev.dv_ric_mps[2] = ini_double(e, origin); have_dv = true; }
    else if (e.key == "multiplier") { ev.drag_multiplier = ini_double(e, origin); have_mult = true; }
    else fail(origin, e.line, "unknown key '" + e.key + "' in [event]");
  }
  if (kind == "impulse") {
    ev.kind = SynthEvent::Kind::IMPULSE;
    if (have_mult) fail(origin, s.line, "[event] kind=impulse does not take 'multiplier'");
  } else if (kind == "drag_scale") {
    ev.kind = SynthEvent::Kind::DRAG_SCALE;
    if (have_dv) fail(origin, s.line, "[event] kind=drag_scale does not take dv keys");
    if (!have_mult) fail(origin, s.line, "[event] kind=drag_scale requires 'multiplier'");
    if (ev.drag_multiplier <= 0) fail(origin, s.line, "[event] multiplier must be > 0");
  } else {
    fail(origin, s.line, "[event] requires kind = impulse | drag_scale");
  }
  if (!have_at) fail(origin, s.line, "[event] requires 'at_h'");
  return ev;
}

}  // namespace

Scenario load_scenario(const std::string& path) {
  const IniDocument doc = read_ini_file(path);
  Scenario sc;
  sc.schedule_dt_h.clear();
  bool saw_scenario = false;
  for (const auto& s : doc.sections) {
    if (s.name == "event") {
      sc.events.push_back(parse_event(s, path));
      continue;
    }
    if (s.name != "scenario") fail(path, s.line, "unknown section [" + s.name + "]");
    if (saw_scenario) fail(path, s.line, "duplicate section [scenario]");
    saw_scenario = true;
    double cadence_h = 0.0;
    long long count = 0;
    for (const auto& e : s.entries) {
      if (e.key == "norad_id") sc.norad_id = static_cast<int>(ini_int(e, path));
      else if (e.key == "epoch_unix") sc.epoch0 = ini_double(e, path);
      else if (e.key == "mean_motion") sc.mean_motion = ini_double(e, path);
      else if (e.key == "eccentricity") sc.eccentricity = ini_double(e, path);
      else if (e.key == "inclination_deg") sc.inclination_deg = ini_double(e, path);
      else if (e.key == "raan_deg") sc.raan_deg = ini_double(e, path);
      else if (e.key == "argp_deg") sc.argp_deg = ini_double(e, path);
      else if (e.key == "mean_anomaly_deg") sc.mean_anomaly_deg = ini_double(e, path);
      else if (e.key == "bstar") sc.bstar = ini_double(e, path);
      else if (e.key == "n_dot") sc.n_dot = ini_double(e, path);
      else if (e.key == "cadence_h") cadence_h = ini_double(e, path);
      else if (e.key == "count") count = ini_int(e, path);
      else if (e.key == "dts_h") sc.schedule_dt_h = ini_doubles(e, path);
      else if (e.key == "tle_pos_sigma_m") sc.tle_noise.pos_sigma_m = ini_double(e, path);
      else if (e.key == "tle_vel_sigma_mps") sc.tle_noise.vel_sigma_mps = ini_double(e, path);
      else if (e.key == "supgp_pos_sigma_m") sc.supgp_noise.pos_sigma_m = ini_double(e, path);
      else if (e.key == "supgp_vel_sigma_mps") sc.supgp_noise.vel_sigma_mps = ini_double(e, path);
      else if (e.key == "supgp_stride") sc.supgp_stride = static_cast<int>(ini_int(e, path));
      else if (e.key == "seed") sc.seed = static_cast<std::uint64_t>(ini_int(e, path));
      else fail(path, e.line, "unknown key '" + e.key + "' in [scenario]");
    }
    if (!sc.schedule_dt_h.empty() && (cadence_h > 0 || count > 0))
      fail(path, s.line, "[scenario] give either dts_h or cadence_h+count, not both");
    if (sc.schedule_dt_h.empty()) {
      if (cadence_h <= 0 || count < 2)
        fail(path, s.line, "[scenario] requires cadence_h > 0 and count >= 2 (or dts_h)");
      // count observations = count - 1 gaps after the epoch record
      sc.schedule_dt_h.assign(static_cast<std::size_t>(count - 1), cadence_h);
    }
  }
  if (!saw_scenario) fail(path, 1, "missing [scenario] section");
  return sc;
}

}  // namespace tlecascade::cli
