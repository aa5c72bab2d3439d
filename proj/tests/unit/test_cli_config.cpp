#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>

#include "ini.hpp"
#include "pipeline_config.hpp"
#include "scenario.hpp"
#include "tlecascade/error.hpp"

using namespace tlecascade;
using namespace tlecascade::cli;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::Io;
}

std::string error_text(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  FAIL("expected an Error");
  return {};
}

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& text) {
    static std::mt19937_64 rng(std::random_device{}());
    path = std::filesystem::temp_directory_path() /
           ("cfg-" + std::to_string(rng()) + ".ini");
    std::ofstream out(path);
    out << text;
  }
  ~TempFile() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("ini parsing keeps section and entry order with line numbers") {
  const std::string text =
      "# leading comment\n"
      "[alpha]\n"
      "x = 1\n"
      "y = two words   ; trailing comment\n"
      "\n"
      "[beta]\n"
      "x = 3\n"
      "[alpha]\n"
      "z = 4\n";
  const IniDocument doc = parse_ini(text, "mem");
  REQUIRE(doc.sections.size() == 3);
  CHECK(doc.sections[0].name == "alpha");
  CHECK(doc.sections[0].line == 2);
  REQUIRE(doc.sections[0].entries.size() == 2);
  CHECK(doc.sections[0].entries[0].key == "x");
  CHECK(doc.sections[0].entries[0].value == "1");
  CHECK(doc.sections[0].entries[1].key == "y");
  CHECK(doc.sections[0].entries[1].value == "two words");
  CHECK(doc.sections[0].entries[1].line == 4);
  CHECK(doc.sections[1].name == "beta");
  CHECK(doc.sections[2].name == "alpha");  // repeated section names stay separate
  REQUIRE(doc.sections[2].entries.size() == 1);
  CHECK(doc.sections[2].entries[0].key == "z");
}

TEST_CASE("ini parsing rejects malformed structure with file:line context") {
  CHECK(code_of([] { parse_ini("x = 1\n", "top"); }) == ErrorCode::ConfigParse);
  CHECK(code_of([] { parse_ini("[open\n", "top"); }) == ErrorCode::ConfigParse);
  CHECK(code_of([] { parse_ini("[s]\nnovalue\n", "top"); }) == ErrorCode::ConfigParse);
  CHECK(code_of([] { parse_ini("[s]\n= 1\n", "top"); }) == ErrorCode::ConfigParse);

  const std::string msg = error_text([] { parse_ini("[s]\nbad line\n", "origin.ini"); });
  CHECK(msg.find("origin.ini:2") != std::string::npos);
}

TEST_CASE("typed readers parse and reject per value") {
  const auto entry = [](const std::string& v) { return IniEntry{"k", v, 7}; };
  CHECK(ini_double(entry("1.5e-3"), "t") == doctest::Approx(1.5e-3).epsilon(1e-15));
  CHECK(ini_double(entry("-4"), "t") == doctest::Approx(-4.0));
  CHECK(ini_int(entry("42"), "t") == 42);
  CHECK(ini_int(entry("-7"), "t") == -7);
  CHECK(ini_bool(entry("true"), "t"));
  CHECK(ini_bool(entry("yes"), "t"));
  CHECK(ini_bool(entry("1"), "t"));
  CHECK(!ini_bool(entry("false"), "t"));
  CHECK(!ini_bool(entry("no"), "t"));
  CHECK(!ini_bool(entry("0"), "t"));
  const auto ds = ini_doubles(entry("8 4.5 12"), "t");
  REQUIRE(ds.size() == 3);
  CHECK(ds[1] == doctest::Approx(4.5));

  CHECK(code_of([&] { ini_double(entry("abc"), "t"); }) == ErrorCode::ConfigParse);
  CHECK(code_of([&] { ini_double(entry("1.5x"), "t"); }) == ErrorCode::ConfigParse);
  CHECK(code_of([&] { ini_int(entry("1.5"), "t"); }) == ErrorCode::ConfigParse);
  CHECK(code_of([&] { ini_bool(entry("maybe"), "t"); }) == ErrorCode::ConfigParse);
  CHECK(code_of([&] { ini_doubles(entry(""), "t"); }) == ErrorCode::ConfigParse);
}

TEST_CASE("read_ini_file reports missing files as Io") {
  CHECK(code_of([] { read_ini_file("/nonexistent/x.ini"); }) == ErrorCode::Io);
}

TEST_CASE("scenario files load with ordered events") {
  TempFile f(
      "[scenario]\n"
      "norad_id = 90017\n"
      "mean_motion = 15.05\n"
      "eccentricity = 0.002\n"
      "inclination_deg = 97.6\n"
      "bstar = 2e-6\n"
      "cadence_h = 8\n"
      "count = 60\n"
      "tle_pos_sigma_m = 800\n"
      "supgp_stride = 4\n"
      "seed = 12\n"
      "\n"
      "[event]\n"
      "kind = impulse\n"
      "at_h = 200\n"
      "dv_intrack_mps = 1.0\n"
      "\n"
      "[event]\n"
      "kind = drag_scale\n"
      "at_h = 300\n"
      "multiplier = 5\n");
  const Scenario sc = load_scenario(f.path.string());
  CHECK(sc.norad_id == 90017);
  CHECK(sc.mean_motion == doctest::Approx(15.05));
  CHECK(sc.eccentricity == doctest::Approx(0.002));
  CHECK(sc.inclination_deg == doctest::Approx(97.6));
  CHECK(sc.bstar == doctest::Approx(2e-6));
  CHECK(sc.tle_noise.pos_sigma_m == doctest::Approx(800.0));
  CHECK(sc.supgp_stride == 4);
  CHECK(sc.seed == 12);
  REQUIRE(sc.schedule_dt_h.size() == 59);  // count observations = count-1 gaps
  for (double dt : sc.schedule_dt_h) CHECK(dt == doctest::Approx(8.0));
  REQUIRE(sc.events.size() == 2);
  CHECK(sc.events[0].kind == SynthEvent::Kind::IMPULSE);
  CHECK(sc.events[0].at_hours == doctest::Approx(200.0));
  CHECK(sc.events[0].dv_ric_mps(1) == doctest::Approx(1.0));
  CHECK(sc.events[1].kind == SynthEvent::Kind::DRAG_SCALE);
  CHECK(sc.events[1].drag_multiplier == doctest::Approx(5.0));
}

TEST_CASE("scenario files accept an explicit gap list") {
  TempFile f(
      "[scenario]\n"
      "mean_motion = 15.1\n"
      "dts_h = 8 8 4 12\n");
  const Scenario sc = load_scenario(f.path.string());
  REQUIRE(sc.schedule_dt_h.size() == 4);
  CHECK(sc.schedule_dt_h[2] == doctest::Approx(4.0));
}

TEST_CASE("scenario validation is strict") {
  const auto rejects = [](const std::string& text) {
    TempFile f(text);
    return code_of([&] { load_scenario(f.path.string()); });
  };
  // schedule given both ways
  CHECK(rejects("[scenario]\ncadence_h = 8\ncount = 10\ndts_h = 8 8\n") ==
        ErrorCode::ConfigParse);
  // no schedule at all
  CHECK(rejects("[scenario]\nmean_motion = 15.1\n") == ErrorCode::ConfigParse);
  // unknown scenario key
  CHECK(rejects("[scenario]\ncadence_h = 8\ncount = 10\ntypo = 1\n") ==
        ErrorCode::ConfigParse);
  // missing [scenario]
  CHECK(rejects("[event]\nkind = impulse\nat_h = 1\ndv_intrack_mps = 1\n") ==
        ErrorCode::ConfigParse);
  // impulse with a drag key
  CHECK(rejects("[scenario]\ncadence_h = 8\ncount = 10\n[event]\nkind = impulse\n"
                "at_h = 1\nmultiplier = 2\n") == ErrorCode::ConfigParse);
  // drag event without its multiplier
  CHECK(rejects("[scenario]\ncadence_h = 8\ncount = 10\n[event]\nkind = drag_scale\n"
                "at_h = 1\n") == ErrorCode::ConfigParse);
  // unknown event kind
  CHECK(rejects("[scenario]\ncadence_h = 8\ncount = 10\n[event]\nkind = warp\nat_h = 1\n") ==
        ErrorCode::ConfigParse);
}

TEST_CASE("pipeline config starts from defaults and overlays the file") {
  const PipelineConfig defaults = load_pipeline_config("");
  CHECK(defaults.window.T == 50);
  CHECK(defaults.window.stride == 25);
  CHECK(defaults.split.seed == 42);
  CHECK(defaults.rules.dh_man_km == doctest::Approx(10.0));

  TempFile f(
      "[window]\n"
      "length = 60\n"
      "stride = 30\n"
      "[split]\n"
      "seed = 7\n"
      "train_fraction = 0.7\n"
      "val_fraction = 0.2\n"
      "[rules]\n"
      "dh_maneuver_km = 12.5\n"
      "[imm]\n"
      "label_threshold = 0.45\n"
      "[obs_noise]\n"
      "supgp_pos_sigma_m = 25\n"
      "[force]\n"
      "enable_drag = false\n");
  const PipelineConfig cfg = load_pipeline_config(f.path.string());
  CHECK(cfg.window.T == 60);
  CHECK(cfg.window.stride == 30);
  CHECK(cfg.split.seed == 7);
  CHECK(cfg.split.fractions.train == doctest::Approx(0.7));
  CHECK(cfg.split.fractions.val == doctest::Approx(0.2));
  CHECK(cfg.rules.dh_man_km == doctest::Approx(12.5));
  CHECK(cfg.imm.label_threshold == doctest::Approx(0.45));
  CHECK(cfg.obs_noise.supgp_pos_sigma_m == doctest::Approx(25.0));
  CHECK(!cfg.force.enable_drag);
  // untouched keys keep their defaults
  CHECK(cfg.rules.h_low_km == doctest::Approx(400.0));
  CHECK(cfg.ukf.alpha == doctest::Approx(defaults.ukf.alpha));

  // the cascade view carries the same knobs
  const CascadeConfigs cc = cfg.cascade_configs();
  CHECK(cc.rules.dh_man_km == doctest::Approx(12.5));
  CHECK(cc.imm.label_threshold == doctest::Approx(0.45));
}

TEST_CASE("pipeline config rejects unknown sections, keys, and bad values") {
  const auto rejects = [](const std::string& text) {
    TempFile f(text);
    return code_of([&] { load_pipeline_config(f.path.string()); });
  };
  CHECK(rejects("[nonsense]\nx = 1\n") == ErrorCode::ConfigParse);
  CHECK(rejects("[window]\nlenght = 60\n") == ErrorCode::ConfigParse);  // typo must not pass
  CHECK(rejects("[window]\nlength = 0\n") == ErrorCode::ConfigParse);
  CHECK(rejects("[split]\ntrain_fraction = 0.9\nval_fraction = 0.2\n") ==
        ErrorCode::ConfigParse);
  CHECK(rejects("[window]\nlength = 60\n[window]\nstride = 10\n") == ErrorCode::ConfigParse);
}

TEST_CASE("a resolved config reloads to the same values") {
  TempFile f(
      "[window]\n"
      "length = 64\n"
      "[imm]\n"
      "label_threshold = 0.37\n"
      "[ukf]\n"
      "alpha = 0.02\n");
  const PipelineConfig cfg = load_pipeline_config(f.path.string());
  const std::string resolved = resolved_ini(cfg);

  const PipelineConfig back = apply_pipeline_ini(parse_ini(resolved, "resolved"), "resolved");
  CHECK(back.window.T == 64);
  CHECK(back.window.stride == cfg.window.stride);
  CHECK(back.imm.label_threshold == doctest::Approx(0.37).epsilon(1e-12));
  CHECK(back.ukf.alpha == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(back.split.seed == cfg.split.seed);
  CHECK(back.rules.h_reentry_km == cfg.rules.h_reentry_km);
  CHECK(back.force.mu == cfg.force.mu);
  for (int m = 0; m < kModeCount; ++m) {
    CHECK(back.modes[static_cast<std::size_t>(m)].sigma_pos_m ==
          doctest::Approx(cfg.modes[static_cast<std::size_t>(m)].sigma_pos_m));
  }
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      CHECK(back.imm.base_transition(r, c) ==
            doctest::Approx(cfg.imm.base_transition(r, c)).epsilon(1e-12));
}
