#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "tlecascade/error.hpp"
#include "tlecascade/windowing.hpp"

using namespace tlecascade;

namespace {

// Monotone synthetic sequence: epoch_h walks in 8 h steps and every slot
// carries a value derived from its index so slicing errors are visible.
std::vector<FeatureVector> ramp_sequence(int n) {
  std::vector<FeatureVector> seq(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    FeatureVector& x = seq[static_cast<std::size_t>(k)];
    for (int i = 0; i < kFeatureCount; ++i) x[i] = k * 100.0 + i;
    x[kFeatEpochHours] = 8.0 * k;
    x[kFeatDtHours] = k == 0 ? 0.0 : 8.0;
  }
  return seq;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::Io;
}

std::filesystem::path temp_path(const std::string& stem) {
  static std::mt19937_64 rng(std::random_device{}());
  return std::filesystem::temp_directory_path() /
         (stem + "-" + std::to_string(rng()) + ".bin");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("window count follows the stride arithmetic") {
  const std::array<int, 5> n = {49, 50, 75, 100, 130};
  const std::array<std::size_t, 5> expect = {0, 1, 2, 3, 4};
  for (std::size_t i = 0; i < n.size(); ++i) {
    const auto w = make_windows(ramp_sequence(n[i]), 1);
    CHECK(w.size() == expect[i]);
  }
  CHECK(make_windows({}, 1).empty());
}

TEST_CASE("windows start on stride boundaries and are re-zeroed") {
  const auto seq = ramp_sequence(100);
  const auto windows = make_windows(seq, 77);
  REQUIRE(windows.size() == 3);
  for (std::size_t wi = 0; wi < windows.size(); ++wi) {
    const Window& w = windows[wi];
    CHECK(w.norad_id == 77);
    CHECK(w.start == wi * 25);
    REQUIRE(w.rows.size() == 50);
    CHECK(w.rows[0][kFeatEpochHours] == 0.0);
    CHECK(w.rows[0][kFeatDtHours] == 0.0);
    for (std::size_t j = 1; j < w.rows.size(); ++j) {
      const auto& src = seq[w.start + j];
      CHECK(w.rows[j][kFeatEpochHours] ==
            doctest::Approx(src[kFeatEpochHours] - seq[w.start][kFeatEpochHours])
                .epsilon(1e-15));
      CHECK(w.rows[j][kFeatDtHours] == src[kFeatDtHours]);
      CHECK(w.rows[j][kFeatMeanMotion] == src[kFeatMeanMotion]);  // other slots untouched
    }
  }
}

TEST_CASE("custom window geometry is honored") {
  WindowParams p;
  p.T = 10;
  p.stride = 5;
  const auto windows = make_windows(ramp_sequence(24), 5, p);
  REQUIRE(windows.size() == 3);  // starts 0, 5, 10; 15+10 > 24
  CHECK(windows[2].start == 10);
  CHECK(windows[2].rows.size() == 10);
}

TEST_CASE("label tracks slice in step with the rows") {
  const auto seq = ramp_sequence(75);
  auto windows = make_windows(seq, 9);
  REQUIRE(windows.size() == 2);

  std::vector<Label> labels(75, Label::NORMAL);
  labels[30] = Label::MANEUVER;
  labels[60] = Label::DECAY;
  attach_labels(windows, "rule", labels);

  REQUIRE(windows[0].label_tracks.size() == 1);
  CHECK(windows[0].label_tracks[0].tier == "rule");
  REQUIRE(windows[0].label_tracks[0].labels.size() == 50);
  CHECK(windows[0].label_tracks[0].labels[30] == static_cast<std::uint8_t>(Label::MANEUVER));
  // second window starts at 25: index 30 lands at offset 5, 60 at offset 35
  CHECK(windows[1].label_tracks[0].labels[5] == static_cast<std::uint8_t>(Label::MANEUVER));
  CHECK(windows[1].label_tracks[0].labels[35] == static_cast<std::uint8_t>(Label::DECAY));

  attach_labels(windows, "imm", labels);
  CHECK(windows[0].label_tracks.size() == 2);
  CHECK(windows[0].label_tracks[1].tier == "imm");

  std::vector<Label> wrong(74, Label::NORMAL);
  CHECK(code_of([&] { attach_labels(windows, "x", wrong); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("split assignment is deterministic and respects the fractions") {
  std::size_t counts[3] = {0, 0, 0};
  const std::uint64_t seed = 42;
  const int sats = 1000;
  const int starts = 100;
  for (int id = 1; id <= sats; ++id)
    for (int s = 0; s < starts; ++s) {
      const Split a = assign_split(id, static_cast<std::size_t>(s) * 25, seed);
      const Split b = assign_split(id, static_cast<std::size_t>(s) * 25, seed);
      CHECK(a == b);
      ++counts[static_cast<int>(a)];
    }
  const double total = static_cast<double>(sats) * starts;
  CHECK(counts[0] / total == doctest::Approx(0.8).epsilon(0.02));
  CHECK(counts[1] / total == doctest::Approx(0.1).epsilon(0.12));
  CHECK(counts[2] / total == doctest::Approx(0.1).epsilon(0.12));

  // a different seed moves at least one assignment
  bool moved = false;
  for (int id = 1; id <= 50 && !moved; ++id)
    moved = assign_split(id, 0, seed) != assign_split(id, 0, seed + 1);
  CHECK(moved);

  SplitFractions f;
  f.train = 1.0;
  f.val = 0.0;
  for (int id = 1; id <= 100; ++id) CHECK(assign_split(id, 0, seed, f) == Split::TRAIN);
}

TEST_CASE("assign_splits matches the scalar assignment window for window") {
  auto windows = make_windows(ramp_sequence(100), 31);
  const auto splits = assign_splits(windows, 7);
  REQUIRE(splits.size() == windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i)
    CHECK(splits[i] == assign_split(windows[i].norad_id, windows[i].start, 7));
}

TEST_CASE("dataset serialization round trips bit-exactly") {
  const auto seq = ramp_sequence(100);
  auto windows = make_windows(seq, 12);
  std::vector<Label> labels(100, Label::NORMAL);
  labels[40] = Label::DECAY;
  attach_labels(windows, "rule", labels);
  attach_labels(windows, "imm", labels);

  const auto path = temp_path("dataset");
  write_dataset(path.string(), windows, 99, 0xabcdef12u);
  const Dataset ds = read_dataset(path.string());

  CHECK(ds.t == 50);
  CHECK(ds.f == static_cast<std::uint32_t>(kFeatureCount));
  CHECK(ds.seed == 99);
  CHECK(ds.stats_digest == 0xabcdef12u);
  CHECK(ds.window_count() == windows.size());
  REQUIRE(ds.tiers.size() == 2);
  CHECK(ds.tiers[0] == "rule");
  CHECK(ds.tiers[1] == "imm");

  // float32 quantization is the only permitted difference
  for (std::size_t w = 0; w < windows.size(); ++w)
    for (std::size_t t = 0; t < 50; ++t)
      for (int i = 0; i < kFeatureCount; ++i) {
        const float expect = static_cast<float>(windows[w].rows[t][i]);
        CHECK(ds.values[(w * 50 + t) * kFeatureCount + static_cast<std::size_t>(i)] == expect);
      }
  REQUIRE(ds.tier_labels.size() == 2);
  CHECK(ds.tier_labels[0][0 * 50 + 40] == static_cast<std::uint8_t>(Label::DECAY));

  // byte-identical rewrite
  const auto path2 = temp_path("dataset");
  write_dataset(path2.string(), windows, 99, 0xabcdef12u);
  CHECK(slurp(path) == slurp(path2));

  std::filesystem::remove(path);
  std::filesystem::remove(path2);
}

TEST_CASE("dataset reader rejects foreign or truncated files") {
  const auto path = temp_path("garbage");
  {
    std::ofstream out(path, std::ios::binary);
    out << "not a dataset";
  }
  CHECK(code_of([&] { read_dataset(path.string()); }) == ErrorCode::Io);
  std::filesystem::remove(path);
  CHECK(code_of([&] { read_dataset("/nonexistent/data.bin"); }) == ErrorCode::Io);
}
