#pragma once

/// @file windowing.hpp
/// @brief Fixed-length window construction over per-satellite feature
///        sequences, seeded train/val/test assignment, and the binary dataset
///        container.

#include <cstdint>
#include <string>
#include <vector>

#include "tlecascade/features.hpp"
#include "tlecascade/rules.hpp"

namespace tlecascade {

struct WindowParams {
  int T = 50;
  int stride = 25;
};

/// One label track attached to a window (e.g. "rule", "imm", "truth").
struct LabelTrack {
  std::string tier;
  std::vector<std::uint8_t> labels;  ///< length T, values per Label order
};

struct Window {
  int norad_id = 0;
  std::size_t start = 0;                ///< index into the source sequence
  std::vector<FeatureVector> rows;      ///< length T; epoch_h re-zeroed, row 0 dt = 0
  std::vector<LabelTrack> label_tracks;
};

/// Slice a chronological feature sequence into windows starting at
/// 0, stride, 2*stride, ...; sequences shorter than T yield none. Within each
/// window epoch_h is shifted to be relative to the leading row and the leading
/// dt_hours is reset to 0.
std::vector<Window> make_windows(const std::vector<FeatureVector>& seq, int norad_id,
                                 const WindowParams& p = {});

/// Slice a per-timestep label sequence to match previously built windows.
void attach_labels(std::vector<Window>& windows, const std::string& tier,
                   const std::vector<Label>& sequence_labels);

enum class Split : std::uint8_t { TRAIN = 0, VAL = 1, TEST = 2 };

constexpr const char* to_string(Split s) noexcept {
  switch (s) {
    case Split::TRAIN: return "train";
    case Split::VAL: return "val";
    case Split::TEST: return "test";
  }
  return "?";
}

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;  ///< test gets the remainder
};

/// Deterministic split from a seeded hash of (norad_id, start); identical
/// seeds give identical assignments with no stored permutation.
Split assign_split(int norad_id, std::size_t start, std::uint64_t seed,
                   const SplitFractions& f = {});

std::vector<Split> assign_splits(const std::vector<Window>& windows, std::uint64_t seed,
                                 const SplitFractions& f = {});

/// Binary dataset: header (magic, version, N, T, F, seed, stats digest, label
/// tier directory), then N windows of T*F float32 little-endian values
/// row-major, then one N*T uint8 block per label tier.
struct Dataset {
  std::uint32_t t = 0;
  std::uint32_t f = 0;
  std::uint64_t seed = 0;
  std::uint64_t stats_digest = 0;
  std::vector<std::string> tiers;
  std::vector<float> values;                           ///< N*T*F
  std::vector<std::vector<std::uint8_t>> tier_labels;  ///< per tier, N*T
  std::size_t window_count() const { return t * f ? values.size() / (t * f) : 0; }
};

void write_dataset(const std::string& path, const std::vector<Window>& windows,
                   std::uint64_t seed, std::uint64_t stats_digest);
Dataset read_dataset(const std::string& path);

}  // namespace tlecascade
