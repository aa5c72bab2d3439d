#include "tlecascade/windowing.hpp"

#include <cstring>
#include <fstream>

#include "tlecascade/error.hpp"

namespace tlecascade {
namespace {

constexpr std::uint32_t kMagic = 0x444C4354u;  // "TCLD" little-endian
constexpr std::uint32_t kVersion = 1u;
constexpr std::size_t kTierTagLen = 8;

// splitmix64 finalizer; full-period mixing of the (seed, norad, start) triple
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

template <typename T>
void put(std::ofstream& out, T v) {
  // all on-disk integers are little-endian; this code assumes an LE host
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

}  // namespace

std::vector<Window> make_windows(const std::vector<FeatureVector>& seq, int norad_id,
                                 const WindowParams& p) {
  std::vector<Window> out;
  const std::size_t t = static_cast<std::size_t>(p.T);
  const std::size_t stride = static_cast<std::size_t>(p.stride);
  if (p.T <= 0 || p.stride <= 0 || seq.size() < t) return out;
  for (std::size_t start = 0; start + t <= seq.size(); start += stride) {
    Window w;
    w.norad_id = norad_id;
    w.start = start;
    w.rows.assign(seq.begin() + static_cast<std::ptrdiff_t>(start),
                  seq.begin() + static_cast<std::ptrdiff_t>(start + t));
    const double epoch0 = w.rows.front()[kFeatEpochHours];
    for (FeatureVector& row : w.rows) row[kFeatEpochHours] -= epoch0;
    w.rows.front()[kFeatDtHours] = 0.0;
    out.push_back(std::move(w));
  }
  return out;
}

void attach_labels(std::vector<Window>& windows, const std::string& tier,
                   const std::vector<Label>& sequence_labels) {
  for (Window& w : windows) {
    if (w.start + w.rows.size() > sequence_labels.size())
      raise(ErrorCode::LengthMismatch, "label sequence shorter than windowed range");
    LabelTrack track;
    track.tier = tier;
    track.labels.reserve(w.rows.size());
    for (std::size_t k = 0; k < w.rows.size(); ++k)
      track.labels.push_back(static_cast<std::uint8_t>(sequence_labels[w.start + k]));
    w.label_tracks.push_back(std::move(track));
  }
}

Split assign_split(int norad_id, std::size_t start, std::uint64_t seed,
                   const SplitFractions& f) {
  std::uint64_t h = mix64(seed ^ 0x736c697463617374ull);
  h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(norad_id)));
  h = mix64(h ^ static_cast<std::uint64_t>(start));
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;  // uniform [0, 1)
  if (u < f.train) return Split::TRAIN;
  if (u < f.train + f.val) return Split::VAL;
  return Split::TEST;
}

std::vector<Split> assign_splits(const std::vector<Window>& windows, std::uint64_t seed,
                                 const SplitFractions& f) {
  std::vector<Split> out;
  out.reserve(windows.size());
  for (const Window& w : windows) out.push_back(assign_split(w.norad_id, w.start, seed, f));
  return out;
}

void write_dataset(const std::string& path, const std::vector<Window>& windows,
                   std::uint64_t seed, std::uint64_t stats_digest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::Io, "cannot write " + path);

  std::vector<std::string> tiers;
  if (!windows.empty())
    for (const LabelTrack& tr : windows.front().label_tracks) tiers.push_back(tr.tier);
  const std::uint32_t t = windows.empty() ? 0 : static_cast<std::uint32_t>(windows[0].rows.size());

  put(out, kMagic);
  put(out, kVersion);
  put(out, static_cast<std::uint64_t>(windows.size()));
  put(out, t);
  put(out, static_cast<std::uint32_t>(kFeatureCount));
  put(out, seed);
  put(out, stats_digest);
  put(out, static_cast<std::uint32_t>(tiers.size()));
  for (const std::string& tier : tiers) {
    if (tier.size() >= kTierTagLen) raise(ErrorCode::Io, "tier tag too long: " + tier);
    char tag[kTierTagLen] = {};
    std::memcpy(tag, tier.data(), tier.size());
    out.write(tag, kTierTagLen);
  }
  for (const Window& w : windows) {
    if (w.rows.size() != t) raise(ErrorCode::LengthMismatch, "ragged window lengths");
    for (const FeatureVector& row : w.rows)
      for (int i = 0; i < kFeatureCount; ++i) put(out, static_cast<float>(row[i]));
  }
  for (std::size_t k = 0; k < tiers.size(); ++k) {
    for (const Window& w : windows) {
      if (w.label_tracks.size() != tiers.size() || w.label_tracks[k].tier != tiers[k])
        raise(ErrorCode::LengthMismatch, "inconsistent label tracks across windows");
      out.write(reinterpret_cast<const char*>(w.label_tracks[k].labels.data()),
                static_cast<std::streamsize>(w.label_tracks[k].labels.size()));
    }
  }
  if (!out) raise(ErrorCode::Io, "write failed: " + path);
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot read " + path);
  if (get<std::uint32_t>(in) != kMagic) raise(ErrorCode::Io, path + ": bad magic");
  if (get<std::uint32_t>(in) != kVersion) raise(ErrorCode::Io, path + ": unknown version");
  Dataset d;
  const auto n = get<std::uint64_t>(in);
  d.t = get<std::uint32_t>(in);
  d.f = get<std::uint32_t>(in);
  d.seed = get<std::uint64_t>(in);
  d.stats_digest = get<std::uint64_t>(in);
  const auto tier_count = get<std::uint32_t>(in);
  for (std::uint32_t k = 0; k < tier_count; ++k) {
    char tag[kTierTagLen];
    in.read(tag, kTierTagLen);
    d.tiers.emplace_back(tag, strnlen(tag, kTierTagLen));
  }
  d.values.resize(n * d.t * d.f);
  in.read(reinterpret_cast<char*>(d.values.data()),
          static_cast<std::streamsize>(d.values.size() * sizeof(float)));
  d.tier_labels.resize(tier_count);
  for (auto& block : d.tier_labels) {
    block.resize(n * d.t);
    in.read(reinterpret_cast<char*>(block.data()), static_cast<std::streamsize>(block.size()));
  }
  if (!in) raise(ErrorCode::Io, path + ": truncated dataset");
  return d;
}

}  // namespace tlecascade
