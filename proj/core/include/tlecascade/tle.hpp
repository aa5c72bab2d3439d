#pragma once

/// @file tle.hpp
/// @brief Parsing, validation and serialization of two-line element sets, plus
///        bulk-archive ingestion into per-satellite chronological streams.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace tlecascade {

/// Seconds since 1970-01-01T00:00:00 UTC, fractional.
using UnixSeconds = double;

enum class Source : std::uint8_t { TLE = 0, SUPGP = 1 };

constexpr const char* to_string(Source s) noexcept {
  return s == Source::TLE ? "TLE" : "SUPGP";
}

/// One parsed element-set observation.
///
/// n_dot carries the raw line-1 field, i.e. the half-first-derivative
/// convention (rev/day^2, printed value = ndot/2); consumers that need the
/// physical rate apply the factor of two themselves.
struct TleRecord {
  int norad_id = 0;
  UnixSeconds epoch = 0.0;
  double mean_motion = 0.0;   ///< rev/day, > 0
  double eccentricity = 0.0;  ///< [0, 1)
  double inclination = 0.0;   ///< deg, [0, 180]
  double raan = 0.0;          ///< deg, [0, 360)
  double argp = 0.0;          ///< deg, [0, 360)
  double mean_anomaly = 0.0;  ///< deg, [0, 360)
  double bstar = 0.0;         ///< inverse Earth radii
  double n_dot = 0.0;         ///< rev/day^2, raw half-rate field
  Source source = Source::TLE;
};

/// Modulo-10 line checksum: sum of digit characters plus count of '-' over the
/// 68 payload characters.
int tle_checksum(const std::string& line);

/// Parse a validated record from one line pair. Both lines must be 69
/// characters with matching catalog numbers and valid checksums.
TleRecord parse_tle_lines(const std::string& line1, const std::string& line2,
                          Source source = Source::TLE);

/// Two-digit epoch year + fractional day-of-year -> UTC instant.
/// Years 57-99 map to 1957-1999, 00-56 to 2000-2056; day 1 = January 1.
UnixSeconds epoch_to_instant(int yy, double fractional_doy);

/// Inverse of epoch_to_instant for serialization; valid for 1957-2056.
std::pair<int, double> instant_to_epoch(UnixSeconds t);

/// Render the record back to a 69-character line pair (checksums included).
/// Numeric fields are quantized to the column widths of the format, so
/// parse(format(parse(x))) == parse(x) field-for-field.
std::pair<std::string, std::string> format_tle_lines(const TleRecord& rec);

struct SatelliteHistory {
  int norad_id = 0;
  std::vector<TleRecord> records;  ///< strictly increasing epoch
};

struct ArchiveStats {
  std::size_t total_entries = 0;  ///< parsed + skipped
  std::size_t parsed = 0;
  std::size_t skipped = 0;       ///< malformed entries, counted not fatal
  std::size_t deduplicated = 0;  ///< duplicate-epoch records dropped (keep first)
};

struct Archive {
  std::vector<SatelliteHistory> satellites;  ///< sorted by norad_id
  ArchiveStats stats;
};

/// Read a bulk archive of concatenated 2-line (or 3-line, name-prefixed)
/// entries. Records are grouped per satellite, epoch-sorted, and exact
/// duplicate epochs deduplicated keeping the first occurrence in file order.
Archive read_bulk_archive(const std::string& path, Source tag = Source::TLE);

/// Merge a second archive into the first (re-sorts and re-deduplicates the
/// affected satellites; stats are summed).
void merge_archives(Archive& dst, Archive&& src);

}  // namespace tlecascade
