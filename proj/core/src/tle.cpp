#include "tlecascade/tle.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "tlecascade/error.hpp"

namespace tlecascade {
namespace {

// ---- calendar helpers (proleptic Gregorian, no leap seconds) ----

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
long long days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_year(int y) { return is_leap(y) ? 366 : 365; }

// ---- fixed-column field helpers ----

std::string_view field(const std::string& line, std::size_t begin, std::size_t end) {
  return std::string_view(line).substr(begin, end - begin);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double_field(const std::string& line, std::size_t begin, std::size_t end,
                          const char* name) {
  const std::string_view t = trim(field(line, begin, end));
  if (t.empty()) raise(ErrorCode::FieldParse, std::string("empty field: ") + name);
  double out = 0.0;
  // from_chars rejects a leading '+' and bare ".5"; normalize first.
  std::string buf(t);
  if (buf.front() == '+') buf.erase(buf.begin());
  if (!buf.empty() && buf.front() == '.') buf.insert(buf.begin(), '0');
  if (buf.size() >= 2 && buf[0] == '-' && buf[1] == '.') buf.insert(buf.begin() + 1, '0');
  const auto [p, ec] = std::from_chars(buf.data(), buf.data() + buf.size(), out);
  if (ec != std::errc() || p != buf.data() + buf.size())
    raise(ErrorCode::FieldParse, std::string(name) + ": '" + std::string(t) + "'");
  return out;
}

int parse_int_field(const std::string& line, std::size_t begin, std::size_t end,
                    const char* name) {
  const std::string_view t = trim(field(line, begin, end));
  if (t.empty()) raise(ErrorCode::FieldParse, std::string("empty field: ") + name);
  int out = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || p != t.data() + t.size())
    raise(ErrorCode::FieldParse, std::string(name) + ": '" + std::string(t) + "'");
  return out;
}

// Implied-decimal exponent encoding used by the B* field: " 12345-3" means
// +0.12345e-3. Sign, five mantissa digits, exponent sign, exponent digit.
double parse_implied_decimal(const std::string& line, std::size_t begin, const char* name) {
  const std::string_view f = field(line, begin, begin + 8);
  const char sc = f[0];
  if (sc != ' ' && sc != '+' && sc != '-')
    raise(ErrorCode::FieldParse, std::string(name) + ": bad sign");
  double mant = 0.0;
  for (int i = 1; i <= 5; ++i) {
    const char c = f[i];
    if (c == ' ') continue;  // some archives blank-pad zero mantissas
    if (!std::isdigit(static_cast<unsigned char>(c)))
      raise(ErrorCode::FieldParse, std::string(name) + ": bad mantissa");
    mant = mant * 10.0 + (c - '0');
  }
  mant *= 1e-5;
  const char es = f[6];
  if (es != '+' && es != '-' && es != ' ')
    raise(ErrorCode::FieldParse, std::string(name) + ": bad exponent sign");
  if (!std::isdigit(static_cast<unsigned char>(f[7])))
    raise(ErrorCode::FieldParse, std::string(name) + ": bad exponent");
  const int expo = (es == '-' ? -1 : 1) * (f[7] - '0');
  const double v = mant * std::pow(10.0, expo);
  return sc == '-' ? -v : v;
}

std::string format_implied_decimal(double v, const char* name) {
  if (v == 0.0) return " 00000+0";
  const char sign = v < 0 ? '-' : ' ';
  double m = std::fabs(v);
  int e10 = static_cast<int>(std::floor(std::log10(m))) + 1;
  long digits = std::lround(m / std::pow(10.0, e10) * 1e5);
  if (digits >= 100000) {  // rounding rolled the mantissa over
    digits /= 10;
    ++e10;
  }
  if (e10 < -9) return " 00000+0";  // underflows the single exponent digit
  if (e10 > 9) raise(ErrorCode::FieldParse, std::string(name) + ": magnitude unrepresentable");
  const int mant5 = static_cast<int>(digits % 100000);  // bounded for the writer below
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%05d%c%d", sign, mant5, e10 < 0 ? '-' : '+',
                std::abs(e10));
  return buf;
}

double wrap_deg(double x) {
  double w = std::fmod(x, 360.0);
  if (w < 0) w += 360.0;
  if (w >= 360.0) w = 0.0;  // fmod can land exactly on 360 after the add
  return w;
}

}  // namespace

int tle_checksum(const std::string& line) {
  if (line.size() < 68) raise(ErrorCode::LineLengthMismatch, "checksum needs 68 payload chars");
  int sum = 0;
  for (std::size_t i = 0; i < 68; ++i) {
    const char c = line[i];
    if (c >= '0' && c <= '9') sum += c - '0';
    else if (c == '-') sum += 1;
  }
  return sum % 10;
}

UnixSeconds epoch_to_instant(int yy, double fractional_doy) {
  if (yy < 0 || yy > 99) raise(ErrorCode::FieldParse, "epoch year out of range");
  const int year = yy >= 57 ? 1900 + yy : 2000 + yy;
  if (!(fractional_doy >= 1.0) || fractional_doy >= 367.0)
    raise(ErrorCode::DayOutOfRange, "fractional day-of-year outside [1, 367)");
  const int day = static_cast<int>(fractional_doy);
  if (day > days_in_year(year))
    raise(ErrorCode::DayOutOfRange, "day " + std::to_string(day) + " invalid for year " +
                                        std::to_string(year));
  const double frac = fractional_doy - day;
  const long long base = days_from_civil(year, 1, 1) + (day - 1);
  return static_cast<double>(base) * 86400.0 + frac * 86400.0;
}

std::pair<int, double> instant_to_epoch(UnixSeconds t) {
  const double days = std::floor(t / 86400.0);
  long long d = static_cast<long long>(days);
  // civil_from_days, year only
  const long long z = d + 719468;
  const long long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  long long y = static_cast<long long>(yoe) + era * 400;
  const unsigned doy_mar = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy_mar + 2) / 153;
  if (mp >= 10) ++y;  // Jan/Feb belong to the next civil year in this scheme
  const int year = static_cast<int>(y);
  if (year < 1957 || year > 2056)
    raise(ErrorCode::DayOutOfRange, "instant outside the 1957-2056 epoch window");
  const long long jan1 = days_from_civil(year, 1, 1);
  const double doy = (t - static_cast<double>(jan1) * 86400.0) / 86400.0 + 1.0;
  return {year % 100, doy};
}

TleRecord parse_tle_lines(const std::string& line1, const std::string& line2, Source source) {
  if (line1.size() != 69 || line2.size() != 69)
    raise(ErrorCode::LineLengthMismatch,
          "expected 69-character lines, got " + std::to_string(line1.size()) + " and " +
              std::to_string(line2.size()));
  if (line1[0] != '1' || line2[0] != '2')
    raise(ErrorCode::FieldParse, "line numbers must be '1' and '2'");
  for (const std::string* ln : {&line1, &line2}) {
    const char cc = (*ln)[68];
    if (!std::isdigit(static_cast<unsigned char>(cc)))
      raise(ErrorCode::FieldParse, "checksum column is not a digit");
    if (tle_checksum(*ln) != cc - '0')
      raise(ErrorCode::ChecksumMismatch, "line " + std::string(1, (*ln)[0]));
  }
  const int cat1 = parse_int_field(line1, 2, 7, "catalog number");
  const int cat2 = parse_int_field(line2, 2, 7, "catalog number");
  if (cat1 != cat2)
    raise(ErrorCode::CatalogMismatch,
          std::to_string(cat1) + " vs " + std::to_string(cat2));

  TleRecord rec;
  rec.norad_id = cat1;
  rec.source = source;
  const int yy = parse_int_field(line1, 18, 20, "epoch year");
  const double doy = parse_double_field(line1, 20, 32, "epoch day");
  rec.epoch = epoch_to_instant(yy, doy);
  rec.n_dot = parse_double_field(line1, 33, 43, "mean motion derivative");
  rec.bstar = parse_implied_decimal(line1, 53, "bstar");

  rec.inclination = parse_double_field(line2, 8, 16, "inclination");
  rec.raan = wrap_deg(parse_double_field(line2, 17, 25, "raan"));
  // 7 digits with an implied leading "0."; some archives blank-pad zeros
  double ecc = 0.0;
  for (const char c : field(line2, 26, 33)) {
    if (c == ' ') {
      ecc *= 10.0;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c)))
      raise(ErrorCode::FieldParse, "eccentricity: bad digit");
    ecc = ecc * 10.0 + (c - '0');
  }
  rec.eccentricity = ecc * 1e-7;
  rec.argp = wrap_deg(parse_double_field(line2, 34, 42, "argument of perigee"));
  rec.mean_anomaly = wrap_deg(parse_double_field(line2, 43, 51, "mean anomaly"));
  rec.mean_motion = parse_double_field(line2, 52, 63, "mean motion");

  if (!(rec.mean_motion > 0)) raise(ErrorCode::FieldParse, "mean motion must be positive");
  if (rec.inclination < 0 || rec.inclination > 180)
    raise(ErrorCode::FieldParse, "inclination outside [0, 180]");
  return rec;
}

std::pair<std::string, std::string> format_tle_lines(const TleRecord& rec) {
  if (rec.norad_id < 0 || rec.norad_id > 99999)
    raise(ErrorCode::FieldParse, "catalog number unrepresentable in 5 columns");
  if (rec.mean_motion >= 100.0 || rec.mean_motion <= 0.0)
    raise(ErrorCode::FieldParse, "mean motion unrepresentable");
  if (rec.eccentricity < 0.0 || rec.eccentricity >= 1.0)
    raise(ErrorCode::FieldParse, "eccentricity unrepresentable");
  if (std::fabs(rec.n_dot) >= 1.0)
    raise(ErrorCode::FieldParse, "mean motion derivative unrepresentable");

  const auto [yy, doy] = instant_to_epoch(rec.epoch);
  char l1[80];
  std::snprintf(l1, sizeof l1, "1 %05dU 00000A   %02d%012.8f %c.%08lld  00000-0 %s 0  999",
                rec.norad_id, yy, doy, rec.n_dot < 0 ? '-' : ' ',
                static_cast<long long>(std::llround(std::fabs(rec.n_dot) * 1e8)),
                format_implied_decimal(rec.bstar, "bstar").c_str());
  char l2[80];
  std::snprintf(l2, sizeof l2, "2 %05d %8.4f %8.4f %07lld %8.4f %8.4f %11.8f    9",
                rec.norad_id, rec.inclination, wrap_deg(rec.raan),
                static_cast<long long>(std::llround(rec.eccentricity * 1e7)),
                wrap_deg(rec.argp), wrap_deg(rec.mean_anomaly), rec.mean_motion);
  std::string line1(l1), line2(l2);
  line1 += static_cast<char>('0' + tle_checksum(line1));
  line2 += static_cast<char>('0' + tle_checksum(line2));
  return {line1, line2};
}

Archive read_bulk_archive(const std::string& path, Source tag) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::Io, "cannot open " + path);
  std::vector<std::string> lines;
  std::string raw;
  while (std::getline(in, raw)) {
    while (!raw.empty() && (raw.back() == '\r' || raw.back() == '\n')) raw.pop_back();
    lines.push_back(raw);
  }

  Archive out;
  std::unordered_map<int, std::vector<TleRecord>> by_sat;
  auto blank = [](const std::string& s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c); });
  };
  std::size_t i = 0;
  while (i < lines.size()) {
    if (blank(lines[i])) {
      ++i;
      continue;
    }
    std::size_t first = i;
    if (lines[i][0] != '1' && i + 2 < lines.size() && !lines[i + 1].empty() &&
        lines[i + 1][0] == '1') {
      first = i + 1;  // name-prefixed 3-line entry; the name plays no role
    }
    if (first + 1 >= lines.size() || lines[first].empty() || lines[first][0] != '1' ||
        lines[first + 1].empty() || lines[first + 1][0] != '2') {
      ++out.stats.total_entries;
      ++out.stats.skipped;
      i = first + 1;
      continue;
    }
    ++out.stats.total_entries;
    try {
      TleRecord rec = parse_tle_lines(lines[first], lines[first + 1], tag);
      by_sat[rec.norad_id].push_back(rec);
      ++out.stats.parsed;
    } catch (const Error&) {
      ++out.stats.skipped;
    }
    i = first + 2;
  }
  if (by_sat.empty()) raise(ErrorCode::EmptyArchive, path);

  for (auto& [norad, recs] : by_sat) {
    std::stable_sort(recs.begin(), recs.end(),
                     [](const TleRecord& a, const TleRecord& b) { return a.epoch < b.epoch; });
    auto last = std::unique(recs.begin(), recs.end(), [](const TleRecord& a, const TleRecord& b) {
      return a.epoch == b.epoch;
    });
    out.stats.deduplicated += static_cast<std::size_t>(recs.end() - last);
    recs.erase(last, recs.end());
    out.satellites.push_back({norad, std::move(recs)});
  }
  std::sort(out.satellites.begin(), out.satellites.end(),
            [](const SatelliteHistory& a, const SatelliteHistory& b) {
              return a.norad_id < b.norad_id;
            });
  return out;
}

void merge_archives(Archive& dst, Archive&& src) {
  dst.stats.total_entries += src.stats.total_entries;
  dst.stats.parsed += src.stats.parsed;
  dst.stats.skipped += src.stats.skipped;
  dst.stats.deduplicated += src.stats.deduplicated;
  for (auto& sat : src.satellites) {
    auto it = std::lower_bound(dst.satellites.begin(), dst.satellites.end(), sat.norad_id,
                               [](const SatelliteHistory& h, int id) { return h.norad_id < id; });
    if (it == dst.satellites.end() || it->norad_id != sat.norad_id) {
      dst.satellites.insert(it, std::move(sat));
      continue;
    }
    auto& recs = it->records;
    recs.insert(recs.end(), sat.records.begin(), sat.records.end());
    std::stable_sort(recs.begin(), recs.end(),
                     [](const TleRecord& a, const TleRecord& b) { return a.epoch < b.epoch; });
    auto last = std::unique(recs.begin(), recs.end(), [](const TleRecord& a, const TleRecord& b) {
      return a.epoch == b.epoch;
    });
    dst.stats.deduplicated += static_cast<std::size_t>(recs.end() - last);
    recs.erase(last, recs.end());
  }
}

}  // namespace tlecascade
