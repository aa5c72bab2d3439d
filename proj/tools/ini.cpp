#include "ini.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "tlecascade/error.hpp"

namespace tlecascade::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  raise(ErrorCode::ConfigParse, origin + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

IniDocument parse_ini(const std::string& text, const std::string& origin) {
  IniDocument doc;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto cut = raw.find_first_of("#;"); cut != std::string::npos) raw.erase(cut);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        fail(origin, lineno, "malformed section header '" + line + "'");
      doc.sections.push_back({trim(line.substr(1, line.size() - 2)), lineno, {}});
      if (doc.sections.back().name.empty()) fail(origin, lineno, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(origin, lineno, "expected 'key = value'");
    if (doc.sections.empty()) fail(origin, lineno, "key before any [section]");
    IniEntry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};
    if (e.key.empty()) fail(origin, lineno, "empty key");
    doc.sections.back().entries.push_back(std::move(e));
  }
  return doc;
}

IniDocument read_ini_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::Io, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ini(buf.str(), path);
}

double ini_double(const IniEntry& e, const std::string& origin) {
  const std::string& v = e.value;
  double out = 0.0;
  const char* b = v.data();
  const char* last = v.data() + v.size();
  if (!v.empty() && v.front() == '+') ++b;  // from_chars rejects a leading plus
  auto [p, ec] = std::from_chars(b, last, out);
  if (ec != std::errc{} || p != last)
    fail(origin, e.line, "key '" + e.key + "': not a number: '" + v + "'");
  return out;
}

long long ini_int(const IniEntry& e, const std::string& origin) {
  const std::string& v = e.value;
  long long out = 0;
  const char* b = v.data();
  const char* last = v.data() + v.size();
  if (!v.empty() && v.front() == '+') ++b;
  auto [p, ec] = std::from_chars(b, last, out);
  if (ec != std::errc{} || p != last)
    fail(origin, e.line, "key '" + e.key + "': not an integer: '" + v + "'");
  return out;
}

bool ini_bool(const IniEntry& e, const std::string& origin) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  fail(origin, e.line, "key '" + e.key + "': not a boolean: '" + e.value + "'");
}

std::vector<double> ini_doubles(const IniEntry& e, const std::string& origin) {
  std::vector<double> out;
  std::istringstream in(e.value);
  std::string tok;
  while (in >> tok) {
    IniEntry one{e.key, tok, e.line};
    out.push_back(ini_double(one, origin));
  }
  if (out.empty()) fail(origin, e.line, "key '" + e.key + "': expected numbers");
  return out;
}

}  // namespace tlecascade::cli
