#pragma once

/// @file ini.hpp
/// @brief Ordered, strict INI reader shared by the pipeline and scenario
///        config loaders. Parsing keeps section/entry order so repeated
///        sections (scenario events) stay in file order.

#include <string>
#include <vector>

namespace tlecascade::cli {

struct IniEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct IniSection {
  std::string name;
  int line = 0;
  std::vector<IniEntry> entries;
};

struct IniDocument {
  std::vector<IniSection> sections;
};

/// Parse INI text. `#` and `;` start comments; keys must live inside a
/// section; malformed lines raise ConfigParse with origin:line context.
IniDocument parse_ini(const std::string& text, const std::string& origin);

IniDocument read_ini_file(const std::string& path);

/// Typed value readers; all raise ConfigParse on malformed input.
double ini_double(const IniEntry& e, const std::string& origin);
long long ini_int(const IniEntry& e, const std::string& origin);
bool ini_bool(const IniEntry& e, const std::string& origin);
std::vector<double> ini_doubles(const IniEntry& e, const std::string& origin);

}  // namespace tlecascade::cli
