#pragma once

// Minimal delimited-text support shared by every reader and writer in the
// toolkit. Fields follow RFC 4180 quoting: a field containing the delimiter,
// a quote or a line break is wrapped in double quotes with inner quotes
// doubled. Records never span lines on input.

#include <array>
#include <charconv>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "practice_map/error.hpp"

namespace practice_map {

struct DelimiterConfig {
  char delimiter = ',';
};

inline DelimiterConfig delimiter_from_name(std::string_view name) {
  if (name == "," || name == "comma" || name == "csv") return {','};
  if (name == "\t" || name == "\\t" || name == "tab" || name == "tsv") return {'\t'};
  throw ConfigError("unsupported delimiter '" + std::string(name) +
                    "' (expected comma or tab)");
}

namespace csv {

inline std::vector<std::string> split(std::string_view line, char delim) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == delim) {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

// Reads one physical line, stripping a trailing '\r'. Returns false at EOF.
inline bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

inline void write_field(std::ostream& out, std::string_view field, char delim) {
  const bool needs_quotes =
      field.find_first_of(std::string{delim, '"', '\n', '\r'}) != std::string_view::npos;
  if (!needs_quotes) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields, char delim) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << delim;
    write_field(out, fields[i], delim);
  }
  out << '\n';
}

inline std::string to_lower(std::string_view s) {
  std::string r(s);
  for (char& c : r) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return r;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Header lookup. Column names are matched case-insensitively after trimming.
class Header {
 public:
  Header() = default;
  explicit Header(const std::vector<std::string>& names) : names_(names) {
    for (auto& n : names_) n = to_lower(trim(n));
    if (!names_.empty() && names_[0].rfind("\xEF\xBB\xBF", 0) == 0) names_[0].erase(0, 3);
  }

  std::optional<std::size_t> find(std::string_view name) const {
    const std::string key = to_lower(name);
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == key) return i;
    }
    return std::nullopt;
  }

  std::size_t require(std::string_view name, std::string_view what) const {
    if (auto idx = find(name)) return *idx;
    throw InputError(std::string(what) + ": missing required column '" + std::string(name) +
                     "'");
  }

  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};

// Checks that a stage file carries exactly the expected header.
inline void expect_header(const std::vector<std::string>& found,
                          const std::vector<std::string>& expected, std::string_view what) {
  Header h(found);
  bool ok = h.names().size() == expected.size();
  for (std::size_t i = 0; ok && i < expected.size(); ++i) {
    ok = h.names()[i] == to_lower(expected[i]);
  }
  if (ok) return;
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
  };
  throw InputError(std::string(what) + ": header mismatch, expected '" + join(expected) +
                   "' but found '" + join(found) + "'");
}

}  // namespace csv

// Shortest decimal text that parses back to the same double.
inline std::string format_exact(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

inline std::string format_fixed(double v, int decimals) {
  std::array<char, 64> buf{};
  auto [end, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, decimals);
  return std::string(buf.data(), end);
}

inline std::optional<double> parse_double(std::string_view s) {
  s = csv::trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  s = csv::trim(s);
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace practice_map
