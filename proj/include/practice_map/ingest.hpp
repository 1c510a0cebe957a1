#pragma once

// Readers for the two input shapes: directed typed interactions
// (post_id, author_id, target_id, interaction_type[, timestamp]) and
// per-account attribute observations (account_id, dimension, value).

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "practice_map/csv.hpp"
#include "practice_map/error.hpp"
#include "practice_map/time.hpp"

namespace practice_map {

struct InteractionRecord {
  std::string post_id;
  std::string author_id;
  std::string target_id;
  std::string interaction_type;
  std::optional<Instant> timestamp;

  friend bool operator==(const InteractionRecord&, const InteractionRecord&) = default;
};

struct AttributeRecord {
  std::string account_id;
  std::string aspect;
  std::string dimension;
  double value = 0.0;

  friend bool operator==(const AttributeRecord&, const AttributeRecord&) = default;
};

namespace row_issue {
inline constexpr std::string_view kFieldCount = "field_count";
inline constexpr std::string_view kEmptyField = "empty_field";
inline constexpr std::string_view kBadTimestamp = "bad_timestamp";
inline constexpr std::string_view kBadValue = "bad_value";
inline constexpr std::string_view kNegativeValue = "negative_value";
}  // namespace row_issue

struct SkippedRow {
  std::size_t line = 0;  // 1-based physical line, header is line 1
  std::string reason;
  std::string detail;
};

struct InteractionTable {
  std::vector<InteractionRecord> records;
  std::vector<SkippedRow> skipped;
  bool has_timestamp_column = false;
};

struct AttributeTable {
  std::vector<AttributeRecord> records;  // aggregated, first-appearance order
  std::vector<SkippedRow> skipped;
  std::size_t rows_accepted = 0;         // raw rows before aggregation
};

inline InteractionTable parse_interactions(std::istream& in, DelimiterConfig format = {}) {
  constexpr std::string_view what = "interactions file";
  InteractionTable table;
  std::string line;
  if (!csv::read_line(in, line)) throw InputError(std::string(what) + ": missing header row");
  const csv::Header header(csv::split(line, format.delimiter));
  const std::size_t c_post = header.require("post_id", what);
  const std::size_t c_author = header.require("author_id", what);
  const std::size_t c_target = header.require("target_id", what);
  const std::size_t c_type = header.require("interaction_type", what);
  const std::optional<std::size_t> c_time = header.find("timestamp");
  table.has_timestamp_column = c_time.has_value();
  const std::size_t width = header.names().size();

  std::size_t lineno = 1;
  while (csv::read_line(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = csv::split(line, format.delimiter);
    if (fields.size() != width) {
      table.skipped.push_back({lineno, std::string(row_issue::kFieldCount),
                               "expected " + std::to_string(width) + " fields, found " +
                                   std::to_string(fields.size())});
      continue;
    }
    InteractionRecord rec{std::move(fields[c_post]), std::move(fields[c_author]),
                          std::move(fields[c_target]), std::move(fields[c_type]), std::nullopt};
    if (rec.author_id.empty() || rec.target_id.empty() || rec.interaction_type.empty()) {
      table.skipped.push_back({lineno, std::string(row_issue::kEmptyField),
                               "author_id, target_id and interaction_type must be non-empty"});
      continue;
    }
    if (c_time && !csv::trim(fields[*c_time]).empty()) {
      rec.timestamp = parse_timestamp(fields[*c_time]);
      if (!rec.timestamp) {
        table.skipped.push_back(
            {lineno, std::string(row_issue::kBadTimestamp), "cannot parse '" + fields[*c_time] + "'"});
        continue;
      }
    }
    table.records.push_back(std::move(rec));
  }
  return table;
}

inline AttributeTable parse_attributes(std::istream& in, std::string_view aspect,
                                       DelimiterConfig format = {}) {
  constexpr std::string_view what = "attributes file";
  if (aspect.empty()) throw ConfigError("attribute aspect label must be non-empty");
  AttributeTable table;
  std::string line;
  if (!csv::read_line(in, line)) throw InputError(std::string(what) + ": missing header row");
  const csv::Header header(csv::split(line, format.delimiter));
  const std::size_t c_account = header.require("account_id", what);
  const std::size_t c_dim = header.require("dimension", what);
  const std::size_t c_value = header.require("value", what);
  const std::size_t width = header.names().size();

  std::map<std::pair<std::string, std::string>, std::size_t> slot;
  std::size_t lineno = 1;
  while (csv::read_line(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = csv::split(line, format.delimiter);
    if (fields.size() != width) {
      table.skipped.push_back({lineno, std::string(row_issue::kFieldCount),
                               "expected " + std::to_string(width) + " fields, found " +
                                   std::to_string(fields.size())});
      continue;
    }
    if (fields[c_account].empty() || fields[c_dim].empty()) {
      table.skipped.push_back({lineno, std::string(row_issue::kEmptyField),
                               "account_id and dimension must be non-empty"});
      continue;
    }
    const auto value = parse_double(fields[c_value]);
    if (!value || !std::isfinite(*value)) {
      table.skipped.push_back(
          {lineno, std::string(row_issue::kBadValue), "cannot parse '" + fields[c_value] + "'"});
      continue;
    }
    if (*value < 0.0) {
      table.skipped.push_back({lineno, std::string(row_issue::kNegativeValue),
                               "value " + fields[c_value] + " is negative"});
      continue;
    }
    ++table.rows_accepted;
    auto key = std::make_pair(fields[c_account], fields[c_dim]);
    auto [it, inserted] = slot.try_emplace(std::move(key), table.records.size());
    if (inserted) {
      table.records.push_back({it->first.first, std::string(aspect), it->first.second, *value});
    } else {
      table.records[it->second].value += *value;
    }
  }
  return table;
}

inline void write_interactions(std::ostream& out, const std::vector<InteractionRecord>& records,
                               DelimiterConfig format = {}) {
  const bool with_time = std::any_of(records.begin(), records.end(),
                                     [](const auto& r) { return r.timestamp.has_value(); });
  std::vector<std::string> header{"post_id", "author_id", "target_id", "interaction_type"};
  if (with_time) header.emplace_back("timestamp");
  csv::write_row(out, header, format.delimiter);
  for (const auto& r : records) {
    std::vector<std::string> row{r.post_id, r.author_id, r.target_id, r.interaction_type};
    if (with_time) row.push_back(r.timestamp ? format_timestamp(*r.timestamp) : std::string{});
    csv::write_row(out, row, format.delimiter);
  }
}

inline void write_attributes(std::ostream& out, const std::vector<AttributeRecord>& records,
                             DelimiterConfig format = {}) {
  csv::write_row(out, {"account_id", "dimension", "value"}, format.delimiter);
  for (const auto& r : records) {
    csv::write_row(out, {r.account_id, r.dimension, format_exact(r.value)}, format.delimiter);
  }
}

struct ValidationReport {
  std::size_t rows = 0;  // accepted + skipped
  std::size_t accepted = 0;
  std::size_t skipped = 0;
  std::map<std::string, std::size_t> skipped_by_reason;
  std::size_t distinct_authors = 0;
  std::size_t distinct_targets = 0;
  std::size_t distinct_accounts = 0;  // authors and targets together
  std::size_t distinct_types = 0;
  double timestamp_coverage = 0.0;    // fraction of accepted rows with a timestamp
};

inline ValidationReport validation_report(const std::vector<InteractionRecord>& records,
                                          const std::vector<SkippedRow>& skipped = {}) {
  ValidationReport rep;
  rep.accepted = records.size();
  rep.skipped = skipped.size();
  rep.rows = rep.accepted + rep.skipped;
  for (const auto& s : skipped) ++rep.skipped_by_reason[s.reason];
  std::set<std::string_view> authors, targets, accounts, types;
  std::size_t timed = 0;
  for (const auto& r : records) {
    authors.insert(r.author_id);
    targets.insert(r.target_id);
    accounts.insert(r.author_id);
    accounts.insert(r.target_id);
    types.insert(r.interaction_type);
    if (r.timestamp) ++timed;
  }
  rep.distinct_authors = authors.size();
  rep.distinct_targets = targets.size();
  rep.distinct_accounts = accounts.size();
  rep.distinct_types = types.size();
  rep.timestamp_coverage =
      records.empty() ? 0.0 : static_cast<double>(timed) / static_cast<double>(records.size());
  return rep;
}

inline ValidationReport validation_report(const InteractionTable& table) {
  return validation_report(table.records, table.skipped);
}

inline ValidationReport validation_report(const AttributeTable& table) {
  ValidationReport rep;
  rep.accepted = table.rows_accepted;
  rep.skipped = table.skipped.size();
  rep.rows = rep.accepted + rep.skipped;
  for (const auto& s : table.skipped) ++rep.skipped_by_reason[s.reason];
  std::set<std::string_view> accounts;
  for (const auto& r : table.records) accounts.insert(r.account_id);
  rep.distinct_accounts = accounts.size();
  rep.distinct_authors = accounts.size();
  return rep;
}

}  // namespace practice_map
