#pragma once

// Practice vectors: per-account sparse maps from dimension keys to
// non-negative activity values, one vector per (account, aspect).
//
// An interaction dimension is the pair (counterparty, interaction type),
// rendered as "<counterparty> <type>". Attribute dimensions use the raw
// attribute label. Keys carry a block tag: the empty block for ordinary
// vectors, "out"/"in" for combined-direction vectors, and the aspect label
// inside composite vectors. Normalization divides each block by its own sum.

#include <cmath>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "practice_map/error.hpp"
#include "practice_map/ingest.hpp"

namespace practice_map {

enum class Direction { outgoing, incoming, combined };

inline std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::outgoing: return "outgoing";
    case Direction::incoming: return "incoming";
    case Direction::combined: return "combined";
  }
  return "outgoing";
}

inline Direction direction_from_string(std::string_view s) {
  if (s == "outgoing" || s == "out") return Direction::outgoing;
  if (s == "incoming" || s == "in") return Direction::incoming;
  if (s == "combined" || s == "both") return Direction::combined;
  throw ConfigError("unknown direction mode '" + std::string(s) +
                    "' (expected outgoing, incoming or combined)");
}

inline constexpr std::string_view kOutgoingBlock = "out";
inline constexpr std::string_view kIncomingBlock = "in";
inline constexpr std::string_view kInteractionsAspect = "interactions";

struct DimensionKey {
  std::string block;
  std::string label;

  friend auto operator<=>(const DimensionKey&, const DimensionKey&) = default;
  friend bool operator==(const DimensionKey&, const DimensionKey&) = default;
};

inline std::string interaction_dimension(std::string_view counterparty, std::string_view type) {
  std::string key;
  key.reserve(counterparty.size() + type.size() + 1);
  key.append(counterparty).append(" ").append(type);
  return key;
}

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct PracticeVector {
  std::string account_id;
  std::string aspect;
  Direction direction = Direction::outgoing;
  std::map<DimensionKey, double> entries;
  double total = 0.0;  // raw entry sum, kept through normalization
  bool normalized = false;

  bool degenerate() const { return entries.empty(); }

  // Sum of the current entry values per block.
  std::map<std::string, double> block_sums() const {
    std::map<std::string, CompensatedSum> acc;
    for (const auto& [key, value] : entries) acc[key.block].add(value);
    std::map<std::string, double> out;
    for (const auto& [block, s] : acc) out.emplace(block, s.value());
    return out;
  }

  friend bool operator==(const PracticeVector&, const PracticeVector&) = default;
};

// Vectors keyed and ordered by account id.
using VectorMap = std::map<std::string, PracticeVector>;

struct InteractionVectorOptions {
  Direction direction = Direction::outgoing;
  std::optional<std::set<std::string>> type_filter;  // nullopt keeps every type
  bool include_self = true;
  std::string aspect = std::string(kInteractionsAspect);
};

namespace detail {

inline void add_entry(VectorMap& out, const std::string& account, const InteractionVectorOptions& opt,
                      std::string_view block, std::string_view counterparty,
                      std::string_view type) {
  auto [it, inserted] = out.try_emplace(account);
  PracticeVector& v = it->second;
  if (inserted) {
    v.account_id = account;
    v.aspect = opt.aspect;
    v.direction = opt.direction;
  }
  v.entries[DimensionKey{std::string(block), interaction_dimension(counterparty, type)}] += 1.0;
  v.total += 1.0;
}

}  // namespace detail

inline VectorMap accumulate_interaction_vectors(const std::vector<InteractionRecord>& records,
                                                const InteractionVectorOptions& options = {}) {
  VectorMap out;
  for (const auto& r : records) {
    if (options.type_filter && !options.type_filter->contains(r.interaction_type)) continue;
    if (!options.include_self && r.author_id == r.target_id) continue;
    switch (options.direction) {
      case Direction::outgoing:
        detail::add_entry(out, r.author_id, options, "", r.target_id, r.interaction_type);
        break;
      case Direction::incoming:
        detail::add_entry(out, r.target_id, options, "", r.author_id, r.interaction_type);
        break;
      case Direction::combined:
        detail::add_entry(out, r.author_id, options, kOutgoingBlock, r.target_id,
                          r.interaction_type);
        detail::add_entry(out, r.target_id, options, kIncomingBlock, r.author_id,
                          r.interaction_type);
        break;
    }
  }
  return out;
}

inline VectorMap accumulate_attribute_vectors(const std::vector<AttributeRecord>& records) {
  VectorMap out;
  const std::string* aspect = nullptr;
  for (const auto& r : records) {
    if (aspect == nullptr) {
      aspect = &r.aspect;
    } else if (r.aspect != *aspect) {
      throw InputError("attribute records mix aspects '" + *aspect + "' and '" + r.aspect + "'");
    }
    if (r.value < 0.0 || !std::isfinite(r.value)) {
      throw InputError("attribute value for " + r.account_id + " must be finite and >= 0");
    }
    auto [it, inserted] = out.try_emplace(r.account_id);
    PracticeVector& v = it->second;
    if (inserted) {
      v.account_id = r.account_id;
      v.aspect = r.aspect;
      v.direction = Direction::outgoing;
    }
    if (r.value > 0.0) v.entries[DimensionKey{"", r.dimension}] += r.value;
  }
  for (auto& [account, v] : out) {
    CompensatedSum s;
    for (const auto& [key, value] : v.entries) s.add(value);
    v.total = s.value();
  }
  return out;
}

inline PracticeVector normalize(const PracticeVector& raw) {
  if (raw.normalized) {
    throw MisuseError("vector for " + raw.account_id + " (" + raw.aspect + ") is already normalized");
  }
  PracticeVector out = raw;
  out.normalized = true;
  const auto sums = raw.block_sums();
  for (auto it = out.entries.begin(); it != out.entries.end();) {
    const double sum = sums.at(it->first.block);
    if (sum > 0.0 && it->second > 0.0) {
      it->second /= sum;
      ++it;
    } else {
      it = out.entries.erase(it);
    }
  }
  return out;
}

inline VectorMap normalize_all(const VectorMap& raw) {
  VectorMap out;
  for (const auto& [account, v] : raw) out.emplace_hint(out.end(), account, normalize(v));
  return out;
}

struct ActivityThreshold {
  double min_total = 0.0;

  explicit ActivityThreshold(double min = 0.0) : min_total(min) {
    if (!(min_total >= 0.0) || !std::isfinite(min_total)) {
      throw ConfigError("activity threshold must be a finite value >= 0");
    }
  }
};

struct ActivityFilterResult {
  VectorMap retained;
  std::vector<std::string> dropped;
};

inline ActivityFilterResult filter_by_activity(const VectorMap& vectors, ActivityThreshold threshold) {
  ActivityFilterResult out;
  for (const auto& [account, v] : vectors) {
    if (v.total >= threshold.min_total) {
      out.retained.emplace_hint(out.retained.end(), account, v);
    } else {
      out.dropped.push_back(account);
    }
  }
  return out;
}

// Splits off zero-total vectors, which have no defined cosine.
inline std::vector<std::string> remove_degenerate(VectorMap& vectors) {
  std::vector<std::string> removed;
  for (auto it = vectors.begin(); it != vectors.end();) {
    if (it->second.degenerate()) {
      removed.push_back(it->first);
      it = vectors.erase(it);
    } else {
      ++it;
    }
  }
  return removed;
}

}  // namespace practice_map
