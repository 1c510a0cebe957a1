#pragma once

// Cluster-level analytics over the original directed interactions:
// E-I indices, per-bin contribution series and the most frequent targets
// of a set of accounts.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "practice_map/error.hpp"
#include "practice_map/graph.hpp"
#include "practice_map/ingest.hpp"
#include "practice_map/time.hpp"

namespace practice_map {

inline constexpr std::string_view kAllTypes = "all";

struct EIIndexValue {
  int cluster = 0;
  std::string type = std::string(kAllTypes);
  std::size_t external = 0;
  std::size_t internal = 0;
  std::optional<double> value;  // nullopt when the cluster has no matching interactions
};

// Tallies interactions authored by members of `cluster`. A record is
// internal when its target belongs to the same cluster and external
// otherwise, including targets that carry no cluster at all.
inline EIIndexValue ei_index(const std::vector<InteractionRecord>& records,
                             const ClusterAssignment& assignment, int cluster,
                             const std::optional<std::string>& type_filter = std::nullopt) {
  EIIndexValue out;
  out.cluster = cluster;
  out.type = type_filter.value_or(std::string(kAllTypes));
  for (const auto& r : records) {
    if (type_filter && r.interaction_type != *type_filter) continue;
    if (assignment.cluster_of(r.author_id) != cluster) continue;
    if (assignment.cluster_of(r.target_id) == cluster) {
      ++out.internal;
    } else {
      ++out.external;
    }
  }
  const std::size_t n = out.external + out.internal;
  if (n > 0) {
    out.value = (static_cast<double>(out.external) - static_cast<double>(out.internal)) /
                static_cast<double>(n);
  }
  return out;
}

// Every cluster against every observed type plus the all-types tally.
inline std::vector<EIIndexValue> ei_index_table(const std::vector<InteractionRecord>& records,
                                                const ClusterAssignment& assignment) {
  std::set<std::string> types;
  for (const auto& r : records) types.insert(r.interaction_type);
  std::set<int> clusters;
  for (const auto& [account, c] : assignment.cluster) clusters.insert(c);

  std::vector<EIIndexValue> out;
  for (int c : clusters) {
    for (const auto& t : types) out.push_back(ei_index(records, assignment, c, t));
    out.push_back(ei_index(records, assignment, c));
  }
  return out;
}

struct TemporalBin {
  Instant start;
  std::size_t count = 0;
  double share = 0.0;  // count / all posts in the bin
};

struct TemporalSeries {
  std::optional<int> cluster;  // nullopt = accounts outside the assignment
  std::vector<TemporalBin> bins;
};

inline constexpr std::chrono::seconds kOneWeek{7 * 24 * 3600};

// Distinct posts per bin and cluster. A post is attributed to the author and
// timestamp of its first record. Bins without posts for a series are omitted.
inline std::vector<TemporalSeries> temporal_contributions(
    const std::vector<InteractionRecord>& records, const ClusterAssignment& assignment,
    std::chrono::seconds bin_width = kOneWeek) {
  if (bin_width.count() <= 0) throw ConfigError("temporal bin width must be positive");
  std::unordered_set<std::string_view> seen;
  // key: (cluster or -1, bin start)
  std::map<std::pair<int, Instant>, std::size_t> counts;
  std::map<Instant, std::size_t> bin_totals;
  for (const auto& r : records) {
    if (!r.timestamp) {
      throw InputError("temporal contributions need a timestamp on every interaction (post " +
                       r.post_id +
                       " has none); add a timestamp column or disable temporal output");
    }
    if (!seen.insert(r.post_id).second) continue;
    const Instant bin = bin_start(*r.timestamp, bin_width);
    const int c = assignment.cluster_of(r.author_id).value_or(-1);
    ++counts[{c, bin}];
    ++bin_totals[bin];
  }

  std::map<int, TemporalSeries> by_cluster;
  for (const auto& [key, n] : counts) {
    auto& s = by_cluster[key.first];
    if (key.first >= 0) s.cluster = key.first;
    s.bins.push_back({key.second, n,
                      static_cast<double>(n) / static_cast<double>(bin_totals.at(key.second))});
  }
  std::vector<TemporalSeries> out;
  for (auto& [c, s] : by_cluster) {
    if (c >= 0) out.push_back(std::move(s));
  }
  if (auto it = by_cluster.find(-1); it != by_cluster.end()) out.push_back(std::move(it->second));
  return out;
}

struct TargetCount {
  std::string target;
  std::size_t count = 0;

  friend bool operator==(const TargetCount&, const TargetCount&) = default;
};

// Interaction type (or "all") -> ranked targets.
using TargetReport = std::map<std::string, std::vector<TargetCount>>;

inline TargetReport top_targets(const std::vector<InteractionRecord>& records,
                                const std::set<std::string>& accounts, std::size_t k,
                                bool per_type = true) {
  std::map<std::string, std::map<std::string, std::size_t>> tallies;
  if (accounts.empty()) return {};
  for (const auto& r : records) {
    if (!accounts.contains(r.author_id)) continue;
    ++tallies[per_type ? r.interaction_type : std::string(kAllTypes)][r.target_id];
  }
  TargetReport out;
  for (const auto& [type, counts] : tallies) {
    std::vector<TargetCount> ranked;
    for (const auto& [target, n] : counts) ranked.push_back({target, n});
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const TargetCount& a, const TargetCount& b) { return a.count > b.count; });
    if (ranked.size() > k) ranked.resize(k);
    out.emplace(type, std::move(ranked));
  }
  return out;
}

// Top targets of each cluster's archetype accounts.
inline std::map<int, TargetReport> cluster_top_targets(const std::vector<InteractionRecord>& records,
                                                       const ArchetypeReport& archetypes,
                                                       std::size_t k, bool per_type = true) {
  std::map<int, TargetReport> out;
  for (const auto& [c, ranked] : archetypes) {
    std::set<std::string> accounts;
    for (const auto& a : ranked) accounts.insert(a.account);
    out.emplace(c, top_targets(records, accounts, k, per_type));
  }
  return out;
}

struct NodeColor {
  std::string id;
  int cluster = 0;
};

// Node table for joining cluster labels onto the original directed network.
inline std::vector<NodeColor> cluster_backprojection(const ClusterAssignment& assignment) {
  std::vector<NodeColor> out;
  out.reserve(assignment.cluster.size());
  for (const auto& [account, c] : assignment.cluster) out.push_back({account, c});
  return out;
}

}  // namespace practice_map
