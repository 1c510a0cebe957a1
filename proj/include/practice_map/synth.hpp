#pragma once

// Synthetic polarized scenarios and exhaustive reference computations used
// to check the optimized paths on small inputs.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "practice_map/error.hpp"
#include "practice_map/graph.hpp"
#include "practice_map/ingest.hpp"
#include "practice_map/similarity.hpp"
#include "practice_map/time.hpp"

namespace practice_map {

// Each group supports itself with in_group_type interactions and addresses
// every other group with out_group_type interactions.
struct PolarizedScenario {
  std::vector<int> group_sizes{5, 5};
  std::string in_group_type = "retweet";
  std::string out_group_type = "mention";
  int repetitions = 1;

  void validate() const {
    if (group_sizes.size() < 2) throw ConfigError("scenario needs at least 2 groups");
    for (int s : group_sizes) {
      if (s < 1) throw ConfigError("scenario group sizes must be >= 1");
    }
    if (repetitions < 1) throw ConfigError("scenario repetitions must be >= 1");
    if (in_group_type.empty() || out_group_type.empty()) {
      throw ConfigError("scenario interaction types must be non-empty");
    }
  }
};

// "A", "B", ..., "Z", then "G27", "G28", ...
inline std::string group_label(std::size_t g) {
  if (g < 26) return std::string(1, static_cast<char>('A' + g));
  return "G" + std::to_string(g + 1);
}

inline std::vector<std::vector<std::string>> scenario_groups(const PolarizedScenario& s) {
  std::vector<std::vector<std::string>> groups;
  for (std::size_t g = 0; g < s.group_sizes.size(); ++g) {
    std::vector<std::string> members;
    for (int i = 1; i <= s.group_sizes[g]; ++i) members.push_back(group_label(g) + std::to_string(i));
    groups.push_back(std::move(members));
  }
  return groups;
}

// First synthetic week starts Monday 2024-01-01 12:00 UTC; each account's
// batch of interactions lands one week after the previous account's.
inline std::vector<InteractionRecord> generate_polarized(const PolarizedScenario& s) {
  s.validate();
  using namespace std::chrono;
  const Instant base = Instant{sys_days{year{2024} / January / 1}} + hours{12};
  const auto groups = scenario_groups(s);
  std::vector<InteractionRecord> out;
  std::size_t post = 0;
  std::size_t batch = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const auto& author : groups[g]) {
      const Instant when = base + weeks{static_cast<long long>(batch)};
      for (int rep = 0; rep < s.repetitions; ++rep) {
        for (std::size_t h = 0; h < groups.size(); ++h) {
          const std::string& type = h == g ? s.in_group_type : s.out_group_type;
          for (const auto& target : groups[h]) {
            if (target == author) continue;
            out.push_back({std::to_string(++post), author, target, type, when});
          }
        }
      }
      ++batch;
    }
  }
  return out;
}

// Exhaustive maximum-modularity search over all set partitions, for graphs
// of at most 12 nodes. Modularity is evaluated from a dense adjacency matrix.
inline std::pair<std::vector<int>, double> brute_force_modularity(const PracticeGraph& g,
                                                                  double resolution = 1.0) {
  const std::size_t n = g.node_count();
  if (n > 12) throw MisuseError("brute_force_modularity refuses graphs above 12 nodes");
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (const auto& e : g.edges()) {
    const auto s = *g.index_of(e.source);
    const auto t = *g.index_of(e.target);
    a[s][t] = e.weight;
    a[t][s] = e.weight;
  }
  std::vector<double> k(n, 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k[i] += a[i][j];
    two_m += k[i];
  }
  auto score = [&](const std::vector<int>& p) {
    if (two_m == 0.0) return 0.0;
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (p[i] == p[j]) q += a[i][j] - resolution * k[i] * k[j] / two_m;
      }
    }
    return q / two_m;
  };

  // Restricted growth strings enumerate each set partition exactly once.
  std::vector<int> p(n, 0);
  std::vector<int> best = p;
  double best_q = score(p);
  if (n == 0) return {best, 0.0};
  std::vector<int> prefix_max(n, 0);
  for (;;) {
    std::size_t i = n - 1;
    while (i > 0 && p[i] > prefix_max[i - 1]) --i;
    if (i == 0) break;
    ++p[i];
    prefix_max[i] = std::max(prefix_max[i - 1], p[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      p[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
    const double q = score(p);
    if (q > best_q + 1e-12) {
      best_q = q;
      best = p;
    }
  }
  return {best, best_q};
}

// Naive dense double loop over at most 200 vectors.
inline std::vector<SimilarityEdge> brute_force_pairwise(const VectorMap& vectors,
                                                        double min_weight) {
  if (vectors.size() > 200) throw MisuseError("brute_force_pairwise refuses more than 200 vectors");
  std::map<DimensionKey, std::size_t> dims;
  for (const auto& [account, v] : vectors) {
    for (const auto& [key, value] : v.entries) dims.emplace(key, 0);
  }
  std::size_t next = 0;
  for (auto& [key, idx] : dims) idx = next++;

  std::vector<std::string> ids;
  std::vector<std::vector<double>> dense;
  for (const auto& [account, v] : vectors) {
    if (v.degenerate()) continue;
    std::vector<double> row(dims.size(), 0.0);
    for (const auto& [key, value] : v.entries) row[dims.at(key)] = value;
    ids.push_back(account);
    dense.push_back(std::move(row));
  }
  std::vector<SimilarityEdge> out;
  for (std::size_t j = 0; j < dense.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      long double dot = 0, ni = 0, nj = 0;
      for (std::size_t d = 0; d < dims.size(); ++d) {
        dot += static_cast<long double>(dense[i][d]) * dense[j][d];
        ni += static_cast<long double>(dense[i][d]) * dense[i][d];
        nj += static_cast<long double>(dense[j][d]) * dense[j][d];
      }
      double w = static_cast<double>(dot / (std::sqrt(ni) * std::sqrt(nj)));
      w = std::min(1.0, std::max(0.0, w));
      if (w >= min_weight) out.push_back({ids[j], ids[i], w});
    }
  }
  return out;
}

}  // namespace practice_map
