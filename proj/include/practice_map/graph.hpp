#pragma once

// Undirected practice network, Louvain clustering and archetype ranking.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "practice_map/error.hpp"
#include "practice_map/similarity.hpp"

namespace practice_map {

struct Neighbor {
  std::uint32_t node;
  double weight;
};

class PracticeGraph {
 public:
  PracticeGraph() = default;

  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<SimilarityEdge>& edges() const { return edges_; }
  const std::vector<Neighbor>& neighbors(std::size_t node) const { return adjacency_[node]; }

  std::optional<std::size_t> index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  double total_weight() const {
    CompensatedSum s;
    for (const auto& e : edges_) s.add(e.weight);
    return s.value();
  }

  friend PracticeGraph build_graph(const std::vector<SimilarityEdge>&, const std::set<std::string>&);

 private:
  std::vector<std::string> nodes_;  // sorted by id
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<SimilarityEdge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;  // each list sorted by neighbor index
};

// Node set is exactly all_accounts, so accounts without edges stay as
// isolated nodes. Every edge endpoint must be listed there.
inline PracticeGraph build_graph(const std::vector<SimilarityEdge>& edges,
                                 const std::set<std::string>& all_accounts) {
  PracticeGraph g;
  g.nodes_.assign(all_accounts.begin(), all_accounts.end());
  for (std::size_t i = 0; i < g.nodes_.size(); ++i) g.index_.emplace(g.nodes_[i], i);
  g.adjacency_.resize(g.nodes_.size());

  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  g.edges_.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.source == e.target) throw InputError("self-loop edge on " + e.source);
    if (!(e.weight >= 0.0 && e.weight <= 1.0 + 1e-9)) {
      throw InputError("edge " + e.source + " - " + e.target + " has weight outside [0, 1]");
    }
    const auto s = g.index_of(e.source);
    const auto t = g.index_of(e.target);
    if (!s || !t) {
      throw InputError("edge " + e.source + " - " + e.target + " references an unknown account");
    }
    const auto a = static_cast<std::uint32_t>(std::min(*s, *t));
    const auto b = static_cast<std::uint32_t>(std::max(*s, *t));
    if (!seen.emplace(a, b).second) {
      throw InputError("duplicate edge " + e.source + " - " + e.target);
    }
    const double w = std::min(e.weight, 1.0);
    g.edges_.push_back({e.source, e.target, w});
    g.adjacency_[a].push_back({b, w});
    g.adjacency_[b].push_back({a, w});
  }
  for (auto& list : g.adjacency_) {
    std::sort(list.begin(), list.end(),
              [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });
  }
  return g;
}

inline PracticeGraph build_graph(const std::vector<SimilarityEdge>& edges) {
  std::set<std::string> accounts;
  for (const auto& e : edges) {
    accounts.insert(e.source);
    accounts.insert(e.target);
  }
  return build_graph(edges, accounts);
}

struct ClusterAssignment {
  std::map<std::string, int> cluster;  // account -> dense cluster id from 0
  int cluster_count = 0;
  double modularity = 0.0;
  double resolution = 1.0;
  std::uint64_t seed = 0;
  std::vector<double> modularity_trace;  // after each aggregation level

  std::optional<int> cluster_of(const std::string& account) const {
    auto it = cluster.find(account);
    if (it == cluster.end()) return std::nullopt;
    return it->second;
  }

  std::map<int, std::vector<std::string>> members() const {
    std::map<int, std::vector<std::string>> out;
    for (const auto& [account, c] : cluster) out[c].push_back(account);
    return out;
  }
};

// Q = 1/(2m) * sum_ij [A_ij - resolution * k_i k_j / (2m)] delta(c_i, c_j).
// An edgeless graph has modularity 0.
inline double modularity(const PracticeGraph& g, const std::vector<int>& membership,
                         double resolution = 1.0) {
  const double m = g.total_weight();
  if (!(m > 0.0)) return 0.0;
  std::map<int, CompensatedSum> internal, degree;
  for (std::size_t u = 0; u < g.node_count(); ++u) {
    for (const auto& nb : g.neighbors(u)) {
      degree[membership[u]].add(nb.weight);
      if (membership[nb.node] == membership[u]) internal[membership[u]].add(nb.weight);
    }
  }
  CompensatedSum q;
  for (const auto& [c, d] : degree) {
    const double tot = d.value() / (2.0 * m);
    const double in = internal.count(c) ? internal.at(c).value() / (2.0 * m) : 0.0;
    q.add(in - resolution * tot * tot);
  }
  return q.value();
}

inline double modularity(const PracticeGraph& g, const ClusterAssignment& a) {
  std::vector<int> membership(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) membership[i] = a.cluster.at(g.nodes()[i]);
  return modularity(g, membership, a.resolution);
}

struct LouvainOptions {
  double resolution = 1.0;
  std::uint64_t seed = 0;
  double min_gain = 1e-9;  // modularity units
  int max_sweeps = 1000;   // per level
};

namespace detail {

// Weighted graph over dense node ids; self_loop[i] holds A_ii.
struct LevelGraph {
  std::vector<std::vector<Neighbor>> adj;  // excludes self loops
  std::vector<double> self_loop;
  std::vector<double> degree;  // k_i = sum_j A_ij, self loop included
};

inline LevelGraph level_from(const PracticeGraph& g) {
  LevelGraph lg;
  const std::size_t n = g.node_count();
  lg.adj.resize(n);
  lg.self_loop.assign(n, 0.0);
  lg.degree.assign(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    lg.adj[u] = g.neighbors(u);
    CompensatedSum k;
    for (const auto& nb : lg.adj[u]) k.add(nb.weight);
    lg.degree[u] = k.value();
  }
  return lg;
}

inline LevelGraph aggregate(const LevelGraph& lg, const std::vector<int>& community, int count) {
  LevelGraph out;
  out.adj.resize(count);
  out.self_loop.assign(count, 0.0);
  out.degree.assign(count, 0.0);
  std::vector<std::map<int, double>> links(count);
  for (std::size_t u = 0; u < lg.adj.size(); ++u) {
    const int cu = community[u];
    out.self_loop[cu] += lg.self_loop[u];
    out.degree[cu] += lg.degree[u];
    for (const auto& nb : lg.adj[u]) {
      const int cv = community[nb.node];
      if (cu == cv) {
        out.self_loop[cu] += nb.weight;
      } else {
        links[cu][cv] += nb.weight;
      }
    }
  }
  for (int c = 0; c < count; ++c) {
    for (const auto& [d, w] : links[c]) out.adj[c].push_back({static_cast<std::uint32_t>(d), w});
  }
  return out;
}

// Renumbers community labels densely in order of first appearance.
inline int renumber(std::vector<int>& community) {
  std::unordered_map<int, int> map;
  for (int& c : community) {
    auto [it, inserted] = map.try_emplace(c, static_cast<int>(map.size()));
    c = it->second;
  }
  return static_cast<int>(map.size());
}

// Local moving phase. Returns true if any node changed community.
inline bool move_nodes(const LevelGraph& lg, std::vector<int>& community, double two_m,
                       const LouvainOptions& opt, std::mt19937_64& rng) {
  const std::size_t n = lg.adj.size();
  std::vector<double> tot(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) tot[community[u]] += lg.degree[u];

  std::vector<double> link(n, 0.0);
  std::vector<int> touched;
  std::vector<int> best;
  const double m = two_m / 2.0;
  bool any_move = false;

  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    bool moved = false;
    for (std::size_t u = 0; u < n; ++u) {
      const int own = community[u];
      const double k = lg.degree[u];
      touched.clear();
      touched.push_back(own);
      link[own] = 0.0;
      for (const auto& nb : lg.adj[u]) {
        const int c = community[nb.node];
        if (link[c] == 0.0 && std::find(touched.begin(), touched.end(), c) == touched.end()) {
          touched.push_back(c);
        }
        link[c] += nb.weight;
      }
      tot[own] -= k;

      // Gain of inserting u into c, up to the common factor 1/m.
      auto gain = [&](int c) { return link[c] - opt.resolution * tot[c] * k / two_m; };
      const double own_gain = gain(own);
      double best_gain = own_gain;
      for (int c : touched) best_gain = std::max(best_gain, gain(c));

      int target = own;
      if ((best_gain - own_gain) / m > opt.min_gain) {
        const double tie = 1e-12 * std::max(1.0, std::abs(best_gain));
        best.clear();
        for (int c : touched) {
          if (c != own && gain(c) >= best_gain - tie) best.push_back(c);
        }
        std::sort(best.begin(), best.end());
        target = best.size() == 1
                     ? best.front()
                     : best[std::uniform_int_distribution<std::size_t>(0, best.size() - 1)(rng)];
      }
      tot[target] += k;
      for (int c : touched) link[c] = 0.0;
      if (target != own) {
        community[u] = target;
        moved = true;
        any_move = true;
      }
    }
    if (!moved) break;
  }
  return any_move;
}

}  // namespace detail

// Multi-level Louvain modularity optimization. Nodes are visited in
// ascending id order; ties between equally good communities are broken by
// a generator seeded from options.seed. Isolated nodes stay singletons.
inline ClusterAssignment louvain(const PracticeGraph& g, const LouvainOptions& options = {}) {
  if (!(options.resolution > 0.0) || !std::isfinite(options.resolution)) {
    throw ConfigError("Louvain resolution must be a positive finite value");
  }
  ClusterAssignment out;
  out.resolution = options.resolution;
  out.seed = options.seed;
  const std::size_t n = g.node_count();

  std::vector<int> membership(n);
  for (std::size_t i = 0; i < n; ++i) membership[i] = static_cast<int>(i);
  out.modularity_trace.push_back(modularity(g, membership, options.resolution));

  const double two_m = 2.0 * g.total_weight();
  if (two_m > 0.0) {
    std::mt19937_64 rng(options.seed);
    detail::LevelGraph level = detail::level_from(g);
    for (;;) {
      std::vector<int> community(level.adj.size());
      for (std::size_t i = 0; i < community.size(); ++i) community[i] = static_cast<int>(i);
      if (!detail::move_nodes(level, community, two_m, options, rng)) break;
      const int count = detail::renumber(community);
      for (int& c : membership) c = community[c];
      out.modularity_trace.push_back(modularity(g, membership, options.resolution));
      if (count == static_cast<int>(level.adj.size())) break;
      level = detail::aggregate(level, community, count);
    }
  }

  out.cluster_count = detail::renumber(membership);
  for (std::size_t i = 0; i < n; ++i) out.cluster.emplace(g.nodes()[i], membership[i]);
  out.modularity = modularity(g, membership, options.resolution);
  return out;
}

inline ClusterAssignment louvain(const PracticeGraph& g, double resolution) {
  LouvainOptions opt;
  opt.resolution = resolution;
  return louvain(g, opt);
}

// Sum of a node's edge weights to neighbors in its own cluster.
inline std::map<std::string, double> intra_cluster_weighted_degree(const PracticeGraph& g,
                                                                   const ClusterAssignment& a) {
  std::map<std::string, double> out;
  for (std::size_t u = 0; u < g.node_count(); ++u) {
    const int cu = a.cluster.at(g.nodes()[u]);
    CompensatedSum s;
    for (const auto& nb : g.neighbors(u)) {
      if (a.cluster.at(g.nodes()[nb.node]) == cu) s.add(nb.weight);
    }
    out.emplace(g.nodes()[u], s.value());
  }
  return out;
}

struct RankedAccount {
  std::string account;
  double degree = 0.0;

  friend bool operator==(const RankedAccount&, const RankedAccount&) = default;
};

using ArchetypeReport = std::map<int, std::vector<RankedAccount>>;

// The k accounts per cluster with the highest intra-cluster weighted degree,
// ties broken by ascending account id.
inline ArchetypeReport top_archetypes(const std::map<std::string, double>& degrees,
                                      const ClusterAssignment& a, std::size_t k) {
  if (k < 1) throw ConfigError("archetype count k must be >= 1");
  ArchetypeReport report;
  for (const auto& [account, c] : a.cluster) {
    auto it = degrees.find(account);
    report[c].push_back({account, it == degrees.end() ? 0.0 : it->second});
  }
  for (auto& [c, list] : report) {
    std::stable_sort(list.begin(), list.end(), [](const RankedAccount& x, const RankedAccount& y) {
      if (x.degree != y.degree) return x.degree > y.degree;
      return x.account < y.account;
    });
    if (list.size() > k) list.resize(k);
  }
  return report;
}

inline ArchetypeReport top_archetypes(const PracticeGraph& g, const ClusterAssignment& a,
                                      std::size_t k) {
  return top_archetypes(intra_cluster_weighted_degree(g, a), a, k);
}

}  // namespace practice_map
