#pragma once

// Delimited-text exchange formats between pipeline stages. Every file has a
// fixed header; readers reject files whose header differs.
//
//   vectors.csv     Account,Aspect,Direction,Block,Dimension,Raw,Normalized,Total
//   edges.csv       Source,Target,Weight                (Gephi edge table)
//   clusters.csv    Id,Cluster,IntraClusterWeightedDegree (Gephi node table)
//   nodes.csv       Id,Cluster
//   archetypes.csv  Cluster,Rank,Id,IntraClusterWeightedDegree
//   ei_index.csv    Cluster,Type,External,Internal,EIIndex
//   temporal.csv    BinStart,Cluster,Count,Share
//   targets.csv     Cluster,Type,Target,Count

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "practice_map/csv.hpp"
#include "practice_map/error.hpp"
#include "practice_map/graph.hpp"
#include "practice_map/metrics.hpp"
#include "practice_map/similarity.hpp"
#include "practice_map/vectorize.hpp"

namespace practice_map {

inline constexpr int kWeightDecimals = 6;

namespace headers {
inline const std::vector<std::string> kVectors{"Account", "Aspect",     "Direction",
                                               "Block",   "Dimension",  "Raw",
                                               "Normalized", "Total"};
inline const std::vector<std::string> kEdges{"Source", "Target", "Weight"};
inline const std::vector<std::string> kClusters{"Id", "Cluster", "IntraClusterWeightedDegree"};
inline const std::vector<std::string> kNodes{"Id", "Cluster"};
inline const std::vector<std::string> kArchetypes{"Cluster", "Rank", "Id",
                                                  "IntraClusterWeightedDegree"};
inline const std::vector<std::string> kEIIndex{"Cluster", "Type", "External", "Internal",
                                               "EIIndex"};
inline const std::vector<std::string> kTemporal{"BinStart", "Cluster", "Count", "Share"};
inline const std::vector<std::string> kTargets{"Cluster", "Type", "Target", "Count"};
}  // namespace headers

inline constexpr std::string_view kUnclustered = "unclustered";
inline constexpr std::string_view kUndefined = "NA";

// The weight as it appears in edges.csv, parsed back.
inline double exported_weight(double w) { return *parse_double(format_fixed(w, kWeightDecimals)); }

inline std::vector<SimilarityEdge> exported_edges(std::vector<SimilarityEdge> edges) {
  for (auto& e : edges) e.weight = exported_weight(e.weight);
  return edges;
}

namespace detail {

template <typename RowFn>
void read_rows(std::istream& in, const std::vector<std::string>& expected, std::string_view what,
               char delim, RowFn on_row) {
  std::string line;
  if (!csv::read_line(in, line)) throw InputError(std::string(what) + ": empty file");
  csv::expect_header(csv::split(line, delim), expected, what);
  std::size_t lineno = 1;
  while (csv::read_line(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = csv::split(line, delim);
    if (fields.size() != expected.size()) {
      throw InputError(std::string(what) + ": line " + std::to_string(lineno) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(expected.size()));
    }
    on_row(fields, lineno);
  }
}

inline double field_double(const std::string& s, std::string_view what, std::size_t line) {
  if (auto v = parse_double(s)) return *v;
  throw InputError(std::string(what) + ": line " + std::to_string(line) + ": bad number '" + s + "'");
}

template <typename Int>
Int field_int(const std::string& s, std::string_view what, std::size_t line) {
  if (auto v = parse_int<Int>(s)) return *v;
  throw InputError(std::string(what) + ": line " + std::to_string(line) + ": bad integer '" + s + "'");
}

}  // namespace detail

// Raw vectors by aspect. A degenerate vector is written as one row with an
// empty dimension so that it survives the round trip.
inline void write_vectors(std::ostream& out, const std::map<std::string, VectorMap>& raw,
                          DelimiterConfig format = {}) {
  const char d = format.delimiter;
  csv::write_row(out, headers::kVectors, d);
  for (const auto& [aspect, vectors] : raw) {
    for (const auto& [account, v] : vectors) {
      if (v.normalized) throw MisuseError("write_vectors expects raw vectors");
      const std::string dir(to_string(v.direction));
      const std::string total = format_exact(v.total);
      if (v.degenerate()) {
        csv::write_row(out, {account, aspect, dir, "", "", "0", "0", total}, d);
        continue;
      }
      const PracticeVector norm = normalize(v);
      for (const auto& [key, value] : v.entries) {
        csv::write_row(out,
                       {account, aspect, dir, key.block, key.label, format_exact(value),
                        format_exact(norm.entries.at(key)), total},
                       d);
      }
    }
  }
}

inline std::map<std::string, VectorMap> read_vectors(std::istream& in, DelimiterConfig format = {}) {
  constexpr std::string_view what = "vectors file";
  std::map<std::string, VectorMap> out;
  detail::read_rows(in, headers::kVectors, what, format.delimiter,
                    [&](std::vector<std::string>& f, std::size_t line) {
                      auto& vectors = out[f[1]];
                      auto [it, inserted] = vectors.try_emplace(f[0]);
                      PracticeVector& v = it->second;
                      if (inserted) {
                        v.account_id = f[0];
                        v.aspect = f[1];
                        v.direction = direction_from_string(f[2]);
                        v.total = detail::field_double(f[7], what, line);
                      }
                      if (f[4].empty()) return;
                      const double raw = detail::field_double(f[5], what, line);
                      if (raw < 0.0) throw InputError(std::string(what) + ": negative raw value");
                      if (!v.entries.emplace(DimensionKey{f[3], f[4]}, raw).second) {
                        throw InputError(std::string(what) + ": line " + std::to_string(line) +
                                         ": duplicate dimension for " + f[0]);
                      }
                    });
  return out;
}

inline void write_edges(std::ostream& out, const std::vector<SimilarityEdge>& edges,
                        DelimiterConfig format = {}) {
  csv::write_row(out, headers::kEdges, format.delimiter);
  for (const auto& e : edges) {
    csv::write_row(out, {e.source, e.target, format_fixed(e.weight, kWeightDecimals)},
                   format.delimiter);
  }
}

inline std::vector<SimilarityEdge> read_edges(std::istream& in, DelimiterConfig format = {}) {
  constexpr std::string_view what = "edges file";
  std::vector<SimilarityEdge> out;
  detail::read_rows(in, headers::kEdges, what, format.delimiter,
                    [&](std::vector<std::string>& f, std::size_t line) {
                      out.push_back({std::move(f[0]), std::move(f[1]),
                                     detail::field_double(f[2], what, line)});
                    });
  return out;
}

inline void write_clusters(std::ostream& out, const ClusterAssignment& a,
                           const std::map<std::string, double>& degrees,
                           DelimiterConfig format = {}) {
  csv::write_row(out, headers::kClusters, format.delimiter);
  for (const auto& [account, c] : a.cluster) {
    auto it = degrees.find(account);
    const double deg = it == degrees.end() ? 0.0 : it->second;
    csv::write_row(out, {account, std::to_string(c), format_fixed(deg, kWeightDecimals)},
                   format.delimiter);
  }
}

inline ClusterAssignment read_clusters(std::istream& in, DelimiterConfig format = {}) {
  constexpr std::string_view what = "clusters file";
  ClusterAssignment a;
  std::set<int> ids;
  detail::read_rows(in, headers::kClusters, what, format.delimiter,
                    [&](std::vector<std::string>& f, std::size_t line) {
                      const int c = detail::field_int<int>(f[1], what, line);
                      if (c < 0) throw InputError(std::string(what) + ": negative cluster id");
                      if (!a.cluster.emplace(f[0], c).second) {
                        throw InputError(std::string(what) + ": duplicate id " + f[0]);
                      }
                      ids.insert(c);
                    });
  a.cluster_count = static_cast<int>(ids.size());
  return a;
}

inline void write_node_table(std::ostream& out, const std::vector<NodeColor>& rows,
                             DelimiterConfig format = {}) {
  csv::write_row(out, headers::kNodes, format.delimiter);
  for (const auto& r : rows) csv::write_row(out, {r.id, std::to_string(r.cluster)}, format.delimiter);
}

inline void write_archetypes(std::ostream& out, const ArchetypeReport& report,
                             DelimiterConfig format = {}) {
  csv::write_row(out, headers::kArchetypes, format.delimiter);
  for (const auto& [c, ranked] : report) {
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      csv::write_row(out,
                     {std::to_string(c), std::to_string(i + 1), ranked[i].account,
                      format_fixed(ranked[i].degree, kWeightDecimals)},
                     format.delimiter);
    }
  }
}

inline ArchetypeReport read_archetypes(std::istream& in, DelimiterConfig format = {}) {
  constexpr std::string_view what = "archetypes file";
  ArchetypeReport report;
  detail::read_rows(in, headers::kArchetypes, what, format.delimiter,
                    [&](std::vector<std::string>& f, std::size_t line) {
                      const int c = detail::field_int<int>(f[0], what, line);
                      report[c].push_back({f[2], detail::field_double(f[3], what, line)});
                    });
  return report;
}

inline void write_ei_index(std::ostream& out, const std::vector<EIIndexValue>& values,
                           DelimiterConfig format = {}) {
  csv::write_row(out, headers::kEIIndex, format.delimiter);
  for (const auto& v : values) {
    csv::write_row(out,
                   {std::to_string(v.cluster), v.type, std::to_string(v.external),
                    std::to_string(v.internal),
                    v.value ? format_fixed(*v.value, kWeightDecimals) : std::string(kUndefined)},
                   format.delimiter);
  }
}

// Rows ordered by bin, then cluster, with unclustered accounts last.
inline void write_temporal(std::ostream& out, const std::vector<TemporalSeries>& series,
                           DelimiterConfig format = {}) {
  csv::write_row(out, headers::kTemporal, format.delimiter);
  std::map<Instant, std::vector<std::vector<std::string>>> rows;
  for (const auto& s : series) {
    const std::string label = s.cluster ? std::to_string(*s.cluster) : std::string(kUnclustered);
    for (const auto& b : s.bins) {
      rows[b.start].push_back({format_timestamp(b.start), label, std::to_string(b.count),
                               format_fixed(b.share, kWeightDecimals)});
    }
  }
  for (const auto& [start, list] : rows) {
    for (const auto& r : list) csv::write_row(out, r, format.delimiter);
  }
}

inline void write_targets(std::ostream& out, const std::map<int, TargetReport>& reports,
                          DelimiterConfig format = {}) {
  csv::write_row(out, headers::kTargets, format.delimiter);
  for (const auto& [c, report] : reports) {
    for (const auto& [type, ranked] : report) {
      for (const auto& t : ranked) {
        csv::write_row(out, {std::to_string(c), type, t.target, std::to_string(t.count)},
                       format.delimiter);
      }
    }
  }
}

}  // namespace practice_map
