#pragma once

// Thresholded all-pairs cosine similarity over practice vectors.
//
// Accounts are ordered by id. Every unordered pair is reported once with the
// larger id as source. With a positive threshold an inverted index
// (dimension -> accounts) accumulates approximate dot products so that only
// pairs sharing at least one dimension are scored; candidates near or above
// the threshold are then rescored with the exact merge kernel that
// cosine_similarity() uses, so pruned and unpruned runs emit identical bits.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "practice_map/error.hpp"
#include "practice_map/vectorize.hpp"

namespace practice_map {

struct SimilarityEdge {
  std::string source;
  std::string target;
  double weight = 0.0;

  friend bool operator==(const SimilarityEdge&, const SimilarityEdge&) = default;
};

struct SimilarityThreshold {
  double min_weight = 0.0;

  explicit SimilarityThreshold(double min = 0.0) : min_weight(min) {
    if (!(min_weight >= 0.0 && min_weight <= 1.0)) {
      throw ConfigError("similarity threshold must lie in [0, 1], got " + format_exact(min));
    }
  }
};

using AspectWeights = std::map<std::string, double>;

namespace detail {

inline double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

inline double cosine_from_parts(double dot, double norm2_a, double norm2_b) {
  double denom = std::sqrt(norm2_a * norm2_b);
  if (!std::isfinite(denom) || denom == 0.0) denom = std::sqrt(norm2_a) * std::sqrt(norm2_b);
  return clamp_unit(dot / denom);
}

template <typename It, typename KeyOf, typename ValueOf>
double sorted_dot(It a, It a_end, It b, It b_end, KeyOf key, ValueOf value) {
  CompensatedSum dot;
  while (a != a_end && b != b_end) {
    if (key(*a) < key(*b)) {
      ++a;
    } else if (key(*b) < key(*a)) {
      ++b;
    } else {
      dot.add(value(*a) * value(*b));
      ++a;
      ++b;
    }
  }
  return dot.value();
}

inline double squared_norm(const PracticeVector& v) {
  CompensatedSum s;
  for (const auto& [key, value] : v.entries) s.add(value * value);
  return s.value();
}

}  // namespace detail

inline double cosine_similarity(const PracticeVector& u, const PracticeVector& v) {
  if (u.aspect != v.aspect || u.direction != v.direction) {
    throw MisuseError("cosine_similarity: vectors differ in aspect or direction (" + u.aspect +
                      "/" + std::string(to_string(u.direction)) + " vs " + v.aspect + "/" +
                      std::string(to_string(v.direction)) + ")");
  }
  const double nu = detail::squared_norm(u);
  const double nv = detail::squared_norm(v);
  if (!(nu > 0.0) || !(nv > 0.0)) {
    throw MisuseError("cosine_similarity: undefined for zero-magnitude vector (" +
                      (nu > 0.0 ? v.account_id : u.account_id) + ")");
  }
  const double dot = detail::sorted_dot(
      u.entries.begin(), u.entries.end(), v.entries.begin(), v.entries.end(),
      [](const auto& e) -> const DimensionKey& { return e.first; },
      [](const auto& e) { return e.second; });
  return detail::cosine_from_parts(dot, nu, nv);
}

// Compact, interned form of one aspect's vectors. Dimension ids follow key
// order, so merges visit shared dimensions in the same order as
// cosine_similarity() and produce bit-identical results.
class PreparedVectors {
 public:
  struct Entry {
    std::uint32_t dim;
    double value;
  };

  PreparedVectors() = default;

  explicit PreparedVectors(const VectorMap& vectors) {
    const PracticeVector* first = nullptr;
    std::set<DimensionKey> keys;
    for (const auto& [account, v] : vectors) {
      if (first == nullptr) {
        first = &v;
        aspect_ = v.aspect;
        direction_ = v.direction;
      } else if (v.aspect != first->aspect || v.direction != first->direction) {
        throw MisuseError("pairwise similarity needs one aspect and direction; found " +
                          first->aspect + "/" + std::string(to_string(first->direction)) +
                          " and " + v.aspect + "/" + std::string(to_string(v.direction)));
      }
      for (const auto& [key, value] : v.entries) keys.insert(key);
    }
    std::map<DimensionKey, std::uint32_t> dim_id;
    std::uint32_t next = 0;
    for (const auto& k : keys) dim_id.emplace_hint(dim_id.end(), k, next++);
    dim_count_ = next;

    offsets_.push_back(0);
    for (const auto& [account, v] : vectors) {
      if (v.degenerate()) {
        degenerate_.push_back(account);
        continue;
      }
      index_.emplace(account, ids_.size());
      ids_.push_back(account);
      for (const auto& [key, value] : v.entries) entries_.push_back({dim_id.at(key), value});
      offsets_.push_back(entries_.size());
      norm2_.push_back(detail::squared_norm(v));
    }
  }

  std::size_t size() const { return ids_.size(); }
  std::size_t dimension_count() const { return dim_count_; }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<std::string>& degenerate() const { return degenerate_; }
  const std::string& aspect() const { return aspect_; }

  std::optional<std::size_t> index_of(const std::string& account) const {
    auto it = index_.find(account);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::span<const Entry> row(std::size_t i) const {
    return {entries_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  double norm2(std::size_t i) const { return norm2_[i]; }

  double cosine(std::size_t a, std::size_t b) const {
    const auto ra = row(a);
    const auto rb = row(b);
    const double dot = detail::sorted_dot(
        ra.begin(), ra.end(), rb.begin(), rb.end(), [](const Entry& e) { return e.dim; },
        [](const Entry& e) { return e.value; });
    return detail::cosine_from_parts(dot, norm2_[a], norm2_[b]);
  }

 private:
  std::string aspect_;
  Direction direction_ = Direction::outgoing;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> degenerate_;
  std::vector<std::size_t> offsets_;
  std::vector<Entry> entries_;
  std::vector<double> norm2_;
  std::size_t dim_count_ = 0;
};

struct PairwiseOptions {
  unsigned threads = 0;  // 0 picks the hardware concurrency
  bool prune = true;     // inverted-index candidate generation when threshold > 0
};

struct PairwiseStats {
  std::size_t accounts = 0;       // non-degenerate vectors compared
  std::uint64_t pair_space = 0;   // n(n-1)/2
  std::uint64_t pairs_scored = 0; // pairs passed through the exact kernel
  std::size_t edges = 0;
  std::vector<std::string> degenerate;
};

namespace detail {

inline unsigned worker_count(unsigned requested, std::size_t rows) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(rows, 1)));
}

// Runs body(row, scratch) over rows [0, rows) on a small worker pool.
// Each worker owns one Scratch.
template <typename Scratch, typename Body>
void parallel_rows(std::size_t rows, unsigned threads, const std::function<Scratch()>& make,
                   Body body) {
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    Scratch scratch = make();
    for (std::size_t r = next.fetch_add(1); r < rows; r = next.fetch_add(1)) body(r, scratch);
  };
  const unsigned n = worker_count(threads, rows);
  if (n <= 1) {
    work();
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
}

}  // namespace detail

// Scores the pairs (j, i < j) of prepared vectors and returns, per row j,
// the (i, weight) pairs with weight >= threshold, ordered by i.
inline std::vector<std::vector<std::pair<std::uint32_t, double>>> pairwise_rows(
    const PreparedVectors& pv, SimilarityThreshold threshold, const PairwiseOptions& options,
    std::uint64_t* scored = nullptr) {
  using RowEdges = std::vector<std::pair<std::uint32_t, double>>;
  const std::size_t n = pv.size();
  const double t = threshold.min_weight;
  std::vector<RowEdges> rows(n);
  std::atomic<std::uint64_t> scored_count{0};

  if (t <= 0.0 || !options.prune) {
    struct None {};
    detail::parallel_rows<None>(
        n, options.threads, [] { return None{}; },
        [&](std::size_t j, None&) {
          RowEdges& out = rows[j];
          for (std::size_t i = 0; i < j; ++i) {
            const double w = pv.cosine(i, j);
            if (w >= t) out.emplace_back(static_cast<std::uint32_t>(i), w);
          }
          scored_count.fetch_add(j, std::memory_order_relaxed);
        });
  } else {
    struct Posting {
      std::uint32_t account;
      double value;
    };
    // postings[d] lists (account, value) in ascending account order.
    std::vector<std::vector<Posting>> postings(pv.dimension_count());
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& e : pv.row(i)) postings[e.dim].push_back({static_cast<std::uint32_t>(i), e.value});
    }
    // Rescoring slack: the accumulated dot differs from the exact kernel only
    // by rounding, far below this margin.
    constexpr double kSlack = 1e-9;
    struct Scratch {
      std::vector<double> acc;
      std::vector<char> seen;
      std::vector<std::uint32_t> touched;
    };
    detail::parallel_rows<Scratch>(
        n, options.threads,
        [n] { return Scratch{std::vector<double>(n, 0.0), std::vector<char>(n, 0), {}}; },
        [&](std::size_t j, Scratch& s) {
          for (const auto& e : pv.row(j)) {
            for (const auto& p : postings[e.dim]) {
              if (p.account >= j) break;
              if (!s.seen[p.account]) {
                s.seen[p.account] = 1;
                s.touched.push_back(p.account);
              }
              s.acc[p.account] += e.value * p.value;
            }
          }
          std::sort(s.touched.begin(), s.touched.end());
          RowEdges& out = rows[j];
          std::uint64_t local = 0;
          for (std::uint32_t i : s.touched) {
            const double approx = s.acc[i] / std::sqrt(pv.norm2(i) * pv.norm2(j));
            s.acc[i] = 0.0;
            s.seen[i] = 0;
            if (approx < t - kSlack) continue;
            ++local;
            const double w = pv.cosine(i, j);
            if (w >= t) out.emplace_back(i, w);
          }
          s.touched.clear();
          scored_count.fetch_add(local, std::memory_order_relaxed);
        });
  }
  if (scored) *scored = scored_count.load();
  return rows;
}

inline std::vector<SimilarityEdge> pairwise_similarities(const PreparedVectors& pv,
                                                         SimilarityThreshold threshold,
                                                         const PairwiseOptions& options = {},
                                                         PairwiseStats* stats = nullptr) {
  std::uint64_t scored = 0;
  const auto rows = pairwise_rows(pv, threshold, options, &scored);
  std::vector<SimilarityEdge> edges;
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  edges.reserve(total);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (const auto& [i, w] : rows[j]) edges.push_back({pv.ids()[j], pv.ids()[i], w});
  }
  if (stats) {
    const std::uint64_t n = pv.size();
    stats->accounts = pv.size();
    stats->pair_space = n * (n - (n > 0 ? 1 : 0)) / 2;
    stats->pairs_scored = scored;
    stats->edges = edges.size();
    stats->degenerate = pv.degenerate();
  }
  return edges;
}

// Vectors may be raw or normalized; cosine ignores length. Degenerate
// (empty) vectors are skipped and listed in stats.
inline std::vector<SimilarityEdge> pairwise_similarities(const VectorMap& vectors,
                                                         SimilarityThreshold threshold,
                                                         const PairwiseOptions& options = {},
                                                         PairwiseStats* stats = nullptr) {
  return pairwise_similarities(PreparedVectors(vectors), threshold, options, stats);
}

namespace detail {

inline void validate_weights(const AspectWeights& weights, const std::set<std::string>& aspects) {
  bool any_positive = false;
  for (const auto& [aspect, w] : weights) {
    if (!aspects.contains(aspect)) {
      throw ConfigError("weight given for unknown aspect '" + aspect + "'");
    }
    if (!std::isfinite(w) || w < 0.0) {
      throw ConfigError("weight for aspect '" + aspect + "' must be finite and >= 0");
    }
    any_positive = any_positive || w > 0.0;
  }
  for (const auto& aspect : aspects) {
    if (!weights.contains(aspect)) throw ConfigError("no weight given for aspect '" + aspect + "'");
  }
  if (!any_positive) throw ConfigError("at least one aspect weight must be > 0");
}

}  // namespace detail

// Weighted mean of per-aspect similarities. The per-aspect edges must be
// unthresholded; a pair missing from an aspect contributes 0 there. With a
// single positive weight the result is that aspect's network unchanged.
inline std::vector<SimilarityEdge> combine_aspect_similarities(
    const std::map<std::string, std::vector<SimilarityEdge>>& per_aspect_edges,
    const AspectWeights& weights, SimilarityThreshold threshold = SimilarityThreshold{0.0}) {
  std::set<std::string> aspects;
  for (const auto& [aspect, edges] : per_aspect_edges) aspects.insert(aspect);
  detail::validate_weights(weights, aspects);

  std::vector<std::pair<const std::string*, double>> active;
  double weight_sum = 0.0;
  for (const auto& [aspect, w] : weights) {
    if (w > 0.0) {
      active.emplace_back(&aspect, w);
      weight_sum += w;
    }
  }

  std::map<std::pair<std::string, std::string>, double> combined;
  if (active.size() == 1) {
    for (const auto& e : per_aspect_edges.at(*active.front().first)) {
      combined[{e.source, e.target}] = e.weight;
    }
  } else {
    std::map<std::pair<std::string, std::string>, CompensatedSum> acc;
    for (const auto& [aspect, w] : active) {
      for (const auto& e : per_aspect_edges.at(*aspect)) {
        if (e.source == e.target) throw InputError("self-pair " + e.source + " in aspect " + *aspect);
        auto key = e.source > e.target ? std::make_pair(e.source, e.target)
                                        : std::make_pair(e.target, e.source);
        acc[std::move(key)].add(w * e.weight);
      }
    }
    for (auto& [key, sum] : acc) combined.emplace_hint(combined.end(), key, detail::clamp_unit(sum.value() / weight_sum));
  }

  std::vector<SimilarityEdge> out;
  for (const auto& [key, w] : combined) {
    if (w >= threshold.min_weight) out.push_back({key.first, key.second, w});
  }
  return out;
}

// Thresholded weighted-sum network over several aspects. A pair whose
// combined weight reaches the threshold must reach it in at least one
// positively weighted aspect, so candidates come from the per-aspect
// thresholded joins and are then scored exactly in every aspect.
inline std::vector<SimilarityEdge> combined_pairwise_similarities(
    const std::map<std::string, VectorMap>& per_aspect_vectors, const AspectWeights& weights,
    SimilarityThreshold threshold, const PairwiseOptions& options = {}) {
  std::set<std::string> aspects;
  for (const auto& [aspect, vectors] : per_aspect_vectors) aspects.insert(aspect);
  detail::validate_weights(weights, aspects);

  std::map<std::string, PreparedVectors> prepared;
  for (const auto& [aspect, vectors] : per_aspect_vectors) {
    if (weights.at(aspect) > 0.0) prepared.emplace(aspect, PreparedVectors(vectors));
  }

  std::set<std::pair<std::string, std::string>> candidates;
  if (threshold.min_weight > 0.0) {
    for (const auto& [aspect, pv] : prepared) {
      for (auto& e : pairwise_similarities(pv, threshold, options)) {
        candidates.emplace(std::move(e.source), std::move(e.target));
      }
    }
  } else {
    std::set<std::string> universe;
    for (const auto& [aspect, pv] : prepared) universe.insert(pv.ids().begin(), pv.ids().end());
    for (auto j = universe.begin(); j != universe.end(); ++j) {
      for (auto i = universe.begin(); i != j; ++i) candidates.emplace(*j, *i);
    }
  }

  std::map<std::string, std::vector<SimilarityEdge>> per_aspect;
  for (const auto& [aspect, w] : weights) per_aspect[aspect];
  for (const auto& [aspect, pv] : prepared) {
    auto& edges = per_aspect[aspect];
    for (const auto& [source, target] : candidates) {
      const auto a = pv.index_of(source);
      const auto b = pv.index_of(target);
      if (a && b) edges.push_back({source, target, pv.cosine(*b, *a)});
    }
  }
  return combine_aspect_similarities(per_aspect, weights, threshold);
}

// Concatenates one account's normalized aspect vectors into a single vector
// with one block per aspect.
inline PracticeVector concat_composite_vector(const std::vector<PracticeVector>& parts) {
  if (parts.empty()) throw MisuseError("composite vector needs at least one aspect");
  PracticeVector out;
  out.account_id = parts.front().account_id;
  out.direction = parts.front().direction;
  out.normalized = true;
  std::set<std::string> seen;
  for (const auto& p : parts) {
    if (!p.normalized) throw MisuseError("composite input for " + p.account_id + " (" + p.aspect + ") is not normalized");
    if (p.account_id != out.account_id) {
      throw MisuseError("composite inputs belong to different accounts: " + out.account_id + ", " + p.account_id);
    }
    if (!seen.insert(p.aspect).second) throw MisuseError("duplicate aspect '" + p.aspect + "' in composite");
    if (p.direction != out.direction) out.direction = Direction::combined;
    out.total += p.total;
    for (const auto& [key, value] : p.entries) {
      std::string block = key.block.empty() ? p.aspect : p.aspect + "/" + key.block;
      out.entries.emplace(DimensionKey{std::move(block), key.label}, value);
    }
  }
  for (const auto& a : seen) out.aspect += (out.aspect.empty() ? "" : "+") + a;
  return out;
}

// Composite vectors for every account present in any aspect. All accounts
// get the same composite aspect label, covering the full aspect set, so
// their vectors are mutually comparable even when some blocks are missing.
inline VectorMap composite_vectors(const std::map<std::string, VectorMap>& per_aspect_normalized) {
  std::map<std::string, std::vector<PracticeVector>> parts;
  for (const auto& [aspect, vectors] : per_aspect_normalized) {
    for (const auto& [account, v] : vectors) {
      if (!v.degenerate()) parts[account].push_back(v);
    }
  }
  std::string label;
  for (const auto& [aspect, vectors] : per_aspect_normalized) label += (label.empty() ? "" : "+") + aspect;
  VectorMap out;
  for (auto& [account, vs] : parts) {
    PracticeVector c = concat_composite_vector(vs);
    c.aspect = label;
    c.direction = Direction::combined;
    out.emplace_hint(out.end(), account, std::move(c));
  }
  return out;
}

}  // namespace practice_map
