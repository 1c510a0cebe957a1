#pragma once

// End-to-end orchestration: configuration, the four file-producing stages
// and the combined run. The staged entry points read exactly the files the
// earlier stages write, and the combined run uses the same values in
// memory, so both routes produce identical output files.

#include <fcntl.h>
#include <unistd.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "practice_map/csv.hpp"
#include "practice_map/error.hpp"
#include "practice_map/graph.hpp"
#include "practice_map/ingest.hpp"
#include "practice_map/io.hpp"
#include "practice_map/metrics.hpp"
#include "practice_map/similarity.hpp"
#include "practice_map/vectorize.hpp"

namespace practice_map {

namespace fs = std::filesystem;

inline constexpr const char* kOutputDirEnv = "PRACTICE_MAP_OUTPUT_DIR";

enum class Combination { weighted_sum, composite_vector };
enum class TemporalMode { automatic, on, off };

struct AttributeInput {
  std::string aspect;
  fs::path path;
};

struct RunConfig {
  std::optional<fs::path> interactions;
  Direction direction = Direction::outgoing;
  std::optional<std::set<std::string>> type_filter;
  bool include_self = true;
  std::vector<AttributeInput> attributes;

  double min_total = 100.0;
  std::string activity_aspect = std::string(kInteractionsAspect);

  double min_weight = 0.6;
  Combination combination = Combination::weighted_sum;
  AspectWeights weights;  // unlisted aspects weigh 1
  unsigned threads = 0;
  bool prune = true;

  double resolution = 1.0;
  std::uint64_t seed = 1;
  std::size_t archetypes = 10;

  std::size_t top_targets = 10;
  TemporalMode temporal = TemporalMode::automatic;
  std::chrono::seconds bin_width = kOneWeek;

  fs::path output_dir = "practice_map_out";
  DelimiterConfig format;

  std::vector<std::string> aspects() const {
    std::vector<std::string> out;
    if (interactions) out.emplace_back(kInteractionsAspect);
    for (const auto& a : attributes) out.push_back(a.aspect);
    return out;
  }

  AspectWeights effective_weights() const {
    AspectWeights w;
    for (const auto& a : aspects()) {
      auto it = weights.find(a);
      w[a] = it == weights.end() ? 1.0 : it->second;
    }
    return w;
  }

  void validate() const {
    const auto names = aspects();
    if (names.empty()) throw ConfigError("no input aspect configured");
    std::set<std::string> unique(names.begin(), names.end());
    if (unique.size() != names.size()) throw ConfigError("aspect labels must be distinct");
    if (!unique.contains(activity_aspect)) {
      throw ConfigError("activity aspect '" + activity_aspect + "' is not an input aspect");
    }
    ActivityThreshold{min_total};
    SimilarityThreshold{min_weight};
    for (const auto& [aspect, w] : weights) {
      if (!unique.contains(aspect)) throw ConfigError("weight given for unknown aspect '" + aspect + "'");
    }
    bool positive = false;
    for (const auto& [aspect, w] : effective_weights()) {
      if (!std::isfinite(w) || w < 0.0) throw ConfigError("weight for '" + aspect + "' must be >= 0");
      positive = positive || w > 0.0;
    }
    if (!positive) throw ConfigError("at least one aspect weight must be > 0");
    if (!(resolution > 0.0) || !std::isfinite(resolution)) {
      throw ConfigError("louvain resolution must be > 0");
    }
    if (archetypes < 1) throw ConfigError("archetype count must be >= 1");
    if (top_targets < 1) throw ConfigError("top target count must be >= 1");
    if (bin_width.count() <= 0) throw ConfigError("temporal bin width must be positive");
    if (output_dir.empty()) throw ConfigError("output directory is empty");
  }
};

namespace detail {

inline bool parse_bool(const std::string& s, const std::string& key) {
  const std::string v = csv::to_lower(csv::trim(s));
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + s + "'");
}

inline double parse_real(const std::string& s, const std::string& key) {
  if (auto v = parse_double(s)) return *v;
  throw ConfigError(key + ": expected a number, got '" + s + "'");
}

template <typename Int>
Int parse_count(const std::string& s, const std::string& key) {
  if (auto v = parse_int<Int>(s)) return *v;
  throw ConfigError(key + ": expected a non-negative integer, got '" + s + "'");
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (auto& item : csv::split(s, ',')) {
    auto t = csv::trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

// "604800", "3600s", "12h", "1d", "1w".
inline std::chrono::seconds parse_duration(const std::string& text, const std::string& key) {
  std::string_view s = csv::trim(text);
  std::int64_t unit = 1;
  if (!s.empty()) {
    switch (s.back()) {
      case 's': unit = 1; s.remove_suffix(1); break;
      case 'm': unit = 60; s.remove_suffix(1); break;
      case 'h': unit = 3600; s.remove_suffix(1); break;
      case 'd': unit = 86400; s.remove_suffix(1); break;
      case 'w': unit = 7 * 86400; s.remove_suffix(1); break;
      default: break;
    }
  }
  auto n = parse_int<std::int64_t>(s);
  if (!n || *n <= 0) throw ConfigError(key + ": expected a positive duration such as 1w or 3600s");
  return std::chrono::seconds{*n * unit};
}

inline std::string format_duration(std::chrono::seconds d) {
  const auto s = d.count();
  if (s % (7 * 86400) == 0) return std::to_string(s / (7 * 86400)) + "w";
  if (s % 86400 == 0) return std::to_string(s / 86400) + "d";
  if (s % 3600 == 0) return std::to_string(s / 3600) + "h";
  return std::to_string(s) + "s";
}

inline const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"input", {"interactions", "direction", "interaction_types", "include_self", "delimiter"}},
      {"attributes", {}},
      {"vectorize", {"min_total", "activity_aspect"}},
      {"similarity", {"min_weight", "combination", "threads", "prune"}},
      {"weights", {}},
      {"cluster", {"resolution", "seed", "archetypes"}},
      {"metrics", {"top_targets", "temporal", "bin_width"}},
      {"output", {"dir"}},
  };
  return keys;
}

}  // namespace detail

// Flat INI sections:
//   [input] interactions, direction, interaction_types, include_self, delimiter
//   [attributes] <aspect> = <file>
//   [vectorize] min_total, activity_aspect
//   [similarity] min_weight, combination, threads, prune
//   [weights] <aspect> = <weight>
//   [cluster] resolution, seed, archetypes
//   [metrics] top_targets, temporal, bin_width
//   [output] dir
// Relative paths resolve against base_dir. Overrides are "section.key=value".
inline RunConfig config_from_tree(const boost::property_tree::ptree& tree, const fs::path& base_dir) {
  for (const auto& [section, body] : tree) {
    auto sec = detail::known_keys().find(section);
    if (sec == detail::known_keys().end()) throw ConfigError("unknown config section [" + section + "]");
    if (section == "attributes" || section == "weights") continue;
    for (const auto& [key, value] : body) {
      if (!sec->second.contains(key)) throw ConfigError("unknown config key " + section + "." + key);
    }
  }
  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(boost::property_tree::ptree::path_type(path, '.'))) {
      return std::string(csv::trim(*v));
    }
    return std::nullopt;
  };
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };

  RunConfig c;
  if (auto v = get("input.interactions"); v && !v->empty()) c.interactions = resolve(*v);
  if (auto v = get("input.direction")) c.direction = direction_from_string(*v);
  if (auto v = get("input.interaction_types")) {
    auto list = detail::split_list(*v);
    if (!list.empty()) c.type_filter = std::set<std::string>(list.begin(), list.end());
  }
  if (auto v = get("input.include_self")) c.include_self = detail::parse_bool(*v, "input.include_self");
  if (auto v = get("input.delimiter")) c.format = delimiter_from_name(*v);
  if (auto attrs = tree.get_child_optional("attributes")) {
    for (const auto& [aspect, value] : *attrs) {
      if (aspect == kInteractionsAspect) throw ConfigError("attribute aspect may not be named 'interactions'");
      c.attributes.push_back({aspect, resolve(std::string(csv::trim(value.data())))});
    }
  }
  if (auto v = get("vectorize.min_total")) c.min_total = detail::parse_real(*v, "vectorize.min_total");
  if (auto v = get("vectorize.activity_aspect")) c.activity_aspect = *v;
  else if (!c.interactions && !c.attributes.empty()) c.activity_aspect = c.attributes.front().aspect;
  if (auto v = get("similarity.min_weight")) c.min_weight = detail::parse_real(*v, "similarity.min_weight");
  if (auto v = get("similarity.combination")) {
    if (*v == "weighted-sum") c.combination = Combination::weighted_sum;
    else if (*v == "composite-vector") c.combination = Combination::composite_vector;
    else throw ConfigError("similarity.combination must be weighted-sum or composite-vector");
  }
  if (auto v = get("similarity.threads")) c.threads = detail::parse_count<unsigned>(*v, "similarity.threads");
  if (auto v = get("similarity.prune")) c.prune = detail::parse_bool(*v, "similarity.prune");
  if (auto w = tree.get_child_optional("weights")) {
    for (const auto& [aspect, value] : *w) c.weights[aspect] = detail::parse_real(value.data(), "weights." + aspect);
  }
  if (auto v = get("cluster.resolution")) c.resolution = detail::parse_real(*v, "cluster.resolution");
  if (auto v = get("cluster.seed")) c.seed = detail::parse_count<std::uint64_t>(*v, "cluster.seed");
  if (auto v = get("cluster.archetypes")) c.archetypes = detail::parse_count<std::size_t>(*v, "cluster.archetypes");
  if (auto v = get("metrics.top_targets")) c.top_targets = detail::parse_count<std::size_t>(*v, "metrics.top_targets");
  if (auto v = get("metrics.temporal")) {
    if (*v == "auto") c.temporal = TemporalMode::automatic;
    else if (detail::parse_bool(*v, "metrics.temporal")) c.temporal = TemporalMode::on;
    else c.temporal = TemporalMode::off;
  }
  if (auto v = get("metrics.bin_width")) c.bin_width = detail::parse_duration(*v, "metrics.bin_width");
  if (auto v = get("output.dir")) c.output_dir = resolve(*v);
  c.validate();
  return c;
}

inline RunConfig load_config(const fs::path& path,
                             const std::vector<std::string>& overrides = {}) {
  boost::property_tree::ptree tree;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config file " + path.string() + ": " + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      throw ConfigError("override '" + o + "' must look like section.key=value");
    }
    const std::string section = o.substr(0, dot);
    const std::string key = o.substr(dot + 1, eq - dot - 1);
    auto existing = tree.get_child_optional(section);
    auto& sec = existing ? *existing : tree.put_child(section, {});
    sec.put(boost::property_tree::ptree::path_type(key, '\x01'), o.substr(eq + 1));
  }
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  return config_from_tree(tree, base);
}

inline nlohmann::ordered_json config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["interactions"] = c.interactions ? c.interactions->string() : "";
  j["direction"] = std::string(to_string(c.direction));
  if (c.type_filter) {
    j["interaction_types"] = std::vector<std::string>(c.type_filter->begin(), c.type_filter->end());
  } else {
    j["interaction_types"] = "all";
  }
  j["include_self"] = c.include_self;
  auto attrs = nlohmann::ordered_json::object();
  for (const auto& a : c.attributes) attrs[a.aspect] = a.path.string();
  j["attributes"] = attrs;
  j["min_total"] = c.min_total;
  j["activity_aspect"] = c.activity_aspect;
  j["min_weight"] = c.min_weight;
  j["combination"] = c.combination == Combination::weighted_sum ? "weighted-sum" : "composite-vector";
  auto w = nlohmann::ordered_json::object();
  for (const auto& [aspect, value] : c.effective_weights()) w[aspect] = value;
  j["weights"] = w;
  j["prune"] = c.prune;
  j["resolution"] = c.resolution;
  j["seed"] = c.seed;
  j["archetypes"] = c.archetypes;
  j["top_targets"] = c.top_targets;
  j["temporal"] = c.temporal == TemporalMode::automatic ? "auto" : c.temporal == TemporalMode::on ? "on" : "off";
  j["bin_width"] = detail::format_duration(c.bin_width);
  j["delimiter"] = c.format.delimiter == '\t' ? "tab" : "comma";
  j["output_dir"] = c.output_dir.string();
  return j;
}

// --- stage results -------------------------------------------------------

struct IngestResult {
  std::optional<InteractionTable> interactions;
  std::map<std::string, AttributeTable> attributes;
};

struct VectorizeResult {
  std::map<std::string, VectorMap> raw;  // restricted to the active accounts
  std::size_t accounts_before_filter = 0;
  std::size_t accounts_after_filter = 0;
  std::vector<std::string> dropped;
};

struct SimilarityResult {
  std::vector<SimilarityEdge> edges;  // full precision
  std::set<std::string> accounts;     // network nodes
  std::vector<std::string> degenerate;
  std::uint64_t pair_space = 0;
};

struct ClusterResult {
  PracticeGraph graph;
  ClusterAssignment assignment;
  std::map<std::string, double> degrees;
  ArchetypeReport archetypes;
};

struct MetricsResult {
  bool available = false;  // false without an interactions input
  std::vector<EIIndexValue> ei;
  std::optional<std::vector<TemporalSeries>> temporal;
  std::string temporal_note;
  std::map<int, TargetReport> targets;
};

namespace detail {

inline std::ifstream open_input(const fs::path& p, std::string_view what) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot open " + std::string(what) + " " + p.string());
  return in;
}

inline std::vector<InteractionRecord> analysed_records(const RunConfig& c,
                                                       const InteractionTable& table) {
  if (!c.type_filter) return table.records;
  std::vector<InteractionRecord> out;
  for (const auto& r : table.records) {
    if (c.type_filter->contains(r.interaction_type)) out.push_back(r);
  }
  return out;
}

}  // namespace detail

inline IngestResult ingest_inputs(const RunConfig& c) {
  IngestResult out;
  if (c.interactions) {
    auto in = detail::open_input(*c.interactions, "interactions file");
    out.interactions = parse_interactions(in, c.format);
  }
  for (const auto& a : c.attributes) {
    auto in = detail::open_input(a.path, "attributes file");
    out.attributes.emplace(a.aspect, parse_attributes(in, a.aspect, c.format));
  }
  return out;
}

// Raw vectors per aspect. The activity threshold is applied to the raw
// totals of the activity aspect; every aspect is then restricted to the
// accounts that passed.
inline VectorizeResult vectorize_inputs(const RunConfig& c, const IngestResult& in) {
  std::map<std::string, VectorMap> raw;
  if (in.interactions) {
    InteractionVectorOptions opt;
    opt.direction = c.direction;
    opt.type_filter = c.type_filter;
    opt.include_self = c.include_self;
    raw.emplace(std::string(kInteractionsAspect),
                accumulate_interaction_vectors(in.interactions->records, opt));
  }
  for (const auto& [aspect, table] : in.attributes) {
    raw.emplace(aspect, accumulate_attribute_vectors(table.records));
  }

  VectorizeResult out;
  const VectorMap& activity = raw.at(c.activity_aspect);
  out.accounts_before_filter = activity.size();
  auto filtered = filter_by_activity(activity, ActivityThreshold{c.min_total});
  out.dropped = std::move(filtered.dropped);
  out.accounts_after_filter = filtered.retained.size();
  for (auto& [aspect, vectors] : raw) {
    VectorMap kept;
    for (auto& [account, v] : vectors) {
      if (filtered.retained.contains(account)) kept.emplace_hint(kept.end(), account, std::move(v));
    }
    out.raw.emplace(aspect, std::move(kept));
  }
  return out;
}

inline SimilarityResult compute_similarity(const RunConfig& c,
                                           const std::map<std::string, VectorMap>& raw) {
  SimilarityResult out;
  PairwiseOptions opt;
  opt.threads = c.threads;
  opt.prune = c.prune;
  const SimilarityThreshold threshold{c.min_weight};
  const AspectWeights weights = c.effective_weights();
  for (const auto& [aspect, w] : weights) {
    if (!raw.contains(aspect)) throw InputError("vectors missing aspect '" + aspect + "'");
  }
  for (const auto& [aspect, vectors] : raw) {
    if (!weights.contains(aspect)) throw InputError("vectors contain unconfigured aspect '" + aspect + "'");
  }

  std::map<std::string, VectorMap> normalized;
  for (const auto& [aspect, vectors] : raw) normalized.emplace(aspect, normalize_all(vectors));

  std::set<std::string> degenerate;
  for (const auto& [aspect, vectors] : normalized) {
    const bool counts = c.combination == Combination::composite_vector || weights.at(aspect) > 0.0;
    for (const auto& [account, v] : vectors) {
      if (!counts) continue;
      if (v.degenerate()) degenerate.insert(account);
      else out.accounts.insert(account);
    }
  }
  for (const auto& a : out.accounts) degenerate.erase(a);
  out.degenerate.assign(degenerate.begin(), degenerate.end());

  if (c.combination == Combination::composite_vector) {
    out.edges = pairwise_similarities(composite_vectors(normalized), threshold, opt);
  } else if (normalized.size() == 1) {
    out.edges = pairwise_similarities(normalized.begin()->second, threshold, opt);
  } else {
    out.edges = combined_pairwise_similarities(normalized, weights, threshold, opt);
  }
  const std::uint64_t n = out.accounts.size();
  out.pair_space = n < 2 ? 0 : n * (n - 1) / 2;
  return out;
}

// Nodes of the similarity network: accounts that take part in at least one
// scored aspect.
inline std::set<std::string> network_accounts(const RunConfig& c,
                                              const std::map<std::string, VectorMap>& raw) {
  const AspectWeights weights = c.effective_weights();
  std::set<std::string> out;
  for (const auto& [aspect, vectors] : raw) {
    auto w = weights.find(aspect);
    if (c.combination == Combination::weighted_sum && (w == weights.end() || w->second <= 0.0)) continue;
    for (const auto& [account, v] : vectors) {
      if (!v.degenerate()) out.insert(account);
    }
  }
  return out;
}

// Clustering runs on the weights exactly as exported to edges.csv.
inline ClusterResult compute_clusters(const RunConfig& c,
                                      const std::vector<SimilarityEdge>& exported,
                                      const std::set<std::string>& accounts) {
  ClusterResult out;
  out.graph = build_graph(exported, accounts);
  LouvainOptions opt;
  opt.resolution = c.resolution;
  opt.seed = c.seed;
  out.assignment = louvain(out.graph, opt);
  out.degrees = intra_cluster_weighted_degree(out.graph, out.assignment);
  out.archetypes = top_archetypes(out.degrees, out.assignment, c.archetypes);
  return out;
}

inline MetricsResult compute_metrics(const RunConfig& c, const std::optional<InteractionTable>& table,
                                     const ClusterAssignment& assignment,
                                     const ArchetypeReport& archetypes) {
  MetricsResult out;
  if (!table) {
    out.temporal_note = "skipped: no interactions input";
    return out;
  }
  out.available = true;
  const auto records = detail::analysed_records(c, *table);
  out.ei = ei_index_table(records, assignment);
  out.targets = cluster_top_targets(records, archetypes, c.top_targets, true);

  const bool all_timed = std::all_of(records.begin(), records.end(),
                                     [](const auto& r) { return r.timestamp.has_value(); });
  if (c.temporal == TemporalMode::off) {
    out.temporal_note = "skipped: disabled in config";
  } else if (c.temporal == TemporalMode::automatic && (!table->has_timestamp_column || !all_timed)) {
    out.temporal_note = table->has_timestamp_column
                            ? "skipped: some interactions lack timestamps"
                            : "skipped: interactions file has no timestamp column";
  } else {
    if (!table->has_timestamp_column) {
      throw InputError("temporal output requested but the interactions file has no timestamp column");
    }
    out.temporal = temporal_contributions(records, assignment, c.bin_width);
    out.temporal_note = "written";
  }
  return out;
}

// --- output handling -----------------------------------------------------

inline constexpr const char* kLockName = ".practice_map.lock";

// Exclusive use of the output directory for one invocation. Files written
// through it are removed again unless commit() is called.
class OutputSession {
 public:
  explicit OutputSession(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw InputError("cannot create output directory " + dir_.string() + ": " + ec.message());
    lock_ = dir_ / kLockName;
    fd_ = ::open(lock_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) {
      throw InputError("output directory " + dir_.string() + " is in use (lock file " +
                       lock_.string() + " exists)");
    }
  }
  OutputSession(const OutputSession&) = delete;
  OutputSession& operator=(const OutputSession&) = delete;

  ~OutputSession() {
    if (!committed_) {
      std::error_code ec;
      for (const auto& p : written_) fs::remove(p, ec);
    }
    ::close(fd_);
    std::error_code ec;
    fs::remove(lock_, ec);
  }

  const fs::path& dir() const { return dir_; }
  fs::path path(const std::string& name) const { return dir_ / name; }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    const fs::path p = dir_ / name;
    written_.push_back(p);
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + p.string());
    body(out);
    out.flush();
    if (!out) throw InputError("failed writing " + p.string());
  }

  std::vector<std::string> written_names() const {
    std::vector<std::string> names;
    for (const auto& p : written_) names.push_back(p.filename().string());
    return names;
  }

  void commit() { committed_ = true; }

 private:
  fs::path dir_;
  fs::path lock_;
  int fd_ = -1;
  std::vector<fs::path> written_;
  bool committed_ = false;
};

namespace files {
inline const std::string kVectors = "vectors.csv";
inline const std::string kEdges = "edges.csv";
inline const std::string kClusters = "clusters.csv";
inline const std::string kNodes = "nodes.csv";
inline const std::string kArchetypes = "archetypes.csv";
inline const std::string kEIIndex = "ei_index.csv";
inline const std::string kTemporal = "temporal.csv";
inline const std::string kTargets = "targets.csv";
inline const std::string kReport = "report.json";
inline const std::string kTimings = "timings.json";
}  // namespace files

// Rethrows any failure with the stage name in front, keeping its category.
template <typename Fn>
auto in_stage(std::string_view stage, Fn&& fn) -> decltype(fn()) {
  const std::string prefix = "[" + std::string(stage) + "] ";
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const InputError& e) {
    throw InputError(prefix + e.what());
  } catch (const MisuseError& e) {
    throw MisuseError(prefix + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(prefix + e.what());
  }
}

namespace detail {

inline void write_cluster_files(OutputSession& out, const RunConfig& c, const ClusterResult& r) {
  out.write(files::kClusters, [&](std::ostream& o) { write_clusters(o, r.assignment, r.degrees, c.format); });
  out.write(files::kNodes, [&](std::ostream& o) {
    write_node_table(o, cluster_backprojection(r.assignment), c.format);
  });
  out.write(files::kArchetypes, [&](std::ostream& o) { write_archetypes(o, r.archetypes, c.format); });
}

inline void write_metric_files(OutputSession& out, const RunConfig& c, const MetricsResult& m) {
  if (!m.available) return;
  out.write(files::kEIIndex, [&](std::ostream& o) { write_ei_index(o, m.ei, c.format); });
  if (m.temporal) out.write(files::kTemporal, [&](std::ostream& o) { write_temporal(o, *m.temporal, c.format); });
  out.write(files::kTargets, [&](std::ostream& o) { write_targets(o, m.targets, c.format); });
}

inline std::map<std::string, VectorMap> load_vectors_file(const RunConfig& c, const fs::path& p) {
  auto in = open_input(p, "vectors file (run the vectorize stage first)");
  return read_vectors(in, c.format);
}

inline nlohmann::ordered_json report_json(const ValidationReport& r) {
  nlohmann::ordered_json j;
  j["rows"] = r.rows;
  j["accepted"] = r.accepted;
  j["skipped"] = r.skipped;
  j["skipped_by_reason"] = r.skipped_by_reason;
  j["distinct_authors"] = r.distinct_authors;
  j["distinct_targets"] = r.distinct_targets;
  j["distinct_accounts"] = r.distinct_accounts;
  j["distinct_types"] = r.distinct_types;
  j["timestamp_coverage"] = r.timestamp_coverage;
  return j;
}

}  // namespace detail

inline nlohmann::ordered_json validation_json(const ValidationReport& r) {
  return detail::report_json(r);
}

// --- staged entry points -------------------------------------------------

inline void run_vectorize_stage(const RunConfig& c) {
  OutputSession out(c.output_dir);
  const auto ingested = in_stage("ingest", [&] { return ingest_inputs(c); });
  const auto vec = in_stage("vectorize", [&] { return vectorize_inputs(c, ingested); });
  in_stage("vectorize", [&] {
    out.write(files::kVectors, [&](std::ostream& o) { write_vectors(o, vec.raw, c.format); });
  });
  out.commit();
}

inline void run_similarity_stage(const RunConfig& c) {
  OutputSession out(c.output_dir);
  in_stage("similarity", [&] {
    const auto raw = detail::load_vectors_file(c, out.path(files::kVectors));
    const auto sim = compute_similarity(c, raw);
    out.write(files::kEdges, [&](std::ostream& o) { write_edges(o, sim.edges, c.format); });
  });
  out.commit();
}

inline void run_cluster_stage(const RunConfig& c) {
  OutputSession out(c.output_dir);
  in_stage("cluster", [&] {
    const auto raw = detail::load_vectors_file(c, out.path(files::kVectors));
    auto in = detail::open_input(out.path(files::kEdges), "edges file (run the similarity stage first)");
    const auto edges = read_edges(in, c.format);
    const auto result = compute_clusters(c, edges, network_accounts(c, raw));
    detail::write_cluster_files(out, c, result);
  });
  out.commit();
}

inline void run_metrics_stage(const RunConfig& c) {
  OutputSession out(c.output_dir);
  std::optional<InteractionTable> table;
  if (c.interactions) {
    table = in_stage("ingest", [&] {
      auto in = detail::open_input(*c.interactions, "interactions file");
      return parse_interactions(in, c.format);
    });
  }
  in_stage("metrics", [&] {
    auto cin = detail::open_input(out.path(files::kClusters), "clusters file (run the cluster stage first)");
    const auto assignment = read_clusters(cin, c.format);
    auto ain = detail::open_input(out.path(files::kArchetypes), "archetypes file (run the cluster stage first)");
    const auto archetypes = read_archetypes(ain, c.format);
    detail::write_metric_files(out, c, compute_metrics(c, table, assignment, archetypes));
  });
  out.commit();
}

struct RunSummary {
  nlohmann::ordered_json report;
  std::vector<std::string> files;
};

// The whole pipeline in one process. Writes every stage file plus
// report.json (deterministic) and timings.json (wall-clock durations).
inline RunSummary run_pipeline(const RunConfig& c) {
  using clock = std::chrono::steady_clock;
  OutputSession out(c.output_dir);
  nlohmann::ordered_json timings;
  auto timed = [&](const char* stage, auto&& fn) {
    const auto t0 = clock::now();
    auto result = in_stage(stage, fn);
    timings[stage] = std::chrono::duration<double>(clock::now() - t0).count();
    return result;
  };

  const auto ingested = timed("ingest", [&] { return ingest_inputs(c); });
  const auto vec = timed("vectorize", [&] { return vectorize_inputs(c, ingested); });
  in_stage("vectorize", [&] {
    out.write(files::kVectors, [&](std::ostream& o) { write_vectors(o, vec.raw, c.format); });
  });
  auto sim = timed("similarity", [&] { return compute_similarity(c, vec.raw); });
  const auto exported = exported_edges(sim.edges);
  in_stage("similarity", [&] {
    out.write(files::kEdges, [&](std::ostream& o) { write_edges(o, sim.edges, c.format); });
  });
  const auto clusters = timed("cluster", [&] { return compute_clusters(c, exported, sim.accounts); });
  in_stage("cluster", [&] { detail::write_cluster_files(out, c, clusters); });
  const auto metrics = timed("metrics", [&] {
    return compute_metrics(c, ingested.interactions, clusters.assignment, clusters.archetypes);
  });
  in_stage("metrics", [&] { detail::write_metric_files(out, c, metrics); });

  nlohmann::ordered_json report;
  report["notes"] = {
      "edges.csv is an UNDIRECTED network: import it into Gephi as undirected, never as directed.",
      "clusters.csv and nodes.csv are node tables keyed by Id.",
  };
  report["config"] = config_to_json(c);
  report["seed"] = c.seed;
  auto ingest = nlohmann::ordered_json::object();
  if (ingested.interactions) ingest["interactions"] = detail::report_json(validation_report(*ingested.interactions));
  for (const auto& [aspect, table] : ingested.attributes) ingest[aspect] = detail::report_json(validation_report(table));
  report["ingest"] = ingest;

  nlohmann::ordered_json v;
  v["activity_aspect"] = c.activity_aspect;
  v["accounts_before_filter"] = vec.accounts_before_filter;
  v["accounts_after_filter"] = vec.accounts_after_filter;
  v["accounts_dropped"] = vec.dropped.size();
  auto per_aspect = nlohmann::ordered_json::object();
  for (const auto& [aspect, vectors] : vec.raw) per_aspect[aspect] = vectors.size();
  v["vectors_per_aspect"] = per_aspect;
  report["vectorize"] = v;

  nlohmann::ordered_json s;
  s["accounts"] = sim.accounts.size();
  s["degenerate_accounts"] = sim.degenerate;
  s["pair_space"] = sim.pair_space;
  s["edges"] = sim.edges.size();
  s["min_weight"] = c.min_weight;
  if (c.combination == Combination::weighted_sum && vec.raw.size() > 1) {
    s["missing_aspect_contributes_zero"] = true;
  }
  report["similarity"] = s;

  nlohmann::ordered_json cl;
  cl["nodes"] = clusters.graph.node_count();
  cl["edges"] = clusters.graph.edges().size();
  cl["clusters"] = clusters.assignment.cluster_count;
  cl["modularity"] = clusters.assignment.modularity;
  cl["resolution"] = clusters.assignment.resolution;
  cl["seed"] = clusters.assignment.seed;
  cl["modularity_trace"] = clusters.assignment.modularity_trace;
  report["cluster"] = cl;

  nlohmann::ordered_json m;
  m["available"] = metrics.available;
  m["temporal"] = metrics.temporal_note;
  report["metrics"] = m;

  auto names = out.written_names();
  names.push_back(files::kReport);
  report["outputs"] = names;
  out.write(files::kReport, [&](std::ostream& o) { o << report.dump(2) << '\n'; });
  out.write(files::kTimings, [&](std::ostream& o) { o << timings.dump(2) << '\n'; });
  out.commit();
  return {report, out.written_names()};
}

}  // namespace practice_map
