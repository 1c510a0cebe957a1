#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

namespace practice_map {
namespace {

PracticeGraph toy_graph() {
  return build_graph(pairwise_similarities(testing::toy_vectors(), SimilarityThreshold{0.6}));
}

std::vector<int> membership_of(const PracticeGraph& g, const ClusterAssignment& a) {
  std::vector<int> m;
  for (const auto& id : g.nodes()) m.push_back(a.cluster.at(id));
  return m;
}

// Canonical form of a partition: each node mapped to the smallest index
// in its block.
std::vector<std::size_t> canonical(const std::vector<int>& m) {
  std::map<int, std::size_t> first;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m.size(); ++i) out.push_back(first.emplace(m[i], i).first->second);
  return out;
}

PracticeGraph random_graph(std::mt19937_64& rng, int n, double p) {
  std::bernoulli_distribution has(p);
  std::uniform_real_distribution<double> w(0.1, 1.0);
  std::vector<SimilarityEdge> edges;
  std::set<std::string> nodes;
  for (int i = 0; i < n; ++i) nodes.insert("n" + std::to_string(10 + i));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (has(rng)) edges.push_back({"n" + std::to_string(10 + i), "n" + std::to_string(10 + j), w(rng)});
    }
  }
  return build_graph(edges, nodes);
}

TEST(BuildGraph, ToyHasTwoCliques) {
  const auto g = toy_graph();
  EXPECT_EQ(g.node_count(), 10u);
  EXPECT_EQ(g.edges().size(), 20u);
  for (std::size_t u = 0; u < g.node_count(); ++u) {
    ASSERT_EQ(g.neighbors(u).size(), 4u);
    for (const auto& nb : g.neighbors(u)) EXPECT_EQ(g.nodes()[u][0], g.nodes()[nb.node][0]);
  }
  EXPECT_NEAR(g.total_weight(), 20 * 8.0 / 9.0, 1e-12);
}

TEST(BuildGraph, EmptyAndSingleEdge) {
  const auto empty = build_graph({}, {"a", "b"});
  EXPECT_EQ(empty.node_count(), 2u);
  EXPECT_TRUE(empty.edges().empty());
  EXPECT_EQ(empty.total_weight(), 0.0);

  const auto one = build_graph({{"b", "a", 0.7}});
  EXPECT_EQ(one.node_count(), 2u);
  EXPECT_EQ(one.neighbors(*one.index_of("a")).at(0).weight, 0.7);
  EXPECT_EQ(one.neighbors(*one.index_of("b")).size(), 1u);
}

TEST(BuildGraph, InvalidEdgesRejected) {
  EXPECT_THROW(build_graph({{"a", "a", 0.5}}), InputError);
  EXPECT_THROW(build_graph({{"b", "a", 1.5}}), InputError);
  EXPECT_THROW(build_graph({{"b", "a", -0.1}}), InputError);
  EXPECT_THROW(build_graph({{"b", "a", 0.5}, {"a", "b", 0.5}}), InputError);
  EXPECT_THROW(build_graph({{"b", "z", 0.5}}, {"a", "b"}), InputError);
}

TEST(Modularity, HandComputedCases) {
  // Two equal-weight 5-cliques split perfectly: each community holds half
  // the edges and half the degree, Q = 2 * (1/2 - 1/4).
  const auto g = toy_graph();
  std::vector<int> split;
  for (const auto& id : g.nodes()) split.push_back(id[0] == 'A' ? 0 : 1);
  EXPECT_NEAR(modularity(g, split), 0.5, 1e-12);
  EXPECT_NEAR(modularity(g, std::vector<int>(10, 0)), 0.0, 1e-12);

  // Single edge, two singletons: Q = 1/(2m) * (-k^2/2m) * 2 = -1/2.
  const auto one = build_graph({{"b", "a", 0.3}});
  EXPECT_NEAR(modularity(one, std::vector<int>{0, 1}), -0.5, 1e-12);
  EXPECT_EQ(modularity(build_graph({}, {"a"}), std::vector<int>{0}), 0.0);
}

TEST(Louvain, ToyFindsTwoGroups) {
  const auto g = toy_graph();
  const auto a = louvain(g);
  EXPECT_EQ(a.cluster_count, 2);
  for (const auto& [id, c] : a.cluster) EXPECT_EQ(c, id[0] == 'A' ? 0 : 1);
  const auto [best, best_q] = brute_force_modularity(g);
  EXPECT_NEAR(a.modularity, best_q, 1e-9);
  EXPECT_NEAR(a.modularity, 0.5, 1e-12);
}

TEST(Louvain, EdgelessGraphGivesSingletons) {
  const auto g = build_graph({}, {"c", "a", "b"});
  const auto a = louvain(g);
  EXPECT_EQ(a.cluster_count, 3);
  EXPECT_EQ(a.modularity, 0.0);
  EXPECT_EQ(a.cluster.at("a"), 0);
  EXPECT_EQ(a.cluster.at("b"), 1);
  EXPECT_EQ(a.cluster.at("c"), 2);
}

TEST(Louvain, EmptyGraph) {
  const auto a = louvain(PracticeGraph{});
  EXPECT_EQ(a.cluster_count, 0);
  EXPECT_TRUE(a.cluster.empty());
}

TEST(Louvain, IsolatedNodeStaysAlone) {
  auto edges = pairwise_similarities(testing::toy_vectors(), SimilarityThreshold{0.6});
  std::set<std::string> nodes{"Z"};
  for (const auto& e : edges) nodes.insert({e.source, e.target});
  const auto a = louvain(build_graph(edges, nodes));
  EXPECT_EQ(a.cluster_count, 3);
  for (const auto& [id, c] : a.cluster) {
    if (id != "Z") {
      EXPECT_NE(c, a.cluster.at("Z"));
    }
  }
}

TEST(Louvain, SingleCliqueIsOneCluster) {
  std::vector<SimilarityEdge> edges;
  for (char i = 'a'; i <= 'f'; ++i) {
    for (char j = 'a'; j < i; ++j) edges.push_back({std::string(1, i), std::string(1, j), 0.9});
  }
  const auto a = louvain(build_graph(edges));
  EXPECT_EQ(a.cluster_count, 1);
  EXPECT_NEAR(a.modularity, 0.0, 1e-12);
}

TEST(Louvain, ResolutionMustBePositive) {
  EXPECT_THROW(louvain(toy_graph(), 0.0), ConfigError);
  EXPECT_THROW(louvain(toy_graph(), -1.0), ConfigError);
}

TEST(Louvain, DeterministicForSeed) {
  std::mt19937_64 rng(5);
  const auto g = random_graph(rng, 40, 0.15);
  LouvainOptions opt;
  opt.seed = 77;
  const auto a = louvain(g, opt);
  for (int i = 0; i < 3; ++i) {
    const auto b = louvain(g, opt);
    EXPECT_EQ(a.cluster, b.cluster);
    EXPECT_EQ(a.modularity, b.modularity);
  }
}

class LouvainProperty : public ::testing::TestWithParam<int> {};

TEST_P(LouvainProperty, NearBruteForceOptimum) {
  std::mt19937_64 rng(GetParam());
  const auto g = random_graph(rng, 10, 0.35);
  const auto a = louvain(g);
  const auto [best, best_q] = brute_force_modularity(g);
  EXPECT_NEAR(a.modularity, modularity(g, membership_of(g, a)), 1e-12);
  EXPECT_LE(a.modularity, best_q + 1e-9);
  if (best_q > 0) {
    EXPECT_GE(a.modularity, 0.95 * best_q);
  }
}

TEST_P(LouvainProperty, TraceIsNonDecreasing) {
  std::mt19937_64 rng(GetParam() + 100);
  const auto g = random_graph(rng, 60, 0.08);
  const auto a = louvain(g);
  ASSERT_FALSE(a.modularity_trace.empty());
  for (std::size_t i = 1; i < a.modularity_trace.size(); ++i) {
    EXPECT_GE(a.modularity_trace[i], a.modularity_trace[i - 1] - 1e-12);
  }
  EXPECT_NEAR(a.modularity_trace.back(), a.modularity, 1e-12);
}

TEST_P(LouvainProperty, PlantedPartitionSurvivesRelabeling) {
  std::mt19937_64 rng(GetParam() + 200);
  constexpr int kGroups = 3;
  constexpr int kSize = 6;
  std::uniform_real_distribution<double> strong(0.7, 1.0);
  std::uniform_real_distribution<double> weak(0.0, 0.1);
  std::vector<std::tuple<int, int, double>> raw;
  for (int i = 0; i < kGroups * kSize; ++i) {
    for (int j = 0; j < i; ++j) {
      const bool same = i / kSize == j / kSize;
      raw.emplace_back(i, j, same ? strong(rng) : weak(rng));
    }
  }
  auto cluster_with = [&](const std::vector<std::string>& names) {
    std::vector<SimilarityEdge> edges;
    for (const auto& [i, j, w] : raw) {
      if (w > 0.05) edges.push_back({names[i], names[j], w});
    }
    std::set<std::string> all(names.begin(), names.end());
    const auto a = louvain(build_graph(edges, all));
    std::vector<int> by_index;
    for (const auto& n : names) by_index.push_back(a.cluster.at(n));
    return canonical(by_index);
  };
  std::vector<std::string> names;
  for (int i = 0; i < kGroups * kSize; ++i) names.push_back("v" + std::to_string(100 + i));
  const auto expected = cluster_with(names);
  std::vector<int> planted;
  for (int i = 0; i < kGroups * kSize; ++i) planted.push_back(i / kSize);
  EXPECT_EQ(expected, canonical(planted));
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(names.begin(), names.end(), rng);
    EXPECT_EQ(cluster_with(names), expected);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, LouvainProperty, ::testing::Range(1, 21));

TEST(BruteForceModularity, RefusesLargeGraphs) {
  std::mt19937_64 rng(1);
  EXPECT_THROW(brute_force_modularity(random_graph(rng, 13, 0.3)), MisuseError);
}

TEST(BruteForceModularity, PathOfFour) {
  // a-b-c-d with unit weights, m = 3. Each half holds one edge and degree 3:
  // Q = 2 * (1/3 - (3/6)^2) = 1/6.
  const auto g = build_graph({{"b", "a", 1}, {"c", "b", 1}, {"d", "c", 1}});
  const auto [best, q] = brute_force_modularity(g);
  EXPECT_NEAR(q, 1.0 / 6.0, 1e-12);
  EXPECT_EQ(best[0], best[1]);
  EXPECT_EQ(best[2], best[3]);
  EXPECT_NE(best[0], best[2]);
}

TEST(IntraDegree, ToyNodesHaveFourEdges) {
  const auto g = toy_graph();
  const auto a = louvain(g);
  for (const auto& [id, d] : intra_cluster_weighted_degree(g, a)) EXPECT_NEAR(d, 4 * 8.0 / 9.0, 1e-12);
}

TEST(IntraDegree, CrossClusterEdgesIgnored) {
  const auto g = build_graph({{"b", "a", 0.5}, {"c", "a", 0.25}, {"c", "b", 0.75}});
  ClusterAssignment a;
  a.cluster = {{"a", 0}, {"b", 0}, {"c", 1}};
  a.cluster_count = 2;
  const auto d = intra_cluster_weighted_degree(g, a);
  EXPECT_EQ(d.at("a"), 0.5);
  EXPECT_EQ(d.at("b"), 0.5);
  EXPECT_EQ(d.at("c"), 0.0);
}

TEST(Archetypes, RankingAndTieBreak) {
  ClusterAssignment a;
  a.cluster = {{"p", 0}, {"c", 0}, {"b", 0}, {"d", 0}};
  const std::map<std::string, double> degrees{{"p", 3.0}, {"c", 2.5}, {"b", 2.5}, {"d", 1.0}};
  const auto r = top_archetypes(degrees, a, 3);
  const std::vector<RankedAccount> expected{{"p", 3.0}, {"b", 2.5}, {"c", 2.5}};
  EXPECT_EQ(r.at(0), expected);
  EXPECT_EQ(top_archetypes(degrees, a, 10).at(0).size(), 4u);
  EXPECT_THROW(top_archetypes(degrees, a, 0), ConfigError);
}

TEST(Archetypes, ToyClustersAllTied) {
  const auto g = toy_graph();
  const auto a = louvain(g);
  const auto r = top_archetypes(g, a, 2);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r.at(0)[0].account, "A1");
  EXPECT_EQ(r.at(0)[1].account, "A2");
  EXPECT_EQ(r.at(1)[0].account, "B1");
}

}  // namespace
}  // namespace practice_map
