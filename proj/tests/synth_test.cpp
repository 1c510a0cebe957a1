#include <gtest/gtest.h>

#include "test_util.hpp"

namespace practice_map {
namespace {

TEST(Synth, DefaultScenarioCounts) {
  const auto recs = generate_polarized(PolarizedScenario{});
  EXPECT_EQ(recs.size(), 90u);
  std::size_t retweets = 0;
  for (const auto& r : recs) {
    EXPECT_NE(r.author_id, r.target_id);
    ASSERT_TRUE(r.timestamp);
    if (r.interaction_type == "retweet") {
      ++retweets;
      EXPECT_EQ(r.author_id[0], r.target_id[0]);
    } else {
      EXPECT_EQ(r.interaction_type, "mention");
      EXPECT_NE(r.author_id[0], r.target_id[0]);
    }
  }
  EXPECT_EQ(retweets, 40u);
  EXPECT_EQ(recs.front().post_id, "1");
  EXPECT_EQ(recs.back().post_id, "90");
}

TEST(Synth, SingletonGroups) {
  const auto recs = generate_polarized(PolarizedScenario{{1, 1}, "retweet", "mention", 1});
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].author_id, "A1");
  EXPECT_EQ(recs[0].target_id, "B1");
  EXPECT_EQ(recs[1].author_id, "B1");
  EXPECT_EQ(recs[1].target_id, "A1");
}

TEST(Synth, RepetitionsScaleCounts) {
  PolarizedScenario s{{3, 2, 4}, "quote", "reply", 1};
  const auto once = generate_polarized(s);
  // n_total * (n_total - 1) ordered pairs.
  EXPECT_EQ(once.size(), 9u * 8u);
  s.repetitions = 3;
  EXPECT_EQ(generate_polarized(s).size(), 3 * once.size());
}

TEST(Synth, TimestampsAdvanceByWeek) {
  const auto recs = generate_polarized(PolarizedScenario{});
  EXPECT_EQ(format_timestamp(*recs.front().timestamp), "2024-01-01T12:00:00Z");
  EXPECT_EQ(format_timestamp(*recs.back().timestamp), "2024-03-04T12:00:00Z");
}

TEST(Synth, Deterministic) {
  PolarizedScenario s{{4, 7}, "retweet", "mention", 2};
  EXPECT_EQ(generate_polarized(s), generate_polarized(s));
}

TEST(Synth, InvalidScenarios) {
  EXPECT_THROW(generate_polarized(PolarizedScenario{{5}, "r", "m", 1}), ConfigError);
  EXPECT_THROW(generate_polarized(PolarizedScenario{{5, 0}, "r", "m", 1}), ConfigError);
  EXPECT_THROW(generate_polarized(PolarizedScenario{{5, 5}, "r", "m", 0}), ConfigError);
  EXPECT_THROW(generate_polarized(PolarizedScenario{{5, 5}, "", "m", 1}), ConfigError);
}

TEST(Synth, GroupLabels) {
  EXPECT_EQ(group_label(0), "A");
  EXPECT_EQ(group_label(25), "Z");
  EXPECT_EQ(group_label(26), "G27");
}

TEST(Synth, ThreeGroupsClusterApart) {
  const auto recs = generate_polarized(PolarizedScenario{{4, 5, 6}, "retweet", "mention", 1});
  const auto edges = pairwise_similarities(accumulate_interaction_vectors(recs), SimilarityThreshold{0.6});
  const auto a = louvain(build_graph(edges));
  EXPECT_EQ(a.cluster_count, 3);
  for (const auto& [id, c] : a.cluster) EXPECT_EQ(c, id[0] - 'A');
}

TEST(BruteForcePairwise, RefusesLargeInputs) {
  VectorMap vs;
  for (int i = 0; i < 201; ++i) {
    PracticeVector v;
    v.account_id = std::to_string(i);
    v.entries[{"", "d"}] = 1;
    vs.emplace(v.account_id, v);
  }
  EXPECT_THROW(brute_force_pairwise(vs, 0.0), MisuseError);
}

TEST(BruteForcePairwise, ToyValues) {
  const auto edges = brute_force_pairwise(testing::toy_vectors(), 0.0);
  ASSERT_EQ(edges.size(), 45u);
  std::size_t strong = 0;
  for (const auto& e : edges) {
    if (e.weight > 0.5) {
      ++strong;
      EXPECT_NEAR(e.weight, 8.0 / 9.0, 1e-15);
    } else {
      EXPECT_EQ(e.weight, 0.0);
    }
  }
  EXPECT_EQ(strong, 20u);
}

TEST(BruteForceModularity, EmptyAndEdgeless) {
  EXPECT_EQ(brute_force_modularity(PracticeGraph{}).second, 0.0);
  EXPECT_EQ(brute_force_modularity(build_graph({}, {"a", "b", "c"})).second, 0.0);
}

TEST(BruteForceModularity, TwoTriangles) {
  // Two unit triangles joined by one bridge: m = 7, each side holds 3 edges
  // and degree 7, Q = 2 * (3/7 - 1/4).
  const auto g = build_graph({{"b", "a", 1}, {"c", "a", 1}, {"c", "b", 1}, {"e", "d", 1},
                              {"f", "d", 1}, {"f", "e", 1}, {"d", "c", 1}});
  const auto [best, q] = brute_force_modularity(g);
  EXPECT_NEAR(q, 2 * (3.0 / 7.0 - 0.25), 1e-12);
  EXPECT_EQ(best, (std::vector<int>{0, 0, 0, 1, 1, 1}));
}

}  // namespace
}  // namespace practice_map
