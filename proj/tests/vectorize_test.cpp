#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "test_util.hpp"

namespace practice_map {
namespace {

DimensionKey key(const std::string& label, const std::string& block = "") { return {block, label}; }

PracticeVector raw_vector(std::map<std::string, double> entries, const std::string& account = "x") {
  PracticeVector v;
  v.account_id = account;
  v.aspect = "interactions";
  for (const auto& [label, value] : entries) {
    v.entries[key(label)] = value;
    v.total += value;
  }
  return v;
}

TEST(InteractionVectors, ToyAccountHasNineUnitDimensions) {
  const auto vectors = testing::toy_vectors();
  ASSERT_EQ(vectors.size(), 10u);
  const auto& a1 = vectors.at("A1");
  EXPECT_EQ(a1.entries.size(), 9u);
  EXPECT_EQ(a1.total, 9.0);
  for (const char* peer : {"A2", "A3", "A4", "A5"}) {
    EXPECT_EQ(a1.entries.at(key(interaction_dimension(peer, "retweet"))), 1.0);
  }
  for (const char* opp : {"B1", "B2", "B3", "B4", "B5"}) {
    EXPECT_EQ(a1.entries.at(key(interaction_dimension(opp, "mention"))), 1.0);
  }
  EXPECT_FALSE(a1.entries.contains(key("A1 retweet")));
}

TEST(InteractionVectors, IncomingModeReversesDirection) {
  const std::vector<InteractionRecord> recs{{"1", "X", "Y", "retweet", std::nullopt}};
  InteractionVectorOptions opt;
  opt.direction = Direction::incoming;
  const auto v = accumulate_interaction_vectors(recs, opt);
  ASSERT_EQ(v.size(), 1u);
  ASSERT_TRUE(v.contains("Y"));
  EXPECT_EQ(v.at("Y").entries.at(key("X retweet")), 1.0);
  EXPECT_EQ(v.at("Y").direction, Direction::incoming);
}

TEST(InteractionVectors, AppendixAccountTotals) {
  std::vector<InteractionRecord> recs;
  for (int i = 0; i < 90; ++i) recs.push_back({std::to_string(i), "111222", "333444", "retweet", {}});
  for (int i = 0; i < 10; ++i) recs.push_back({std::to_string(100 + i), "111222", "666777", "mention", {}});
  const auto v = accumulate_interaction_vectors(recs).at("111222");
  EXPECT_EQ(v.total, 100.0);
  EXPECT_EQ(v.entries.size(), 2u);
  EXPECT_EQ(v.entries.at(key("333444 retweet")), 90.0);
  EXPECT_EQ(v.entries.at(key("666777 mention")), 10.0);
  const auto n = normalize(v);
  EXPECT_DOUBLE_EQ(n.entries.at(key("333444 retweet")), 0.9);
  EXPECT_DOUBLE_EQ(n.entries.at(key("666777 mention")), 0.1);
  EXPECT_EQ(n.total, 100.0);
}

TEST(InteractionVectors, CombinedModeHasTwoBlocks) {
  const std::vector<InteractionRecord> recs{{"1", "X", "Y", "retweet", {}},
                                            {"2", "X", "Z", "mention", {}},
                                            {"3", "Z", "X", "mention", {}}};
  InteractionVectorOptions opt;
  opt.direction = Direction::combined;
  const auto vs = accumulate_interaction_vectors(recs, opt);
  const auto& x = vs.at("X");
  EXPECT_EQ(x.entries.at(key("Y retweet", "out")), 1.0);
  EXPECT_EQ(x.entries.at(key("Z mention", "out")), 1.0);
  EXPECT_EQ(x.entries.at(key("Z mention", "in")), 1.0);
  EXPECT_EQ(x.total, 3.0);
  const auto n = normalize(x);
  const auto sums = n.block_sums();
  EXPECT_NEAR(sums.at("out"), 1.0, 1e-9);
  EXPECT_NEAR(sums.at("in"), 1.0, 1e-9);
  EXPECT_EQ(n.entries.at(key("Z mention", "in")), 1.0);
  // Y only receives, so its outgoing block is absent.
  EXPECT_EQ(normalize(vs.at("Y")).block_sums().count("out"), 0u);
}

TEST(InteractionVectors, TypeFilterAndSelfToggle) {
  const std::vector<InteractionRecord> recs{{"1", "X", "X", "retweet", {}},
                                            {"2", "X", "Y", "quote", {}},
                                            {"3", "X", "Y", "mention", {}}};
  InteractionVectorOptions opt;
  opt.type_filter = std::set<std::string>{"retweet", "mention"};
  auto v = accumulate_interaction_vectors(recs, opt).at("X");
  EXPECT_EQ(v.total, 2.0);
  EXPECT_TRUE(v.entries.contains(key("X retweet")));
  opt.include_self = false;
  v = accumulate_interaction_vectors(recs, opt).at("X");
  EXPECT_EQ(v.total, 1.0);
  EXPECT_FALSE(v.entries.contains(key("X retweet")));
}

TEST(InteractionVectors, EmptyInputGivesEmptyMap) {
  EXPECT_TRUE(accumulate_interaction_vectors({}).empty());
}

TEST(InteractionVectors, OrderIndependent) {
  auto recs = generate_polarized(PolarizedScenario{{3, 4, 2}, "retweet", "mention", 3});
  const auto expected = accumulate_interaction_vectors(recs);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(recs.begin(), recs.end(), rng);
    EXPECT_EQ(accumulate_interaction_vectors(recs), expected);
  }
}

TEST(AttributeVectors, HashtagExample) {
  std::istringstream in("account_id,dimension,value\nA1,#H1,30\nA1,#H2,20\nA1,none,50\n");
  const auto vs = accumulate_attribute_vectors(parse_attributes(in, "hashtags").records);
  const auto& a1 = vs.at("A1");
  EXPECT_EQ(a1.total, 100.0);
  EXPECT_EQ(a1.aspect, "hashtags");
  const auto n = normalize(a1);
  EXPECT_EQ(n.entries.at(key("#H1")), 0.3);
  EXPECT_EQ(n.entries.at(key("#H2")), 0.2);
  EXPECT_EQ(n.entries.at(key("none")), 0.5);
}

TEST(AttributeVectors, ZeroValueLeavesEmptyVector) {
  const auto vs = accumulate_attribute_vectors({{"A", "topics", "t1", 0.0}});
  ASSERT_TRUE(vs.contains("A"));
  EXPECT_TRUE(vs.at("A").degenerate());
  EXPECT_EQ(vs.at("A").total, 0.0);
  EXPECT_TRUE(normalize(vs.at("A")).degenerate());
}

TEST(AttributeVectors, DisjointAccountsDisjointKeys) {
  const auto vs = accumulate_attribute_vectors(
      {{"A", "hashtags", "#x", 2}, {"B", "hashtags", "#y", 3}, {"A", "hashtags", "#z", 1}});
  ASSERT_EQ(vs.size(), 2u);
  for (const auto& [k, v] : vs.at("A").entries) EXPECT_FALSE(vs.at("B").entries.contains(k));
}

TEST(AttributeVectors, MixedAspectsRejected) {
  EXPECT_THROW(accumulate_attribute_vectors({{"A", "hashtags", "#x", 2}, {"A", "topics", "t", 1}}),
               InputError);
}

TEST(Normalize, SeventyExample) {
  const auto n = normalize(raw_vector({{"RT B1", 50}, {"@ B2", 20}}));
  EXPECT_NEAR(n.entries.at(key("RT B1")), 0.714286, 1e-6);
  EXPECT_NEAR(n.entries.at(key("@ B2")), 0.285714, 1e-6);
  EXPECT_EQ(n.total, 70.0);
  EXPECT_TRUE(n.normalized);
}

TEST(Normalize, SingleEntryBecomesOne) {
  for (double k : {1e-300, 0.5, 3.0, 1e12}) {
    EXPECT_EQ(normalize(raw_vector({{"d", k}})).entries.at(key("d")), 1.0);
  }
}

TEST(Normalize, AlreadyNormalizedIsMisuse) {
  const auto n = normalize(raw_vector({{"d", 2}}));
  EXPECT_THROW(normalize(n), MisuseError);
}

// Property: scaling every raw count of an account by k > 0 leaves the
// normalized vector bit-identical.
TEST(NormalizeProperty, ScaleInvariance) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    std::map<std::string, double> entries;
    const int n = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) entries["d" + std::to_string(rng() % 100)] = 1 + static_cast<double>(rng() % 500);
    const auto base = normalize(raw_vector(entries));
    for (double k : {2.0, 10.0, 1000.0}) {
      std::map<std::string, double> scaled;
      for (const auto& [d, v] : entries) scaled[d] = v * k;
      EXPECT_EQ(normalize(raw_vector(scaled)).entries, base.entries);
    }
  }
}

TEST(NormalizeProperty, SumsToOne) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> value(1e-6, 1e6);
  for (int trial = 0; trial < 200; ++trial) {
    std::map<std::string, double> entries;
    const int n = 1 + static_cast<int>(rng() % 200);
    for (int i = 0; i < n; ++i) entries["d" + std::to_string(i)] = value(rng);
    const auto sums = normalize(raw_vector(entries)).block_sums();
    EXPECT_NEAR(sums.at(""), 1.0, 1e-9);
  }
}

TEST(ActivityFilter, BoundaryIsInclusive) {
  VectorMap vs;
  vs["A"] = raw_vector({{"d", 100}}, "A");
  vs["B"] = raw_vector({{"d", 99}}, "B");
  vs["C"] = raw_vector({{"d", 250}}, "C");
  const auto r = filter_by_activity(vs, ActivityThreshold{100});
  EXPECT_EQ(r.retained.size(), 2u);
  EXPECT_TRUE(r.retained.contains("A"));
  EXPECT_TRUE(r.retained.contains("C"));
  EXPECT_EQ(r.dropped, std::vector<std::string>{"B"});
  EXPECT_EQ(filter_by_activity(vs, ActivityThreshold{0}).retained, vs);
}

TEST(ActivityFilter, ToyAccountsAllHaveNine) {
  const auto r = filter_by_activity(testing::toy_vectors(), ActivityThreshold{9});
  EXPECT_EQ(r.retained.size(), 10u);
  EXPECT_EQ(filter_by_activity(testing::toy_vectors(), ActivityThreshold{10}).retained.size(), 0u);
}

TEST(ActivityFilter, NegativeThresholdRejected) {
  EXPECT_THROW(ActivityThreshold{-1}, ConfigError);
}

TEST(VectorDump, RoundTripKeepsRawValuesAndDegenerates) {
  std::map<std::string, VectorMap> raw;
  raw["interactions"] = testing::toy_vectors();
  raw["topics"] = accumulate_attribute_vectors(
      {{"A1", "topics", "t1", 0.125}, {"A1", "topics", "t2", 0.3}, {"B1", "topics", "t1", 0.0}});
  std::stringstream buf;
  write_vectors(buf, raw);
  const auto back = read_vectors(buf);
  EXPECT_EQ(back, raw);
  EXPECT_TRUE(back.at("topics").at("B1").degenerate());
}

TEST(VectorDump, WrongHeaderNamesBoth) {
  std::istringstream in("Source,Target,Weight\n");
  try {
    read_vectors(in);
    FAIL();
  } catch (const InputError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("Account"), std::string::npos);
    EXPECT_NE(msg.find("Source"), std::string::npos);
  }
}

}  // namespace
}  // namespace practice_map
