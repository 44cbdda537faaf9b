#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "splitbench/complexity.hpp"
#include "support/oracles.hpp"
#include "support/random_trees.hpp"

using namespace splitbench;

namespace {

const ParseTree& vanya() {
  static const ParseTree t = parse_ptb_one("(S (NP Vanya) (VP (V walks) (NP home)))");
  return t;
}

DepGraph graph_from_heads(const std::vector<std::size_t>& heads, const std::string& rel = "dep") {
  DepGraph g;
  for (std::size_t i = 0; i < heads.size(); ++i)
    g.tokens.push_back({i + 1, "w" + std::to_string(i + 1), heads[i], rel});
  validate(g);
  return g;
}

// Random valid head array: a random tree attached in random order.
std::vector<std::size_t> random_heads(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i + 1;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> heads(n, 0);
  for (std::size_t k = 1; k < n; ++k) {
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    heads[order[k] - 1] = order[pick(rng)];
  }
  return heads;
}

}  // namespace

TEST(Yngve, WorkedExampleWordCosts) {
  EXPECT_EQ(yngve_word_costs(vanya()), (std::vector<double>{1, 1, 0}));
  EXPECT_DOUBLE_EQ(yngve_score(vanya()), 2.0 / 3.0);
}

TEST(Yngve, SingleLeaf) { EXPECT_EQ(yngve_score(parse_ptb_one("(X w)")), 0.0); }

TEST(Yngve, ZeroExactlyForUnaryChains) {
  EXPECT_EQ(yngve_score(parse_ptb_one("(A (B (C w)))")), 0.0);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    const auto t = splitbench::testing::random_tree_upto(rng, 2, 20);
    const bool unary_chain = leaf_count(t) == 1;
    EXPECT_EQ(yngve_score(t) == 0.0, unary_chain) << to_bracket(t);
    EXPECT_GE(yngve_score(t), 0.0);
  }
}

TEST(Yngve, BranchingDirection) {
  for (std::size_t n = 1; n <= 8; ++n) {
    // In the right-branching tree word i (0-based) hangs at depth i + 1.
    const auto costs = yngve_word_costs(splitbench::testing::right_branching(n));
    for (std::size_t i = 0; i < costs.size(); ++i) EXPECT_LE(costs[i], 2.0 + static_cast<double>(i));

    // Left-branching: simulate the walk down the leftmost spine.
    const auto left = splitbench::testing::left_branching(n);
    double spine = 0.0;
    for (const ParseTree* t = &left; !t->is_leaf(); t = &t->children.front())
      spine += static_cast<double>(t->children.size() - 1);
    EXPECT_EQ(yngve_word_costs(left).front(), spine);
    EXPECT_EQ(spine, static_cast<double>(n - 1));
  }
}

TEST(Frazier, WorkedExampleWordScores) {
  EXPECT_EQ(frazier_word_scores(vanya()), (std::vector<double>{2.5, 1, 0}));
  EXPECT_NEAR(frazier_score(vanya()), 3.5 / 3.0, 1e-15);
}

TEST(Frazier, SingleLeafNonSentenceRoot) {
  EXPECT_EQ(frazier_score(parse_ptb_one("(X w)")), 1.0);
}

TEST(Frazier, UnaryChainScoresItsLength) {
  std::string open, close;
  for (int k = 1; k <= 6; ++k) {
    open += "(N" + std::to_string(k) + " ";
    close += ")";
    EXPECT_EQ(frazier_score(parse_ptb_one(open + "w" + close)), k);
  }
}

TEST(Frazier, SentencePrefixesConfigurable) {
  FrazierOptions o;
  o.sentence_prefixes = {"ROOT"};
  EXPECT_EQ(frazier_word_scores(vanya(), o), (std::vector<double>{2, 1, 0}));
}

TEST(Tnodes, Examples) {
  EXPECT_DOUBLE_EQ(tnodes(vanya()), 5.0 / 3.0);
  EXPECT_EQ(tnodes(parse_ptb_one("(X w)")), 1.0);
  EXPECT_DOUBLE_EQ(tnodes(parse_ptb_one("(S (A (P a) (P b)) (B (P c) (P d)))")), 7.0 / 4.0);
  EXPECT_DOUBLE_EQ(tnodes(vanya(), true), 8.0 / 3.0);
}

TEST(DepDistance, Examples) {
  EXPECT_EQ(dep_distance(graph_from_heads({2, 0})), 1.0);
  EXPECT_EQ(dep_distance(graph_from_heads({3, 3, 0})), 1.5);
  EXPECT_EQ(dep_distance(graph_from_heads({0})), 0.0);
}

TEST(DepDistance, RelationLabelsIrrelevant) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto heads = random_heads(rng, 1 + i % 12);
    EXPECT_EQ(dep_distance(graph_from_heads(heads, "nsubj")),
              dep_distance(graph_from_heads(heads, "obl:tmod")));
  }
}

TEST(ComplexityProperties, MatchNaiveReimplementation) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    splitbench::testing::TreeShapeOptions shape;
    shape.categories = {"S", "NP", "VP", "SBAR", "X"};
    const auto t = splitbench::testing::random_tree_upto(rng, 2, 40, shape);
    ASSERT_EQ(yngve_score(t), oracle::naive_yngve(t)) << to_bracket(t);
    ASSERT_EQ(frazier_score(t), oracle::naive_frazier(t)) << to_bracket(t);
    ASSERT_EQ(tnodes(t), oracle::naive_tnodes(t)) << to_bracket(t);
    const auto heads = random_heads(rng, 1 + static_cast<std::size_t>(i % 15));
    ASSERT_EQ(dep_distance(graph_from_heads(heads)), oracle::naive_dep_distance(heads));
  }
}
