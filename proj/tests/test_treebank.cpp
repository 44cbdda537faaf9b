#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "splitbench/treebank.hpp"
#include "support/oracles.hpp"
#include "support/random_trees.hpp"

using namespace splitbench;

namespace {

const char* kWorkedExample = "(S (NP Vanya) (VP (V walks) (NP home)))";

std::string conllu_block(const std::vector<std::size_t>& heads) {
  std::string out;
  for (std::size_t i = 0; i < heads.size(); ++i)
    out += std::to_string(i + 1) + "\tw" + std::to_string(i + 1) + "\t_\t_\t_\t_\t" +
           std::to_string(heads[i]) + "\tdep\t_\t_\n";
  return out;
}

}  // namespace

TEST(ParsePtb, WorkedExampleTree) {
  const auto trees = parse_ptb(kWorkedExample);
  ASSERT_EQ(trees.size(), 1u);
  EXPECT_EQ(trees[0].label, "S");
  EXPECT_EQ(trees[0].children.size(), 2u);
  EXPECT_EQ(yield_tokens(trees[0]), (std::vector<std::string>{"Vanya", "walks", "home"}));
}

TEST(ParsePtb, UnbalancedReportsOffset) {
  try {
    parse_ptb("(X a");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
}

TEST(ParsePtb, StrayCloser) { EXPECT_THROW(parse_ptb("(A b))"), ParseError); }

TEST(ParsePtb, TwoTopLevelGroups) { EXPECT_EQ(parse_ptb("(A b) (C d)").size(), 2u); }

TEST(ParsePtb, EmptyInputIsEmptyList) {
  EXPECT_TRUE(parse_ptb("").empty());
  EXPECT_TRUE(parse_ptb("  \n\t").empty());
}

TEST(ParsePtb, NoYieldIsValidationError) {
  EXPECT_THROW(parse_ptb("(S (-NONE- *T*))"), ValidationError);
  EXPECT_THROW(parse_ptb("(S (NP))"), ValidationError);
}

TEST(ParsePtb, UnlabeledWrapperCollapsed) {
  const auto t = parse_ptb_one("( (S (NP x) (VP y)))");
  EXPECT_EQ(t.label, "S");
  const auto r = parse_ptb_one("(ROOT (S (NP x) (VP y)))");
  EXPECT_EQ(r, t);
}

TEST(ParsePtb, FunctionTagsAndTracesStripped) {
  const auto t = parse_ptb_one("(S (NP-SBJ-1 (NN x)) (VP (VBD y) (NP (-NONE- *T*-1))) (. .))");
  EXPECT_EQ(to_bracket(t), "(S (NP (NN x)) (VP (VBD y)) (. .))");
}

TEST(ParsePtb, SpecialBracketLabelsKept) {
  const auto t = parse_ptb_one("(S (-LRB- -LRB-) (NN x) (-RRB- -RRB-))");
  EXPECT_EQ(t.children[0].label, "-LRB-");
  EXPECT_EQ(t.children[2].label, "-RRB-");
}

TEST(ParsePtb, PunctuationFlag) {
  PtbOptions o;
  o.keep_punctuation = false;
  const auto t = parse_ptb_one("(S (NP x) (VP y) (. .))", o);
  EXPECT_EQ(yield_tokens(t), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(t.children.size(), 2u);
}

TEST(YieldTokens, SingleLeafAndUnaryChain) {
  EXPECT_EQ(yield_tokens(parse_ptb_one("(X w)")), std::vector<std::string>{"w"});
  EXPECT_EQ(yield_tokens(parse_ptb_one("(A (B (C w)))")), std::vector<std::string>{"w"});
}

TEST(TreebankProperties, RoundTripAndYieldCount) {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 500; ++i) {
    const auto t = splitbench::testing::random_tree_upto(rng, 2, 30);
    const auto back = parse_ptb_one(to_bracket(t));
    ASSERT_EQ(back, t) << to_bracket(t);
    ASSERT_EQ(yield_tokens(t).size(), leaf_count(t));
  }
}

TEST(ParseConllu, MinimalBlock) {
  const auto g = parse_conllu("1\tVanya\t_\t_\t_\t_\t2\tnsubj\t_\t_\n2\twalks\t_\t_\t_\t_\t0\troot\t_\t_\n");
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].size(), 2u);
  EXPECT_EQ(g[0].root_index(), 2u);
  EXPECT_EQ(g[0].tokens[0].relation, "nsubj");
}

TEST(ParseConllu, CycleRejected) { EXPECT_THROW(parse_conllu(conllu_block({2, 1})), ValidationError); }

TEST(ParseConllu, RootCountEnforced) {
  EXPECT_THROW(parse_conllu(conllu_block({0, 0})), ValidationError);
  EXPECT_THROW(parse_conllu(conllu_block({2, 3, 1})), ValidationError);
}

TEST(ParseConllu, ThreeBlocksWithCommentsAndRanges) {
  std::string text = "# sent_id = 1\n" + conllu_block({2, 0}) + "\n" + conllu_block({0}) +
                     "\n# text = x\n1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n" +
                     conllu_block({0, 1, 1}) + "1.1\tgap\t_\t_\t_\t_\t_\t_\t_\t_\n\n";
  const auto g = parse_conllu(text);
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g[2].size(), 3u);
}

TEST(ParseConllu, MissingHeadColumn) {
  EXPECT_THROW(parse_conllu("1\tx\t_\t_\t_\t_\n"), ParseError);
}

TEST(ParseConllu, AcceptsExactlySingleRootedTrees) {
  std::mt19937_64 rng(7);
  int accepted = 0;
  for (int i = 0; i < 3000; ++i) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    std::vector<std::size_t> heads(n);
    for (auto& h : heads) h = std::uniform_int_distribution<std::size_t>(0, n)(rng);
    const bool expect_ok = oracle::heads_form_tree(heads);
    bool ok = true;
    try {
      parse_conllu(conllu_block(heads));
    } catch (const ValidationError&) {
      ok = false;
    }
    ASSERT_EQ(ok, expect_ok);
    accepted += ok;
  }
  EXPECT_GT(accepted, 100);
}
