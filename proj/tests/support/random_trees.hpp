#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "splitbench/treebank.hpp"

namespace splitbench::testing {

struct TreeShapeOptions {
  std::vector<std::string> categories{"A", "B", "C"};
  std::vector<std::string> tokens{"x", "y"};
};

/// Random ordered tree with exactly `nodes` nodes: each new node is appended
/// under a uniformly chosen existing node. Childless nodes become tokens.
inline ParseTree random_tree(std::mt19937_64& rng, std::size_t nodes,
                             const TreeShapeOptions& opts = {}) {
  struct Proto {
    std::vector<std::size_t> kids;
  };
  std::vector<Proto> protos(1);
  for (std::size_t i = 1; i < nodes; ++i) {
    std::uniform_int_distribution<std::size_t> parent(0, protos.size() - 1);
    const std::size_t p = parent(rng);
    std::uniform_int_distribution<std::size_t> pos(0, protos[p].kids.size());
    protos[p].kids.insert(protos[p].kids.begin() + static_cast<std::ptrdiff_t>(pos(rng)), i);
    protos.emplace_back();
  }
  std::uniform_int_distribution<std::size_t> cat(0, opts.categories.size() - 1);
  std::uniform_int_distribution<std::size_t> tok(0, opts.tokens.size() - 1);
  auto build = [&](auto&& self, std::size_t id) -> ParseTree {
    if (protos[id].kids.empty()) return ParseTree(opts.tokens[tok(rng)]);
    ParseTree t(opts.categories[cat(rng)]);
    for (auto k : protos[id].kids) t.children.push_back(self(self, k));
    return t;
  };
  return build(build, 0);
}

inline ParseTree random_tree_upto(std::mt19937_64& rng, std::size_t min_nodes,
                                  std::size_t max_nodes, const TreeShapeOptions& opts = {}) {
  std::uniform_int_distribution<std::size_t> n(min_nodes, max_nodes);
  return random_tree(rng, n(rng), opts);
}

/// Strictly right-branching binary tree: (X w1 (X w2 (X ... wn))).
inline ParseTree right_branching(std::size_t n) {
  ParseTree t("X", {ParseTree("w" + std::to_string(n))});
  for (std::size_t i = n - 1; i >= 1; --i)
    t = ParseTree("X", {ParseTree("w" + std::to_string(i)), std::move(t)});
  return t;
}

/// Strictly left-branching binary tree: (X (X (X w1 w2) ...) wn).
inline ParseTree left_branching(std::size_t n) {
  ParseTree t("X", {ParseTree("w1")});
  for (std::size_t i = 2; i <= n; ++i)
    t = ParseTree("X", {std::move(t), ParseTree("w" + std::to_string(i))});
  return t;
}

}  // namespace splitbench::testing
