#pragma once

// Per-token syntactic complexity: Yngve depth, Frazier depth, node density and
// dependency distance.

#include <cstdlib>
#include <string>
#include <vector>

#include "splitbench/treebank.hpp"

namespace splitbench {

struct ComplexityScores {
  double yngve = 0.0;
  double frazier = 0.0;
  double tnodes = 0.0;
  double dep_length = 0.0;
};

struct FrazierOptions {
  /// Labels starting with any of these prefixes are sentence nodes.
  std::vector<std::string> sentence_prefixes{"S"};
  double sentence_weight = 1.5;
  double node_weight = 1.0;

  bool is_sentence(const std::string& label) const {
    for (const auto& p : sentence_prefixes)
      if (label.rfind(p, 0) == 0) return true;
    return false;
  }
};

namespace detail {

inline void yngve_walk(const ParseTree& t, double cost,
                       std::vector<double>& out) {
  if (t.is_leaf()) {
    out.push_back(cost);
    return;
  }
  const std::size_t k = t.children.size();
  for (std::size_t i = 0; i < k; ++i)
    yngve_walk(t.children[i], cost + static_cast<double>(k - 1 - i), out);
}

struct PathEntry {
  const ParseTree* node;
  std::size_t child_index;  // position under its parent; unused for the root
};

inline void frazier_walk(const ParseTree& t, std::vector<PathEntry>& path,
                         const FrazierOptions& opts, std::vector<double>& out) {
  if (t.is_leaf()) {
    // path.back() is this leaf; its parent is path[size - 2].
    double score = 0.0;
    if (path.back().child_index == 0) {
      for (std::size_t k = path.size() - 1; k-- > 0;) {
        const ParseTree& node = *path[k].node;
        const double w = opts.is_sentence(node.label) ? opts.sentence_weight
                                                      : opts.node_weight;
        if (k == 0) {
          score += w;
          break;
        }
        if (path[k].child_index != 0) break;
        score += w;
      }
    }
    out.push_back(score);
    return;
  }
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    path.push_back({&t.children[i], i});
    frazier_walk(t.children[i], path, opts, out);
    path.pop_back();
  }
}

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace detail

/// Cost of each token: sum over root-to-leaf edges of the number of right
/// sisters of the child the edge leads to.
inline std::vector<double> yngve_word_costs(const ParseTree& tree) {
  std::vector<double> out;
  detail::yngve_walk(tree, 0.0, out);
  return out;
}

inline double yngve_score(const ParseTree& tree) {
  return detail::mean_of(yngve_word_costs(tree));
}

/// Each token climbs from its POS node while the current node is the leftmost
/// child of its parent. Visited nodes score 1 (sentence nodes 1.5); reaching
/// the root counts the root too. Tokens that are not a leftmost child get 0.
inline std::vector<double> frazier_word_scores(const ParseTree& tree,
                                               const FrazierOptions& opts = {}) {
  if (tree.is_leaf()) return {0.0};
  std::vector<double> out;
  std::vector<detail::PathEntry> path{{&tree, 0}};
  detail::frazier_walk(tree, path, opts, out);
  return out;
}

inline double frazier_score(const ParseTree& tree,
                            const FrazierOptions& opts = {}) {
  return detail::mean_of(frazier_word_scores(tree, opts));
}

/// Non-terminal nodes per token. With `count_tokens` the token leaves are
/// included in the numerator as well.
inline double tnodes(const ParseTree& tree, bool count_tokens = false) {
  const auto leaves = leaf_count(tree);
  const auto nodes = node_count(tree);
  const auto numerator = count_tokens ? nodes : nodes - leaves;
  return static_cast<double>(numerator) / static_cast<double>(leaves);
}

/// Mean linear arc length |head - dependent| over non-root tokens. A
/// single-token sentence has no arcs and scores 0.
inline double dep_distance(const DepGraph& graph) {
  double total = 0.0;
  std::size_t arcs = 0;
  for (const auto& t : graph.tokens) {
    if (t.head == 0) continue;
    total += static_cast<double>(t.head > t.index ? t.head - t.index
                                                  : t.index - t.head);
    ++arcs;
  }
  return arcs == 0 ? 0.0 : total / static_cast<double>(arcs);
}

}  // namespace splitbench
