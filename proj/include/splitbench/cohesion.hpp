#pragma once

// Cross-sentence cohesion: ordered tree edit distance, convolution tree
// kernels and word-set overlap.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "splitbench/error.hpp"
#include "splitbench/treebank.hpp"

namespace splitbench {

/// A score for inputs where the measure may be undefined; degenerate inputs
/// score 0 and raise `degenerate` instead of throwing.
struct FlaggedScore {
  double value = 0.0;
  bool degenerate = false;
};

enum class KernelVariant { subset, subtree };

struct CohesionOptions {
  /// Compare trees with token leaves removed.
  bool structure_only_ted = true;
  double kernel_sigma = 1.0;
};

struct CohesionScores {
  double ted1 = 0.0;
  double ted2 = 0.0;
  double subset = 0.0;
  double subtree = 0.0;
  double overlap = 0.0;
};

namespace detail {

// Post-order view of a tree for Zhang-Shasha.
struct PostorderTree {
  std::vector<const std::string*> labels;  // 1-based; labels[0] unused
  std::vector<std::size_t> leftmost;       // leftmost leaf descendant
  std::vector<std::size_t> keyroots;

  explicit PostorderTree(const ParseTree& t) {
    labels.push_back(nullptr);
    leftmost.push_back(0);
    build(t);
    const std::size_t n = labels.size() - 1;
    std::vector<bool> seen(n + 1, false);
    for (std::size_t i = n; i >= 1; --i) {
      if (!seen[leftmost[i]]) {
        keyroots.push_back(i);
        seen[leftmost[i]] = true;
      }
    }
    std::sort(keyroots.begin(), keyroots.end());
  }

  std::size_t size() const { return labels.size() - 1; }

private:
  std::size_t build(const ParseTree& t) {
    std::size_t first_leaf = 0;
    for (std::size_t i = 0; i < t.children.size(); ++i) {
      const std::size_t child = build(t.children[i]);
      if (i == 0) first_leaf = leftmost[child];
    }
    labels.push_back(&t.label);
    const std::size_t id = labels.size() - 1;
    leftmost.push_back(t.children.empty() ? id : first_leaf);
    return id;
  }
};

// Flattened tree with interned productions for the kernel recursion.
struct KernelTree {
  struct Node {
    int production = -1;
    std::vector<std::size_t> children;  // non-leaf children only
  };
  std::vector<Node> nodes;  // post-order, non-terminals only

  KernelTree(const ParseTree& t, std::unordered_map<std::string, int>& intern) {
    add(t, intern);
  }

private:
  std::size_t add(const ParseTree& t,
                  std::unordered_map<std::string, int>& intern) {
    Node node;
    std::string prod = t.label;
    prod += " ->";
    for (const auto& c : t.children) {
      prod += ' ';
      // Leaf children are part of the production; mark them apart from
      // categories with the same spelling.
      if (c.is_leaf()) prod += '\'';
      prod += c.label;
      if (!c.is_leaf()) node.children.push_back(add(c, intern));
    }
    auto [it, inserted] =
        intern.emplace(std::move(prod), static_cast<int>(intern.size()));
    node.production = it->second;
    nodes.push_back(std::move(node));
    return nodes.size() - 1;
  }
};

inline std::string normalize_token(const std::string& tok) {
  std::string out;
  out.reserve(tok.size());
  for (char c : tok)
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace detail

/// Minimum number of unit-cost node insertions, deletions and relabelings
/// turning `a` into `b` (Zhang-Shasha).
inline std::size_t tree_edit_distance(const ParseTree& a, const ParseTree& b) {
  const detail::PostorderTree ta(a);
  const detail::PostorderTree tb(b);
  const std::size_t n = ta.size();
  const std::size_t m = tb.size();

  std::vector<std::size_t> tree_dist((n + 1) * (m + 1), 0);
  auto td = [&](std::size_t i, std::size_t j) -> std::size_t& {
    return tree_dist[i * (m + 1) + j];
  };
  std::vector<std::size_t> forest((n + 2) * (m + 2), 0);

  for (std::size_t i : ta.keyroots) {
    for (std::size_t j : tb.keyroots) {
      const std::size_t li = ta.leftmost[i];
      const std::size_t lj = tb.leftmost[j];
      const std::size_t rows = i - li + 2;
      const std::size_t cols = j - lj + 2;
      auto fd = [&](std::size_t x, std::size_t y) -> std::size_t& {
        return forest[x * cols + y];
      };
      // fd(x, y): forest li..li+x-1 vs lj..lj+y-1
      fd(0, 0) = 0;
      for (std::size_t x = 1; x < rows; ++x) fd(x, 0) = fd(x - 1, 0) + 1;
      for (std::size_t y = 1; y < cols; ++y) fd(0, y) = fd(0, y - 1) + 1;
      for (std::size_t x = 1; x < rows; ++x) {
        const std::size_t i1 = li + x - 1;
        for (std::size_t y = 1; y < cols; ++y) {
          const std::size_t j1 = lj + y - 1;
          const std::size_t del = fd(x - 1, y) + 1;
          const std::size_t ins = fd(x, y - 1) + 1;
          if (ta.leftmost[i1] == li && tb.leftmost[j1] == lj) {
            const std::size_t rel =
                fd(x - 1, y - 1) + (*ta.labels[i1] == *tb.labels[j1] ? 0 : 1);
            fd(x, y) = std::min({del, ins, rel});
            td(i1, j1) = fd(x, y);
          } else {
            const std::size_t px = ta.leftmost[i1] - li;
            const std::size_t py = tb.leftmost[j1] - lj;
            fd(x, y) = std::min({del, ins, fd(px, py) + td(i1, j1)});
          }
        }
      }
    }
  }
  return td(n, m);
}

namespace detail {

inline double ted_between(const ParseTree& a, const ParseTree& b,
                          const CohesionOptions& opts) {
  if (!opts.structure_only_ted)
    return static_cast<double>(tree_edit_distance(a, b));
  return static_cast<double>(
      tree_edit_distance(without_tokens(a), without_tokens(b)));
}

}  // namespace detail

/// Mean edit distance from the source to each sentence of its split.
inline double ted1(const ParseTree& source, std::span<const ParseTree> splits,
                   const CohesionOptions& opts = {}) {
  if (splits.empty()) throw ConfigError("ted1 needs at least one split sentence");
  double total = 0.0;
  for (const auto& s : splits) total += detail::ted_between(source, s, opts);
  return total / static_cast<double>(splits.size());
}

/// Mean edit distance over adjacent split sentences.
inline FlaggedScore ted2(std::span<const ParseTree> splits,
                         const CohesionOptions& opts = {}) {
  if (splits.empty()) throw ConfigError("ted2 needs at least one split sentence");
  if (splits.size() == 1) return {0.0, true};
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < splits.size(); ++i)
    total += detail::ted_between(splits[i], splits[i + 1], opts);
  return {total / static_cast<double>(splits.size() - 1), false};
}

/// Collins-Duffy convolution kernel. Matching productions are required at
/// every counted node pair. The subset variant weighs each non-leaf child
/// by (sigma + delta(child pair)); the subtree variant counts only complete
/// subtrees that match down to the tokens.
inline double tree_kernel(const ParseTree& a, const ParseTree& b,
                          KernelVariant variant, double sigma = 1.0) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw ConfigError("kernel sigma must be a positive finite number");
  std::unordered_map<std::string, int> intern;
  const detail::KernelTree ka(a, intern);
  const detail::KernelTree kb(b, intern);
  const std::size_t n = ka.nodes.size();
  const std::size_t m = kb.nodes.size();
  std::vector<double> delta(n * m, 0.0);
  double total = 0.0;
  // Post-order: children are always computed before their parents.
  for (std::size_t i = 0; i < n; ++i) {
    const auto& na = ka.nodes[i];
    for (std::size_t j = 0; j < m; ++j) {
      const auto& nb = kb.nodes[j];
      if (na.production != nb.production) continue;
      double d = 1.0;
      for (std::size_t c = 0; c < na.children.size(); ++c) {
        const double child = delta[na.children[c] * m + nb.children[c]];
        if (variant == KernelVariant::subset) {
          d *= sigma + child;
        } else if (child == 0.0) {
          d = 0.0;
          break;
        }
      }
      delta[i * m + j] = d;
      total += d;
    }
  }
  return total;
}

/// Mean over sentences of `doc_a` of the best normalized kernel against any
/// sentence of `doc_b`.
inline double kernel_similarity(std::span<const ParseTree> doc_a,
                                std::span<const ParseTree> doc_b,
                                KernelVariant variant, double sigma = 1.0) {
  if (doc_a.empty() || doc_b.empty())
    throw ConfigError("kernel similarity needs two non-empty documents");
  std::vector<double> self_b(doc_b.size());
  for (std::size_t j = 0; j < doc_b.size(); ++j)
    self_b[j] = tree_kernel(doc_b[j], doc_b[j], variant, sigma);
  double total = 0.0;
  for (const auto& ta : doc_a) {
    const double self_a = tree_kernel(ta, ta, variant, sigma);
    double best = 0.0;
    for (std::size_t j = 0; j < doc_b.size(); ++j) {
      const double k = tree_kernel(ta, doc_b[j], variant, sigma);
      const double norm = k / std::sqrt(self_a * self_b[j]);
      best = std::max(best, std::min(norm, 1.0));
    }
    total += best;
  }
  return total / static_cast<double>(doc_a.size());
}

/// Lowercased word types with all-punctuation tokens removed.
inline std::set<std::string> content_word_set(
    std::span<const std::string> tokens) {
  std::set<std::string> out;
  for (const auto& t : tokens) {
    if (t.empty() || detail::is_punctuation_token(t)) continue;
    out.insert(detail::normalize_token(t));
  }
  return out;
}

/// Szymkiewicz-Simpson coefficient |A ∩ B| / min(|A|, |B|).
inline FlaggedScore overlap_coefficient(const std::set<std::string>& a,
                                        const std::set<std::string>& b) {
  if (a.empty() || b.empty()) return {0.0, true};
  std::size_t common = 0;
  for (const auto& w : a) common += b.count(w);
  return {static_cast<double>(common) /
              static_cast<double>(std::min(a.size(), b.size())),
          false};
}

inline FlaggedScore overlap_coefficient(std::span<const std::string> tokens_a,
                                        std::span<const std::string> tokens_b) {
  return overlap_coefficient(content_word_set(tokens_a),
                             content_word_set(tokens_b));
}

}  // namespace splitbench
