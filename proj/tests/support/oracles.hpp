#pragma once

// Independent reference implementations used only by the tests. None of
// these share code paths with the library routines they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "splitbench/treebank.hpp"

namespace splitbench::oracle {

// ---------------------------------------------------------------------------
// Tree edit distance by the forest recursion: repeatedly consider the
// rightmost root of each forest and take the cheapest of delete, insert, or
// match-and-split. Memoized on the printed forests.

class ForestTed {
public:
  std::size_t distance(const ParseTree& a, const ParseTree& b) {
    return solve({&a}, {&b});
  }

private:
  using Forest = std::vector<const ParseTree*>;

  static std::string key(const Forest& f) {
    std::string k;
    for (const auto* t : f) {
      k += to_bracket(*t);
      k += '|';
    }
    return k;
  }

  static std::size_t size(const Forest& f) {
    std::size_t n = 0;
    for (const auto* t : f) n += node_count(*t);
    return n;
  }

  std::size_t solve(const Forest& f, const Forest& g) {
    if (f.empty()) return size(g);
    if (g.empty()) return size(f);
    const std::string k = key(f) + "#" + key(g);
    if (auto it = memo_.find(k); it != memo_.end()) return it->second;

    const ParseTree* v = f.back();
    const ParseTree* w = g.back();
    Forest f_minus_v(f.begin(), f.end() - 1);
    for (const auto& c : v->children) f_minus_v.push_back(&c);
    Forest g_minus_w(g.begin(), g.end() - 1);
    for (const auto& c : w->children) g_minus_w.push_back(&c);
    Forest v_kids, w_kids;
    for (const auto& c : v->children) v_kids.push_back(&c);
    for (const auto& c : w->children) w_kids.push_back(&c);
    const Forest f_rest(f.begin(), f.end() - 1);
    const Forest g_rest(g.begin(), g.end() - 1);

    const std::size_t del = solve(f_minus_v, g) + 1;
    const std::size_t ins = solve(f, g_minus_w) + 1;
    const std::size_t match = solve(v_kids, w_kids) + solve(f_rest, g_rest) +
                              (v->label == w->label ? 0 : 1);
    const std::size_t best = std::min({del, ins, match});
    memo_.emplace(k, best);
    return best;
  }

  std::map<std::string, std::size_t> memo_;
};

inline std::size_t ted_forest(const ParseTree& a, const ParseTree& b) {
  return ForestTed().distance(a, b);
}

// ---------------------------------------------------------------------------
// Tree edit distance by exhaustive search over all valid node mappings (one-
// to-one, ancestor- and sibling-order-preserving). Exponential; tiny trees.

class MappingTed {
public:
  MappingTed(const ParseTree& a, const ParseTree& b) {
    flatten(a, na_);
    flatten(b, nb_);
  }

  std::size_t distance() {
    used_.assign(nb_.size(), false);
    best_ = na_.size() + nb_.size();
    search(0, 0, 0);
    return best_;
  }

private:
  struct Node {
    const std::string* label;
    std::size_t pre;   // preorder index
    std::size_t last;  // last preorder index inside the subtree
  };

  static void flatten(const ParseTree& t, std::vector<Node>& out) {
    const std::size_t id = out.size();
    out.push_back({&t.label, id, id});
    for (const auto& c : t.children) flatten(c, out);
    out[id].last = out.size() - 1;
  }

  static bool ancestor(const std::vector<Node>& n, std::size_t x, std::size_t y) {
    return x < y && y <= n[x].last;
  }

  static bool left_of(const std::vector<Node>& n, std::size_t x, std::size_t y) {
    return x < y && !ancestor(n, x, y);
  }

  bool consistent(std::size_t i, std::size_t j) const {
    for (const auto& [pi, pj] : pairs_) {
      if (ancestor(na_, pi, i) != ancestor(nb_, pj, j)) return false;
      if (ancestor(na_, i, pi) != ancestor(nb_, j, pj)) return false;
      if (left_of(na_, pi, i) != left_of(nb_, pj, j)) return false;
      if (left_of(na_, i, pi) != left_of(nb_, j, pj)) return false;
    }
    return true;
  }

  void search(std::size_t i, std::size_t mapped, std::size_t relabels) {
    if (i == na_.size()) {
      best_ = std::min(best_, na_.size() + nb_.size() - 2 * mapped + relabels);
      return;
    }
    search(i + 1, mapped, relabels);
    for (std::size_t j = 0; j < nb_.size(); ++j) {
      if (used_[j] || !consistent(i, j)) continue;
      used_[j] = true;
      pairs_.emplace_back(i, j);
      search(i + 1, mapped + 1, relabels + (*na_[i].label == *nb_[j].label ? 0 : 1));
      pairs_.pop_back();
      used_[j] = false;
    }
  }

  std::vector<Node> na_, nb_;
  std::vector<bool> used_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::size_t best_ = 0;
};

inline std::size_t ted_mappings(const ParseTree& a, const ParseTree& b) {
  return MappingTed(a, b).distance();
}

// ---------------------------------------------------------------------------
// Tree kernels by explicit fragment enumeration.

struct Fragment {
  std::string text;
  std::size_t cuts = 0;
};

/// All fragments rooted at `t`: the production at `t` is always kept; each
/// non-token child is either cut (left as a bare category) or expanded into
/// one of its own fragments.
inline std::vector<Fragment> fragments_at(const ParseTree& t) {
  std::vector<Fragment> partial{{"(" + t.label, 0}};
  for (const auto& c : t.children) {
    std::vector<Fragment> next;
    if (c.is_leaf()) {
      for (auto& p : partial) next.push_back({p.text + " '" + c.label, p.cuts});
    } else {
      const auto sub = fragments_at(c);
      for (const auto& p : partial) {
        next.push_back({p.text + " [" + c.label + "]", p.cuts + 1});
        for (const auto& s : sub) next.push_back({p.text + " " + s.text, p.cuts + s.cuts});
      }
    }
    partial = std::move(next);
  }
  for (auto& p : partial) p.text += ")";
  return partial;
}

inline void internal_nodes(const ParseTree& t, std::vector<const ParseTree*>& out) {
  if (t.is_leaf()) return;
  out.push_back(&t);
  for (const auto& c : t.children) internal_nodes(c, out);
}

/// Sum over node pairs and identical fragment pairs of sigma^cuts.
inline double subset_kernel_enumerated(const ParseTree& a, const ParseTree& b, double sigma) {
  std::vector<const ParseTree*> na, nb;
  internal_nodes(a, na);
  internal_nodes(b, nb);
  double total = 0.0;
  for (const auto* x : na) {
    const auto fx = fragments_at(*x);
    for (const auto* y : nb) {
      const auto fy = fragments_at(*y);
      for (const auto& f : fx)
        for (const auto& g : fy)
          if (f.text == g.text) total += std::pow(sigma, static_cast<double>(f.cuts));
    }
  }
  return total;
}

/// Number of node pairs whose complete subtrees are identical.
inline double subtree_kernel_enumerated(const ParseTree& a, const ParseTree& b) {
  std::vector<const ParseTree*> na, nb;
  internal_nodes(a, na);
  internal_nodes(b, nb);
  double total = 0.0;
  for (const auto* x : na)
    for (const auto* y : nb)
      if (to_bracket(*x) == to_bracket(*y)) total += 1.0;
  return total;
}

// ---------------------------------------------------------------------------
// Naive per-word walks for the complexity scores, via explicit parent links.

struct Linked {
  const ParseTree* node;
  int parent;
  std::size_t index_in_parent;
};

inline std::vector<Linked> link(const ParseTree& t) {
  std::vector<Linked> nodes{{&t, -1, 0}};
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto* n = nodes[i].node;
    for (std::size_t c = 0; c < n->children.size(); ++c)
      nodes.push_back({&n->children[c], static_cast<int>(i), c});
  }
  return nodes;
}

/// Leaves in left-to-right order.
inline std::vector<std::size_t> leaves_in_order(const std::vector<Linked>& nodes) {
  std::vector<std::pair<std::vector<std::size_t>, std::size_t>> keyed;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].node->is_leaf()) continue;
    std::vector<std::size_t> path;
    for (int k = static_cast<int>(i); nodes[static_cast<std::size_t>(k)].parent >= 0;
         k = nodes[static_cast<std::size_t>(k)].parent)
      path.push_back(nodes[static_cast<std::size_t>(k)].index_in_parent);
    std::reverse(path.begin(), path.end());
    keyed.emplace_back(path, i);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> out;
  for (auto& [p, i] : keyed) out.push_back(i);
  return out;
}

inline double naive_yngve(const ParseTree& t) {
  const auto nodes = link(t);
  const auto leaves = leaves_in_order(nodes);
  double total = 0.0;
  for (auto leaf : leaves) {
    for (int k = static_cast<int>(leaf); nodes[static_cast<std::size_t>(k)].parent >= 0;
         k = nodes[static_cast<std::size_t>(k)].parent) {
      const auto& n = nodes[static_cast<std::size_t>(k)];
      const auto siblings = nodes[static_cast<std::size_t>(n.parent)].node->children.size();
      total += static_cast<double>(siblings - 1 - n.index_in_parent);
    }
  }
  return total / static_cast<double>(leaves.size());
}

inline double naive_frazier(const ParseTree& t) {
  const auto nodes = link(t);
  const auto leaves = leaves_in_order(nodes);
  double total = 0.0;
  for (auto leaf : leaves) {
    const auto& l = nodes[leaf];
    if (l.parent < 0 || l.index_in_parent != 0) continue;
    double score = 0.0;
    int k = l.parent;
    while (true) {
      const auto& n = nodes[static_cast<std::size_t>(k)];
      const double w = n.node->label.rfind('S', 0) == 0 ? 1.5 : 1.0;
      if (n.parent < 0) {
        score += w;
        break;
      }
      if (n.index_in_parent != 0) break;
      score += w;
      k = n.parent;
    }
    total += score;
  }
  return total / static_cast<double>(leaves.size());
}

inline double naive_tnodes(const ParseTree& t) {
  const auto nodes = link(t);
  double internal = 0.0, leaves = 0.0;
  for (const auto& n : nodes) (n.node->is_leaf() ? leaves : internal) += 1.0;
  return internal / leaves;
}

/// Mean |head - dependent| from the raw head array (1-based, 0 = root).
inline double naive_dep_distance(const std::vector<std::size_t>& heads) {
  double sum = 0.0, arcs = 0.0;
  for (std::size_t i = 0; i < heads.size(); ++i) {
    if (heads[i] == 0) continue;
    sum += std::fabs(static_cast<double>(heads[i]) - static_cast<double>(i + 1));
    arcs += 1.0;
  }
  return arcs == 0.0 ? 0.0 : sum / arcs;
}

/// True iff heads form one tree: exactly one root and every token reaches it
/// within n steps.
inline bool heads_form_tree(const std::vector<std::size_t>& heads) {
  const std::size_t n = heads.size();
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (heads[i] > n || heads[i] == i + 1) return false;
    if (heads[i] == 0) ++roots;
  }
  if (roots != 1) return false;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t cur = i + 1, steps = 0;
    while (cur != 0 && steps <= n) {
      cur = heads[cur - 1];
      ++steps;
    }
    if (cur != 0) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Logistic-regression posterior mode by Newton's method with a Normal(0, sd)
// prior on every coefficient. Rows are [1, x...] implicitly.

inline std::vector<double> logistic_map(const std::vector<std::vector<double>>& x,
                                        const std::vector<int>& y,
                                        const std::vector<double>& prior_sd) {
  const std::size_t d = prior_sd.size();
  std::vector<double> beta(d, 0.0);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<double> g(d, 0.0);
    std::vector<std::vector<double>> h(d, std::vector<double>(d, 0.0));
    for (std::size_t r = 0; r < x.size(); ++r) {
      std::vector<double> row{1.0};
      row.insert(row.end(), x[r].begin(), x[r].end());
      double eta = 0.0;
      for (std::size_t k = 0; k < d; ++k) eta += beta[k] * row[k];
      const double p = 1.0 / (1.0 + std::exp(-eta));
      for (std::size_t i = 0; i < d; ++i) {
        g[i] += (y[r] - p) * row[i];
        for (std::size_t j = 0; j < d; ++j) h[i][j] += p * (1.0 - p) * row[i] * row[j];
      }
    }
    for (std::size_t k = 0; k < d; ++k) {
      g[k] -= beta[k] / (prior_sd[k] * prior_sd[k]);
      h[k][k] += 1.0 / (prior_sd[k] * prior_sd[k]);
    }
    // Solve h * step = g by Gaussian elimination with partial pivoting.
    std::vector<double> step = g;
    for (std::size_t c = 0; c < d; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < d; ++r)
        if (std::fabs(h[r][c]) > std::fabs(h[piv][c])) piv = r;
      std::swap(h[c], h[piv]);
      std::swap(step[c], step[piv]);
      for (std::size_t r = c + 1; r < d; ++r) {
        const double f = h[r][c] / h[c][c];
        for (std::size_t k = c; k < d; ++k) h[r][k] -= f * h[c][k];
        step[r] -= f * step[c];
      }
    }
    for (std::size_t c = d; c-- > 0;) {
      for (std::size_t k = c + 1; k < d; ++k) step[c] -= h[c][k] * step[k];
      step[c] /= h[c][c];
    }
    double moved = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      beta[k] += step[k];
      moved = std::max(moved, std::fabs(step[k]));
    }
    if (moved < 1e-12) break;
  }
  return beta;
}

}  // namespace splitbench::oracle
