#pragma once

// Readers for Penn-Treebank bracketed constituency parses and CoNLL-U
// dependency parses, plus the tree and graph types every metric consumes.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "splitbench/error.hpp"

namespace splitbench {

/// Rooted, ordered, labeled constituency tree. A node without children is a
/// token leaf whose label is the token text; every other node is a
/// non-terminal (POS nodes included).
struct ParseTree {
  std::string label;
  std::vector<ParseTree> children;

  ParseTree() = default;
  explicit ParseTree(std::string l, std::vector<ParseTree> c = {})
      : label(std::move(l)), children(std::move(c)) {}

  bool is_leaf() const noexcept { return children.empty(); }

  /// All children are token leaves (a POS node under the terminal convention).
  bool is_preterminal() const noexcept {
    return !children.empty() &&
           std::all_of(children.begin(), children.end(),
                       [](const ParseTree& c) { return c.is_leaf(); });
  }

  friend bool operator==(const ParseTree&, const ParseTree&) = default;
};

struct PtbOptions {
  bool keep_punctuation = true;
  bool strip_function_tags = true;
  bool strip_traces = true;
  /// Collapse unary wrappers that are unlabeled or labeled ROOT/TOP.
  bool collapse_root_wrappers = true;
};

struct DepToken {
  std::size_t index = 0;  // 1-based
  std::string form;
  std::size_t head = 0;  // 0 = root
  std::string relation;

  friend bool operator==(const DepToken&, const DepToken&) = default;
};

/// Single-rooted dependency structure over a token sequence.
struct DepGraph {
  std::vector<DepToken> tokens;

  std::size_t size() const noexcept { return tokens.size(); }

  std::size_t root_index() const {
    for (const auto& t : tokens)
      if (t.head == 0) return t.index;
    throw ValidationError("dependency graph has no root");
  }
};

namespace detail {

inline bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

inline bool is_punctuation_token(std::string_view tok) {
  static constexpr std::array<std::string_view, 6> kBracketTokens = {
      "-LRB-", "-RRB-", "-LCB-", "-RCB-", "-LSB-", "-RSB-"};
  if (tok.empty()) return false;
  if (std::find(kBracketTokens.begin(), kBracketTokens.end(), tok) !=
      kBracketTokens.end())
    return true;
  return std::all_of(tok.begin(), tok.end(), [](char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
  });
}

inline std::string strip_function_tag(const std::string& label) {
  // -NONE-, -LRB- and friends start with a dash and are kept verbatim.
  if (label.empty() || label.front() == '-') return label;
  const auto cut = label.find_first_of("-=", 1);
  return cut == std::string::npos ? label : label.substr(0, cut);
}

class PtbReader {
public:
  explicit PtbReader(std::string_view text) : text_(text) {}

  std::vector<ParseTree> read_all(const PtbOptions& opts) {
    std::vector<ParseTree> trees;
    skip_space();
    while (pos_ < text_.size()) {
      if (text_[pos_] != '(') throw ParseError("expected '('", pos_);
      const std::size_t group_start = pos_;
      RawNode raw = read_group();
      auto tree = finish(std::move(raw), opts, group_start);
      trees.push_back(std::move(tree));
      skip_space();
    }
    return trees;
  }

private:
  struct RawNode {
    std::string label;
    bool labeled = false;
    std::vector<RawNode> children;
    bool leaf = false;
  };

  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  std::string_view read_atom() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_]) &&
           text_[pos_] != '(' && text_[pos_] != ')')
      ++pos_;
    return text_.substr(start, pos_ - start);
  }

  RawNode read_group() {
    ++pos_;  // '('
    RawNode node;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')') {
      node.label = std::string(read_atom());
      node.labeled = true;
    }
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) throw ParseError("unbalanced brackets", pos_);
      const char c = text_[pos_];
      if (c == ')') {
        ++pos_;
        return node;
      }
      if (c == '(') {
        node.children.push_back(read_group());
      } else {
        RawNode leaf;
        leaf.label = std::string(read_atom());
        leaf.leaf = true;
        node.children.push_back(std::move(leaf));
      }
    }
  }

  // Returns false when the node has no surviving yield and must be dropped.
  static bool convert(RawNode&& raw, const PtbOptions& opts, ParseTree& out) {
    if (raw.leaf) {
      if (!opts.keep_punctuation && is_punctuation_token(raw.label))
        return false;
      out = ParseTree(std::move(raw.label));
      return true;
    }
    if (opts.strip_traces && raw.label == "-NONE-") return false;
    std::string label = opts.strip_function_tags
                            ? strip_function_tag(raw.label)
                            : std::move(raw.label);
    std::vector<ParseTree> kids;
    kids.reserve(raw.children.size());
    for (auto& child : raw.children) {
      ParseTree converted;
      if (convert(std::move(child), opts, converted))
        kids.push_back(std::move(converted));
    }
    if (kids.empty()) return false;
    out = ParseTree(std::move(label), std::move(kids));
    return true;
  }

  static ParseTree finish(RawNode raw, const PtbOptions& opts,
                          std::size_t offset) {
    // Unlabeled wrappers around a single group are dropped before conversion
    // so that an empty label never reaches the metrics.
    while (!raw.labeled && raw.children.size() == 1 && !raw.children[0].leaf) {
      RawNode inner = std::move(raw.children[0]);
      raw = std::move(inner);
    }
    if (!raw.labeled && raw.children.size() != 1)
      throw ValidationError("unlabeled bracket group with " +
                            std::to_string(raw.children.size()) +
                            " children at offset " + std::to_string(offset));
    if (!raw.labeled) {
      // "(word)" - an unlabeled group around a bare token.
      throw ValidationError("bracket group without a category at offset " +
                            std::to_string(offset));
    }
    ParseTree tree;
    if (!convert(std::move(raw), opts, tree))
      throw ValidationError("bracket group with no terminal yield at offset " +
                            std::to_string(offset));
    if (opts.collapse_root_wrappers) {
      while ((tree.label == "ROOT" || tree.label == "TOP") &&
             tree.children.size() == 1 && !tree.children[0].is_leaf()) {
        ParseTree inner = std::move(tree.children[0]);
        tree = std::move(inner);
      }
    }
    return tree;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline void append_bracket(const ParseTree& t, std::string& out) {
  if (t.is_leaf()) {
    out += t.label;
    return;
  }
  out += '(';
  out += t.label;
  for (const auto& c : t.children) {
    out += ' ';
    append_bracket(c, out);
  }
  out += ')';
}

inline void collect_yield(const ParseTree& t, std::vector<std::string>& out) {
  if (t.is_leaf()) {
    out.push_back(t.label);
    return;
  }
  for (const auto& c : t.children) collect_yield(c, out);
}

inline std::size_t parse_size(std::string_view field, std::size_t line_offset,
                              const char* what) {
  std::size_t value = 0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || field.empty())
    throw ParseError(std::string("malformed ") + what + " '" +
                         std::string(field) + "'",
                     line_offset);
  return value;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  if (line.find('\t') != std::string_view::npos) {
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    return fields;
  }
  // Space-separated fallback for hand-written fixtures.
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

}  // namespace detail

/// Reads whitespace-separated bracket groups; one tree per top-level group.
/// Empty (or all-whitespace) input yields an empty list.
inline std::vector<ParseTree> parse_ptb(std::string_view text,
                                        const PtbOptions& opts = {}) {
  return detail::PtbReader(text).read_all(opts);
}

/// Parses exactly one bracket group.
inline ParseTree parse_ptb_one(std::string_view text,
                               const PtbOptions& opts = {}) {
  auto trees = parse_ptb(text, opts);
  if (trees.size() != 1)
    throw ValidationError("expected one parse tree, found " +
                          std::to_string(trees.size()));
  return std::move(trees.front());
}

inline std::string to_bracket(const ParseTree& tree) {
  std::string out;
  detail::append_bracket(tree, out);
  return out;
}

inline std::vector<std::string> yield_tokens(const ParseTree& tree) {
  std::vector<std::string> out;
  detail::collect_yield(tree, out);
  return out;
}

inline std::size_t leaf_count(const ParseTree& t) {
  if (t.is_leaf()) return 1;
  std::size_t n = 0;
  for (const auto& c : t.children) n += leaf_count(c);
  return n;
}

inline std::size_t node_count(const ParseTree& t) {
  std::size_t n = 1;
  for (const auto& c : t.children) n += node_count(c);
  return n;
}

/// Copy of `t` with token leaves removed; POS nodes become the new leaves.
inline ParseTree without_tokens(const ParseTree& t) {
  ParseTree out(t.label);
  for (const auto& c : t.children)
    if (!c.is_leaf()) out.children.push_back(without_tokens(c));
  return out;
}

/// Throws ValidationError unless `g` has indices 1..n, exactly one root, heads
/// in range and an acyclic head relation.
inline void validate(const DepGraph& g) {
  const std::size_t n = g.tokens.size();
  if (n == 0) throw ValidationError("empty dependency graph");
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = g.tokens[i];
    if (t.index != i + 1)
      throw ValidationError("token ids must run 1..n, found " +
                            std::to_string(t.index) + " at position " +
                            std::to_string(i + 1));
    if (t.head > n)
      throw ValidationError("token " + std::to_string(t.index) +
                            " has head " + std::to_string(t.head) +
                            " outside the sentence");
    if (t.head == t.index)
      throw ValidationError("token " + std::to_string(t.index) +
                            " is its own head");
    if (t.head == 0) ++roots;
  }
  if (roots != 1)
    throw ValidationError("dependency graph must have exactly one root, found " +
                          std::to_string(roots));
  // 0 = unvisited, 1 = on current path, 2 = reaches root
  std::vector<int> state(n + 1, 0);
  state[0] = 2;
  for (std::size_t start = 1; start <= n; ++start) {
    std::vector<std::size_t> path;
    std::size_t cur = start;
    while (state[cur] == 0) {
      state[cur] = 1;
      path.push_back(cur);
      cur = g.tokens[cur - 1].head;
    }
    if (state[cur] == 1)
      throw ValidationError("cyclic head relation through token " +
                            std::to_string(cur));
    for (auto p : path) state[p] = 2;
  }
}

/// Reads CoNLL-U; consumes ID, FORM, HEAD and DEPREL. Multiword ranges and
/// empty nodes are skipped. Every returned graph has passed `validate`.
inline std::vector<DepGraph> parse_conllu(std::string_view text) {
  std::vector<DepGraph> graphs;
  DepGraph current;
  std::size_t block_offset = 0;
  auto flush = [&] {
    if (current.tokens.empty()) return;
    try {
      validate(current);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(e.what()) +
                            " (sentence starting at offset " +
                            std::to_string(block_offset) + ")");
    }
    graphs.push_back(std::move(current));
    current = DepGraph{};
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::size_t line_offset = pos;
    pos = end + 1;

    const bool blank = std::all_of(line.begin(), line.end(), detail::is_space);
    if (blank) {
      flush();
      if (nl == std::string_view::npos) break;
      continue;
    }
    if (line.front() == '#') continue;
    if (current.tokens.empty()) block_offset = line_offset;

    const auto fields = detail::split_fields(line);
    if (fields.empty()) continue;
    const std::string_view id = fields[0];
    if (id.find_first_of("-.") != std::string_view::npos) continue;
    if (fields.size() < 7)
      throw ParseError("CoNLL-U line is missing the HEAD column", line_offset);

    DepToken tok;
    tok.index = detail::parse_size(id, line_offset, "token id");
    tok.form = std::string(fields[1]);
    tok.head = detail::parse_size(fields[6], line_offset, "HEAD");
    tok.relation = fields.size() > 7 ? std::string(fields[7]) : std::string("_");
    current.tokens.push_back(std::move(tok));
    if (nl == std::string_view::npos) break;
  }
  flush();
  return graphs;
}

}  // namespace splitbench
