#pragma once

// Text-derived predictors for one side (A or B) of a triple.

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "splitbench/cohesion.hpp"
#include "splitbench/complexity.hpp"
#include "splitbench/readability.hpp"
#include "splitbench/records.hpp"

namespace splitbench {

/// Predictor columns in canonical order.
inline const std::vector<std::string>& all_predictors() {
  static const std::vector<std::string> names{
      "bart",    "ted1",    "ted2",  "subset",   "subtree", "overlap",
      "frazier", "yngve",   "dep_length", "tnodes", "dale", "ease",
      "fk_grade", "grammar", "meaning", "fluency", "split", "samsa"};
  return names;
}

/// The subset kept after the full ablation.
inline const std::vector<std::string>& reduced_predictors() {
  static const std::vector<std::string> names{"grammar", "split",   "ease",
                                              "fk_grade", "meaning", "fluency"};
  return names;
}

inline bool is_categorical_predictor(std::string_view name) {
  return name == "bart" || name == "split";
}

inline bool is_perception_predictor(std::string_view name) {
  return name == "grammar" || name == "meaning" || name == "fluency";
}

inline bool is_known_predictor(std::string_view name) {
  const auto& all = all_predictors();
  return std::find(all.begin(), all.end(), name) != all.end();
}

/// Predictors computed from the texts alone (everything but perception).
inline std::vector<std::string> text_predictors() {
  std::vector<std::string> out;
  for (const auto& n : all_predictors())
    if (!is_perception_predictor(n)) out.push_back(n);
  return out;
}

struct FeatureContext {
  const EasyWordList* easy_words = nullptr;
  CohesionOptions cohesion;
  FrazierOptions frazier;
  bool tnodes_count_tokens = false;
};

namespace detail {

inline double pooled_tokens(std::span<const ParseTree> trees) {
  double n = 0.0;
  for (const auto& t : trees) n += static_cast<double>(leaf_count(t));
  return n;
}

inline double sum_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

inline double side_feature(const Triple& triple, SideId side_id, const std::string& name,
                           const FeatureContext& ctx) {
  const TextSide& side = triple.side(side_id);
  const std::span<const ParseTree> splits(side.trees);
  const std::span<const ParseTree> source(triple.source.trees);

  if (name == "bart") return side.origin == Origin::bart ? 1.0 : 0.0;
  if (name == "split") return side_id == SideId::a ? 1.0 : 0.0;
  if (name == "ted1") {
    double total = 0.0;
    for (const auto& s : source) total += ted1(s, splits, ctx.cohesion);
    return total / static_cast<double>(source.size());
  }
  if (name == "ted2") return ted2(splits, ctx.cohesion).value;
  if (name == "subset")
    return kernel_similarity(splits, source, KernelVariant::subset, ctx.cohesion.kernel_sigma);
  if (name == "subtree")
    return kernel_similarity(splits, source, KernelVariant::subtree, ctx.cohesion.kernel_sigma);
  if (name == "overlap") {
    if (splits.size() < 2) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < splits.size(); ++i) {
      const auto ta = yield_tokens(splits[i]);
      const auto tb = yield_tokens(splits[i + 1]);
      total += overlap_coefficient(std::span<const std::string>(ta),
                                   std::span<const std::string>(tb))
                   .value;
    }
    return total / static_cast<double>(splits.size() - 1);
  }
  if (name == "yngve") {
    double cost = 0.0;
    for (const auto& t : splits) cost += sum_of(yngve_word_costs(t));
    return cost / pooled_tokens(splits);
  }
  if (name == "frazier") {
    double cost = 0.0;
    for (const auto& t : splits) cost += sum_of(frazier_word_scores(t, ctx.frazier));
    return cost / pooled_tokens(splits);
  }
  if (name == "tnodes") {
    double nodes = 0.0;
    for (const auto& t : splits)
      nodes += static_cast<double>(ctx.tnodes_count_tokens ? node_count(t)
                                                           : node_count(t) - leaf_count(t));
    return nodes / pooled_tokens(splits);
  }
  if (name == "dep_length") {
    if (side.deps.empty()) throw ValidationError("dep_length needs CoNLL-U parses");
    double length = 0.0;
    double arcs = 0.0;
    for (const auto& g : side.deps) {
      const double a = static_cast<double>(g.size() - 1);
      length += dep_distance(g) * a;
      arcs += a;
    }
    return arcs == 0.0 ? 0.0 : length / arcs;
  }
  if (name == "dale" || name == "ease" || name == "fk_grade") {
    if (ctx.easy_words == nullptr) throw ConfigError("readability features need a word list");
    std::vector<std::vector<std::string>> sentences;
    for (const auto& t : splits) sentences.push_back(yield_tokens(t));
    const auto stats = text_stats(std::span<const std::vector<std::string>>(sentences),
                                  *ctx.easy_words);
    if (name == "dale") return dale_chall(stats);
    if (name == "ease") return flesch_reading_ease(stats);
    return fk_grade(stats);
  }
  if (name == "samsa") {
    const std::string key = side_id == SideId::a ? "samsa_a" : "samsa_b";
    auto it = triple.precomputed.find(key);
    if (it == triple.precomputed.end())
      throw ValidationError("missing precomputed value '" + key + "'");
    return it->second;
  }
  throw ConfigError("'" + name + "' is not a text-derived predictor");
}

}  // namespace detail

/// Values of the text-derived predictors `names` for (triple, side).
inline std::vector<double> side_features(const Triple& triple, SideId side,
                                         std::span<const std::string> names,
                                         const FeatureContext& ctx) {
  std::vector<double> out;
  out.reserve(names.size());
  for (const auto& n : names) {
    try {
      out.push_back(detail::side_feature(triple, side, n, ctx));
    } catch (const ValidationError& e) {
      throw ValidationError("triple '" + triple.id + "' side " +
                            (side == SideId::a ? "a" : "b") + ", " + n + ": " + e.what());
    }
  }
  return out;
}

/// Text-derived predictors for every (triple, side).
struct FeatureTable {
  std::vector<std::string> names;
  std::unordered_map<std::string, std::array<std::vector<double>, 2>> values;

  const std::vector<double>& row(const std::string& triple_id, SideId side) const {
    auto it = values.find(triple_id);
    if (it == values.end())
      throw IntegrityError("no features for triple '" + triple_id + "'");
    return it->second[side == SideId::a ? 0 : 1];
  }

  std::size_t column(std::string_view name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw ConfigError("feature table lacks '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - names.begin());
  }
};

inline FeatureTable compute_feature_table(const Dataset& ds, std::vector<std::string> names,
                                          const FeatureContext& ctx) {
  FeatureTable table;
  table.names = std::move(names);
  for (const auto& t : ds.triples) {
    table.values[t.id] = {side_features(t, SideId::a, table.names, ctx),
                          side_features(t, SideId::b, table.names, ctx)};
  }
  return table;
}

}  // namespace splitbench
