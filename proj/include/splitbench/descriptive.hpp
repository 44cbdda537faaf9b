#pragma once

// Preference tallies and quality-score summaries over the judgments.

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "splitbench/records.hpp"
#include "splitbench/stats.hpp"

namespace splitbench {

inline double round2(double x) { return std::round(x * 100.0) / 100.0; }

struct Tally {
  Question question = Question::a_vs_b;
  std::array<std::size_t, 3> counts{};  // first, second, not_sure
  std::size_t total = 0;

  double share(Choice c) const {
    return total == 0 ? 0.0
                      : static_cast<double>(counts[static_cast<std::size_t>(c)]) /
                            static_cast<double>(total);
  }
  double rounded_share(Choice c) const { return round2(share(c)); }
  std::size_t count(Choice c) const { return counts[static_cast<std::size_t>(c)]; }
};

inline Tally tally(std::span<const JudgmentRecord> judgments, Question question) {
  Tally t;
  t.question = question;
  for (const auto& j : judgments) {
    if (j.question != question) continue;
    ++t.counts[static_cast<std::size_t>(j.choice)];
    ++t.total;
  }
  return t;
}

/// Judgments for `question` on triples whose A side has the given origin.
inline std::vector<JudgmentRecord> judgments_for(const Dataset& ds, Question question,
                                                 std::optional<Origin> a_origin = std::nullopt) {
  std::vector<JudgmentRecord> out;
  for (const auto& j : ds.judgments) {
    if (j.question != question) continue;
    if (a_origin && ds.triple(j.triple_id).a.origin != *a_origin) continue;
    out.push_back(j);
  }
  return out;
}

enum class ScoreUnit {
  /// One observation per triple: the mean of its workers' ratings.
  item_mean,
  /// One observation per individual rating.
  rating
};

struct ScoreSample {
  std::vector<double> fluency;
  std::vector<double> grammar;
  std::vector<double> meaning;
};

/// Quality ratings of one side, taken from A_vs_B judgments on triples whose
/// A side has `a_origin`.
inline ScoreSample collect_scores(const Dataset& ds, Origin a_origin, SideId side,
                                  ScoreUnit unit = ScoreUnit::item_mean) {
  ScoreSample out;
  std::map<std::string, std::array<double, 4>> per_item;  // sums + count
  for (const auto& j : ds.judgments) {
    if (j.question != Question::a_vs_b) continue;
    if (ds.triple(j.triple_id).a.origin != a_origin) continue;
    const auto& s = j.scores(side);
    if (!s) continue;
    if (unit == ScoreUnit::rating) {
      out.fluency.push_back(s->fluency);
      out.grammar.push_back(s->grammar);
      out.meaning.push_back(s->meaning);
    } else {
      auto& acc = per_item[j.triple_id];
      acc[0] += s->fluency;
      acc[1] += s->grammar;
      acc[2] += s->meaning;
      acc[3] += 1.0;
    }
  }
  for (const auto& [id, acc] : per_item) {
    out.fluency.push_back(acc[0] / acc[3]);
    out.grammar.push_back(acc[1] / acc[3]);
    out.meaning.push_back(acc[2] / acc[3]);
  }
  return out;
}

struct CategorySummary {
  std::string category;
  double mean_first = 0.0;
  double sd_first = 0.0;
  double mean_second = 0.0;
  double sd_second = 0.0;
  stats::TTest test;
};

inline CategorySummary summarize_category(std::string name, std::span<const double> first,
                                          std::span<const double> second) {
  CategorySummary s;
  s.category = std::move(name);
  s.test = stats::welch_t_test(first, second);
  s.mean_first = stats::mean(first);
  s.sd_first = stats::sd(first);
  s.mean_second = stats::mean(second);
  s.sd_second = stats::sd(second);
  return s;
}

/// Per-category mean, sample sd and Welch test between two groups, in the
/// order fluency, grammar, meaning.
inline std::vector<CategorySummary> score_summary(const ScoreSample& first,
                                                  const ScoreSample& second) {
  return {summarize_category("fluency", first.fluency, second.fluency),
          summarize_category("grammar", first.grammar, second.grammar),
          summarize_category("meaning", first.meaning, second.meaning)};
}

}  // namespace splitbench
