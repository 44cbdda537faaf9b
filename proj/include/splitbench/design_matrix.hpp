#pragma once

// Standardized predictor matrix with a binary outcome, one row per
// (judgment, simplification side) in the default long layout.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "splitbench/error.hpp"
#include "splitbench/features.hpp"
#include "splitbench/records.hpp"

namespace splitbench {

struct ColumnInfo {
  std::string name;
  bool categorical = false;
  double mean = 0.0;  // of the raw column; 0 for categorical columns
  double sd = 1.0;    // population sd of the raw column; 1 for categorical
};

class DesignMatrix {
public:
  DesignMatrix() = default;

  /// Standardizes every non-categorical column to mean 0 and unit population
  /// sd. Categorical columns must be {0,1}-valued and are kept as is.
  static DesignMatrix from_raw(std::vector<ColumnInfo> columns,
                               const std::vector<std::vector<double>>& raw,
                               std::vector<int> y, std::vector<std::string> row_keys) {
    if (raw.size() != columns.size())
      throw ConfigError("column metadata and data disagree in width");
    const std::size_t n = y.size();
    if (row_keys.size() != n) throw ConfigError("row keys and outcomes disagree in length");
    for (int v : y)
      if (v != 0 && v != 1) throw ValidationError("outcome must be 0 or 1");
    DesignMatrix m;
    m.columns_ = std::move(columns);
    m.y_ = std::move(y);
    m.keys_ = std::move(row_keys);
    const std::size_t p = m.columns_.size();
    m.x_.assign(n * p, 0.0);
    for (std::size_t c = 0; c < p; ++c) {
      auto& info = m.columns_[c];
      const auto& col = raw[c];
      if (col.size() != n)
        throw ConfigError("column '" + info.name + "' has " + std::to_string(col.size()) +
                          " values for " + std::to_string(n) + " rows");
      for (double v : col)
        if (!std::isfinite(v))
          throw ValidationError("column '" + info.name + "' has a non-finite value");
      if (info.categorical) {
        for (double v : col)
          if (v != 0.0 && v != 1.0)
            throw ValidationError("categorical column '" + info.name + "' must be 0/1");
        info.mean = 0.0;
        info.sd = 1.0;
        for (std::size_t r = 0; r < n; ++r) m.x_[r * p + c] = col[r];
        continue;
      }
      double mean = 0.0;
      for (double v : col) mean += v;
      mean /= static_cast<double>(n);
      double ss = 0.0;
      for (double v : col) ss += (v - mean) * (v - mean);
      const double sd = std::sqrt(ss / static_cast<double>(n));
      if (!(sd > 0.0) || sd <= 1e-12 * std::max(1.0, std::fabs(mean)))
        throw ValidationError("standardization error: column '" + info.name +
                              "' has zero variance");
      info.mean = mean;
      info.sd = sd;
      for (std::size_t r = 0; r < n; ++r) m.x_[r * p + c] = (col[r] - mean) / sd;
    }
    return m;
  }

  std::size_t rows() const noexcept { return y_.size(); }
  std::size_t cols() const noexcept { return columns_.size(); }

  double operator()(std::size_t r, std::size_t c) const { return x_[r * cols() + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(x_).subspan(r * cols(), cols());
  }
  int y(std::size_t r) const { return y_[r]; }
  std::span<const int> outcomes() const noexcept { return y_; }
  const std::vector<ColumnInfo>& columns() const noexcept { return columns_; }
  const std::vector<std::string>& row_keys() const noexcept { return keys_; }

  std::vector<std::string> column_names() const {
    std::vector<std::string> out;
    for (const auto& c : columns_) out.push_back(c.name);
    return out;
  }

  std::size_t index_of(std::string_view name) const {
    for (std::size_t c = 0; c < columns_.size(); ++c)
      if (columns_[c].name == name) return c;
    throw ConfigError("design matrix has no column '" + std::string(name) + "'");
  }

  /// Raw (de-standardized) value of a cell.
  double raw_value(std::size_t r, std::size_t c) const {
    return (*this)(r, c) * columns_[c].sd + columns_[c].mean;
  }

  /// Matrix restricted to `names`, in that order; standardization is
  /// per-column, so this equals rebuilding from the same raw columns.
  DesignMatrix select(std::span<const std::string> names) const {
    DesignMatrix m;
    std::vector<std::size_t> idx;
    for (const auto& n : names) {
      idx.push_back(index_of(n));
      m.columns_.push_back(columns_[idx.back()]);
    }
    m.y_ = y_;
    m.keys_ = keys_;
    const std::size_t p = idx.size();
    m.x_.resize(rows() * p);
    for (std::size_t r = 0; r < rows(); ++r)
      for (std::size_t c = 0; c < p; ++c) m.x_[r * p + c] = (*this)(r, idx[c]);
    return m;
  }

private:
  std::vector<ColumnInfo> columns_;
  std::vector<double> x_;
  std::vector<int> y_;
  std::vector<std::string> keys_;
};

enum class MatrixLayout {
  long_format,
  /// One row per judgment holding A - B feature differences; experimental.
  difference
};

struct MatrixConfig {
  std::vector<std::string> predictors = all_predictors();
  MatrixLayout layout = MatrixLayout::long_format;
};

namespace detail {

inline double perception(const QualityScores& s, std::string_view name) {
  if (name == "grammar") return s.grammar;
  if (name == "meaning") return s.meaning;
  return s.fluency;
}

}  // namespace detail

/// A_vs_B judgments with a definite choice, ordered by (triple id, worker id).
inline std::vector<const JudgmentRecord*> decisive_pair_judgments(const Dataset& ds) {
  std::vector<const JudgmentRecord*> out;
  for (const auto& j : ds.judgments)
    if (j.question == Question::a_vs_b && j.choice != Choice::not_sure) out.push_back(&j);
  std::stable_sort(out.begin(), out.end(), [](const auto* l, const auto* r) {
    return std::tie(l->triple_id, l->worker_id) < std::tie(r->triple_id, r->worker_id);
  });
  return out;
}

/// Long layout: two rows per decisive A_vs_B judgment (side A then side B);
/// y marks the chosen side. not_sure judgments are dropped.
inline DesignMatrix build_design_matrix(const Dataset& ds, const FeatureTable& features,
                                        const MatrixConfig& config) {
  for (const auto& n : config.predictors)
    if (!is_known_predictor(n)) throw ConfigError("unknown predictor '" + n + "'");
  const auto judgments = decisive_pair_judgments(ds);
  const std::size_t p = config.predictors.size();
  std::vector<ColumnInfo> columns;
  std::vector<std::size_t> feature_col(p, 0);
  for (std::size_t c = 0; c < p; ++c) {
    const auto& n = config.predictors[c];
    columns.push_back({n, is_categorical_predictor(n), 0.0, 1.0});
    if (!is_perception_predictor(n)) feature_col[c] = features.column(n);
  }

  auto value = [&](const JudgmentRecord& j, SideId side, std::size_t c) {
    const auto& n = config.predictors[c];
    if (is_perception_predictor(n)) return detail::perception(*j.scores(side), n);
    return features.row(j.triple_id, side)[feature_col[c]];
  };

  std::vector<std::vector<double>> raw(p);
  std::vector<int> y;
  std::vector<std::string> keys;
  for (const auto* j : judgments) {
    ds.triple(j->triple_id);  // integrity
    const std::string base = j->triple_id + "/" + j->worker_id;
    if (config.layout == MatrixLayout::long_format) {
      for (SideId side : {SideId::a, SideId::b}) {
        for (std::size_t c = 0; c < p; ++c) raw[c].push_back(value(*j, side, c));
        const bool chosen = (side == SideId::a) == (j->choice == Choice::first);
        y.push_back(chosen ? 1 : 0);
        keys.push_back(base + (side == SideId::a ? "/a" : "/b"));
      }
    } else {
      for (std::size_t c = 0; c < p; ++c)
        raw[c].push_back(value(*j, SideId::a, c) - value(*j, SideId::b, c));
      y.push_back(j->choice == Choice::first ? 1 : 0);
      keys.push_back(base);
    }
  }
  return DesignMatrix::from_raw(std::move(columns), raw, std::move(y), std::move(keys));
}

}  // namespace splitbench
