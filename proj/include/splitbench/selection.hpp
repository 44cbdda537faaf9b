#pragma once

// WAIC on the elpd scale, pairwise model comparison and leave-one-predictor-
// out ablation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "splitbench/design_matrix.hpp"
#include "splitbench/error.hpp"
#include "splitbench/inference.hpp"
#include "splitbench/stats.hpp"

namespace splitbench {

/// Identifies the rows (keys and outcomes) a fit was evaluated on.
inline std::uint64_t row_fingerprint(const DesignMatrix& m) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ull;
  };
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (char c : m.row_keys()[r]) mix(static_cast<unsigned char>(c));
    mix(0);
    mix(static_cast<unsigned char>(m.y(r)));
  }
  return h;
}

/// Log likelihood of every row under every pooled posterior draw.
struct PointwiseLoglik {
  std::size_t samples = 0;
  std::size_t rows = 0;
  std::vector<double> values;  // [sample][row]
  std::uint64_t fingerprint = 0;

  double at(std::size_t s, std::size_t r) const { return values[s * rows + r]; }
};

inline PointwiseLoglik pointwise_loglik(const PosteriorDraws& draws, const DesignMatrix& matrix) {
  if (draws.dim() == 0 || draws.names.front() != "Intercept")
    throw ConfigError("draws must start with the intercept");
  std::vector<std::size_t> cols;
  for (std::size_t k = 1; k < draws.dim(); ++k) cols.push_back(matrix.index_of(draws.names[k]));
  PointwiseLoglik out;
  out.samples = draws.chains * draws.draws;
  out.rows = matrix.rows();
  out.values.resize(out.samples * out.rows);
  out.fingerprint = row_fingerprint(matrix);
  std::size_t s = 0;
  for (std::size_t c = 0; c < draws.chains; ++c) {
    for (std::size_t d = 0; d < draws.draws; ++d, ++s) {
      const auto beta = draws.draw(c, d);
      for (std::size_t r = 0; r < out.rows; ++r) {
        double eta = beta[0];
        for (std::size_t k = 0; k < cols.size(); ++k) eta += beta[k + 1] * matrix(r, cols[k]);
        out.values[s * out.rows + r] = bernoulli_logit_lpmf(matrix.y(r), eta);
      }
    }
  }
  return out;
}

struct WaicResult {
  double waic = 0.0;
  double lppd = 0.0;
  double p_waic = 0.0;
  double se = 0.0;
  std::vector<double> pointwise;  // elpd_i; sums to waic
  std::uint64_t fingerprint = 0;
};

/// waic = sum_i log mean_s p(y_i | theta_s) - sum_i var_s log p(y_i | theta_s),
/// the variance using the S - 1 denominator; se = sqrt(n var(elpd_i)).
inline WaicResult waic(const PointwiseLoglik& ll) {
  if (ll.samples < 2) throw ConfigError("WAIC needs at least two posterior samples");
  if (ll.rows == 0) throw ConfigError("WAIC needs at least one row");
  WaicResult out;
  out.fingerprint = ll.fingerprint;
  out.pointwise.resize(ll.rows);
  std::vector<double> column(ll.samples);
  for (std::size_t r = 0; r < ll.rows; ++r) {
    for (std::size_t s = 0; s < ll.samples; ++s) column[s] = ll.at(s, r);
    const double lppd = stats::log_mean_exp(column);
    const double p = stats::variance(column, 1);
    out.lppd += lppd;
    out.p_waic += p;
    out.pointwise[r] = lppd - p;
  }
  out.waic = out.lppd - out.p_waic;
  const auto n = static_cast<double>(ll.rows);
  out.se = std::sqrt(n * stats::variance(out.pointwise, 0));
  return out;
}

/// Convenience for a raw [sample][row] array.
inline WaicResult waic(std::span<const std::vector<double>> loglik) {
  PointwiseLoglik ll;
  ll.samples = loglik.size();
  ll.rows = loglik.empty() ? 0 : loglik.front().size();
  for (const auto& s : loglik) {
    if (s.size() != ll.rows) throw ConfigError("ragged log-likelihood array");
    ll.values.insert(ll.values.end(), s.begin(), s.end());
  }
  return waic(ll);
}

struct ComparisonRow {
  std::string name;
  std::size_t rank = 0;
  double waic = 0.0;
  double p_waic = 0.0;
  double d_waic = 0.0;
  double se = 0.0;
  double dse = 0.0;
  /// Set by ablation when the fit failed the convergence gate.
  bool flagged = false;
  double max_rhat = 1.0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;

  const ComparisonRow& row(const std::string& name) const {
    for (const auto& r : rows)
      if (r.name == name) return r;
    throw ConfigError("comparison has no model '" + name + "'");
  }
};

/// Ranks models by descending WAIC (ties by name). d_waic and dse are taken
/// against the top model.
inline ComparisonTable compare(const std::vector<std::pair<std::string, WaicResult>>& models) {
  if (models.size() < 2) throw ConfigError("comparison needs at least two models");
  const auto& first = models.front().second;
  for (const auto& [name, r] : models) {
    if (r.pointwise.size() != first.pointwise.size() || r.fingerprint != first.fingerprint)
      throw ConfigError("model '" + name + "' was evaluated on different rows");
  }
  std::vector<std::size_t> order(models.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (models[a].second.waic != models[b].second.waic)
      return models[a].second.waic > models[b].second.waic;
    return models[a].first < models[b].first;
  });
  const auto& top = models[order.front()].second;
  const auto n = static_cast<double>(top.pointwise.size());
  ComparisonTable table;
  std::vector<double> diff(top.pointwise.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const auto& [name, r] = models[order[rank]];
    ComparisonRow row;
    row.name = name;
    row.rank = rank;
    row.waic = r.waic;
    row.p_waic = r.p_waic;
    row.se = r.se;
    row.d_waic = rank == 0 ? 0.0 : top.waic - r.waic;
    if (rank > 0) {
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = top.pointwise[i] - r.pointwise[i];
      row.dse = std::sqrt(n * stats::variance(diff, 0));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

struct AblationOptions {
  double rhat_gate = 1.05;
  std::string base_name = "base";
};

struct FitRecord {
  std::string name;
  ModelSpec spec;
  PosteriorDraws draws;
  std::vector<CoefficientSummary> summary;
  WaicResult waic;
};

struct AblationResult {
  ComparisonTable table;
  std::vector<FitRecord> fits;  // base first, then removals in predictor order
};

/// Fits `full` and every model with one predictor removed on the same rows,
/// then ranks them by WAIC. Fits whose worst R-hat exceeds the gate stay in
/// the table with `flagged` set.
inline AblationResult ablate(const DesignMatrix& matrix, const ModelSpec& full,
                             const SamplerConfig& sampler, const AblationOptions& opts = {}) {
  if (full.predictors.size() < 2) throw ConfigError("ablation needs at least two predictors");
  full.validate(matrix);
  AblationResult result;
  std::vector<std::pair<std::string, ModelSpec>> members{{opts.base_name, full}};
  for (const auto& p : full.predictors) members.emplace_back(p, full.without(p));

  std::vector<std::pair<std::string, WaicResult>> scored;
  std::map<std::string, double> worst_rhat;
  for (auto& [name, spec] : members) {
    FitRecord rec;
    rec.name = name;
    rec.spec = spec;
    rec.draws = sample_posterior(matrix, spec, sampler);
    rec.summary = summarize(rec.draws);
    rec.waic = waic(pointwise_loglik(rec.draws, matrix));
    worst_rhat[name] = max_rhat(rec.summary);
    scored.emplace_back(name, rec.waic);
    result.fits.push_back(std::move(rec));
  }
  result.table = compare(scored);
  for (auto& row : result.table.rows) {
    row.max_rhat = worst_rhat[row.name];
    row.flagged = !(row.max_rhat <= opts.rhat_gate);
  }
  return result;
}

}  // namespace splitbench
