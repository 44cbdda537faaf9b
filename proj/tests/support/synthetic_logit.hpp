#pragma once

// Design matrices whose outcomes are drawn from a known logit model on the
// standardized predictors.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "splitbench/design_matrix.hpp"

namespace splitbench::testing {

/// `beta` holds the intercept then one coefficient per predictor; predictor
/// columns are named x1, x2, ... and drawn from N(0, 1) before standardizing.
inline DesignMatrix synthetic_logit(std::size_t n, const std::vector<double>& beta,
                                    std::uint64_t seed, std::size_t noise_columns = 0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t p = beta.size() - 1 + noise_columns;
  std::vector<ColumnInfo> cols;
  std::vector<std::vector<double>> raw(p, std::vector<double>(n));
  for (std::size_t c = 0; c < p; ++c) {
    cols.push_back({"x" + std::to_string(c + 1), false});
    for (auto& v : raw[c]) v = z(rng);
  }
  std::vector<std::string> keys(n);
  for (std::size_t r = 0; r < n; ++r) keys[r] = "r" + std::to_string(r);
  const auto shape = DesignMatrix::from_raw(cols, raw, std::vector<int>(n, 0), keys);
  std::vector<int> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    double eta = beta[0];
    for (std::size_t c = 0; c + 1 < beta.size(); ++c) eta += beta[c + 1] * shape(r, c);
    y[r] = u(rng) < 1.0 / (1.0 + std::exp(-eta)) ? 1 : 0;
  }
  return DesignMatrix::from_raw(cols, raw, std::move(y), std::move(keys));
}

inline std::vector<std::string> synthetic_names(std::size_t p) {
  std::vector<std::string> out;
  for (std::size_t c = 0; c < p; ++c) out.push_back("x" + std::to_string(c + 1));
  return out;
}

}  // namespace splitbench::testing
