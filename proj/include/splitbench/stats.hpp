#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "splitbench/error.hpp"

namespace splitbench::stats {

inline double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Variance with denominator n - ddof.
inline double variance(std::span<const double> x, int ddof = 1) {
  const auto n = static_cast<double>(x.size());
  if (n - ddof <= 0) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / (n - ddof);
}

inline double sd(std::span<const double> x, int ddof = 1) {
  return std::sqrt(variance(x, ddof));
}

/// log(mean(exp(x))) without overflow.
inline double log_mean_exp(std::span<const double> x) {
  const double hi = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double v : x) s += std::exp(v - hi);
  return hi + std::log(s / static_cast<double>(x.size()));
}

struct TTest {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

/// Two-sided Welch t-test of mean(a) - mean(b).
inline TTest welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw ValidationError("t-test needs at least two observations per group");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = variance(a) / na;
  const double vb = variance(b) / nb;
  const double diff = mean(a) - mean(b);
  TTest r;
  if (va + vb == 0.0) {
    if (diff == 0.0) return {0.0, na + nb - 2.0, 1.0};
    r.t = diff > 0 ? std::numeric_limits<double>::infinity()
                   : -std::numeric_limits<double>::infinity();
    r.df = na + nb - 2.0;
    r.p = 0.0;
    return r;
  }
  r.t = diff / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) /
         (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  const boost::math::students_t dist(r.df);
  r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t))));
  return r;
}

}  // namespace splitbench::stats
