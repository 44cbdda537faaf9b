#pragma once

// Bayesian logistic regression with Normal(0, sigma) priors, fitted by
// Hamiltonian Monte Carlo with dual-averaging step size adaptation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "splitbench/design_matrix.hpp"
#include "splitbench/error.hpp"

namespace splitbench {

struct ModelSpec {
  std::vector<std::string> predictors;
  /// One per coefficient, intercept first; empty means 2.5 for all.
  std::vector<double> prior_sd;

  static constexpr double kDefaultPriorSd = 2.5;

  std::size_t dim() const noexcept { return predictors.size() + 1; }

  double prior(std::size_t k) const {
    return prior_sd.empty() ? kDefaultPriorSd : prior_sd.at(k);
  }

  std::vector<std::string> coefficient_names() const {
    std::vector<std::string> names{"Intercept"};
    names.insert(names.end(), predictors.begin(), predictors.end());
    return names;
  }

  void validate(const DesignMatrix& m) const {
    for (const auto& p : predictors) m.index_of(p);
    if (!prior_sd.empty() && prior_sd.size() != dim())
      throw ConfigError("prior_sd needs " + std::to_string(dim()) + " entries");
    for (std::size_t k = 0; k < dim(); ++k)
      if (!(prior(k) > 0.0) || !std::isfinite(prior(k)))
        throw ConfigError("prior sd must be positive");
  }

  /// Same priors with one predictor removed.
  ModelSpec without(const std::string& name) const {
    ModelSpec out;
    for (std::size_t i = 0; i < predictors.size(); ++i) {
      if (predictors[i] == name) continue;
      out.predictors.push_back(predictors[i]);
    }
    if (out.predictors.size() == predictors.size())
      throw ConfigError("model has no predictor '" + name + "'");
    if (!prior_sd.empty()) {
      out.prior_sd.push_back(prior_sd[0]);
      for (std::size_t i = 0; i < predictors.size(); ++i)
        if (predictors[i] != name) out.prior_sd.push_back(prior_sd[i + 1]);
    }
    return out;
  }
};

namespace detail {

/// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace detail

/// Log Bernoulli likelihood of outcome y under linear predictor eta.
inline double bernoulli_logit_lpmf(int y, double eta) {
  return y == 1 ? -detail::softplus(-eta) : -detail::softplus(eta);
}

/// Log posterior density (up to the evidence) with its analytic gradient,
/// evaluated on a dense copy of the selected predictor columns.
class LogisticPosterior {
public:
  LogisticPosterior(const DesignMatrix& matrix, const ModelSpec& spec)
      : n_(matrix.rows()), dim_(spec.dim()) {
    spec.validate(matrix);
    const std::size_t p = dim_ - 1;
    x_.resize(n_ * p);
    std::vector<std::size_t> idx;
    for (const auto& name : spec.predictors) idx.push_back(matrix.index_of(name));
    for (std::size_t r = 0; r < n_; ++r)
      for (std::size_t c = 0; c < p; ++c) x_[r * p + c] = matrix(r, idx[c]);
    y_.assign(matrix.outcomes().begin(), matrix.outcomes().end());
    inv_var_.resize(dim_);
    log_norm_ = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      const double s = spec.prior(k);
      inv_var_[k] = 1.0 / (s * s);
      log_norm_ -= std::log(s) + 0.5 * std::log(2.0 * std::numbers::pi);
    }
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t rows() const noexcept { return n_; }

  /// Linear predictor of row r.
  double eta(std::size_t r, std::span<const double> beta) const {
    const std::size_t p = dim_ - 1;
    const double* xr = x_.data() + r * p;
    double e = beta[0];
    for (std::size_t c = 0; c < p; ++c) e += beta[c + 1] * xr[c];
    return e;
  }

  int y(std::size_t r) const { return y_[r]; }

  /// Log density; fills `grad` (size dim) when non-empty.
  double operator()(std::span<const double> beta, std::span<double> grad = {}) const {
    if (beta.size() != dim_)
      throw ConfigError("coefficient vector has " + std::to_string(beta.size()) +
                        " entries, model needs " + std::to_string(dim_));
    for (double b : beta)
      if (!std::isfinite(b)) throw ValidationError("non-finite coefficient");
    const bool want_grad = !grad.empty();
    if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
    const std::size_t p = dim_ - 1;
    double lp = 0.0;
    for (std::size_t r = 0; r < n_; ++r) {
      const double e = eta(r, beta);
      lp += bernoulli_logit_lpmf(y_[r], e);
      if (want_grad) {
        const double resid = static_cast<double>(y_[r]) - detail::logistic(e);
        grad[0] += resid;
        const double* xr = x_.data() + r * p;
        for (std::size_t c = 0; c < p; ++c) grad[c + 1] += resid * xr[c];
      }
    }
    for (std::size_t k = 0; k < dim_; ++k) {
      lp -= 0.5 * beta[k] * beta[k] * inv_var_[k];
      if (want_grad) grad[k] -= beta[k] * inv_var_[k];
    }
    return lp + log_norm_;
  }

private:
  std::size_t n_;
  std::size_t dim_;
  std::vector<double> x_;
  std::vector<int> y_;
  std::vector<double> inv_var_;
  double log_norm_ = 0.0;
};

struct LogPosterior {
  double value = 0.0;
  std::vector<double> gradient;
};

inline LogPosterior log_posterior(std::span<const double> beta, const DesignMatrix& matrix,
                                  const ModelSpec& spec) {
  const LogisticPosterior post(matrix, spec);
  LogPosterior out;
  out.gradient.resize(post.dim());
  out.value = post(beta, out.gradient);
  return out;
}

struct SamplerConfig {
  std::size_t chains = 4;
  std::size_t warmup = 1000;
  std::size_t draws = 1000;
  std::uint64_t seed = 20240101;
  double target_accept = 0.8;
  /// Integration time in units of the adapted posterior scale; each
  /// iteration jitters it uniformly by +-20%.
  double path_length = 2.0;
  std::size_t max_leapfrog = 1024;
  double init_jitter = 0.1;
  bool adapt_metric = true;
  bool parallel = true;

  void validate() const {
    if (chains < 2) throw ConfigError("at least two chains are required");
    if (draws < 2) throw ConfigError("at least two kept draws per chain are required");
    if (!(target_accept > 0.0 && target_accept < 1.0))
      throw ConfigError("target acceptance must lie in (0, 1)");
    if (!(path_length > 0.0)) throw ConfigError("path length must be positive");
    if (max_leapfrog == 0) throw ConfigError("max_leapfrog must be positive");
  }
};

struct ChainStats {
  double mean_accept = 0.0;
  double step_size = 0.0;
  std::size_t divergences = 0;
  std::size_t leapfrog_steps = 0;
  std::vector<double> inv_metric;
};

struct PosteriorDraws {
  std::vector<std::string> names;
  std::size_t chains = 0;
  std::size_t draws = 0;
  std::vector<double> values;  // [chain][draw][coefficient]
  std::vector<double> lp;      // [chain][draw]
  std::vector<ChainStats> chain_stats;

  std::size_t dim() const noexcept { return names.size(); }

  double at(std::size_t chain, std::size_t draw, std::size_t k) const {
    return values[(chain * draws + draw) * dim() + k];
  }

  std::span<const double> draw(std::size_t chain, std::size_t d) const {
    return std::span<const double>(values).subspan((chain * draws + d) * dim(), dim());
  }

  std::vector<double> series(std::size_t k, std::size_t chain) const {
    std::vector<double> out(draws);
    for (std::size_t d = 0; d < draws; ++d) out[d] = at(chain, d, k);
    return out;
  }

  std::vector<std::vector<double>> chains_of(std::size_t k) const {
    std::vector<std::vector<double>> out;
    for (std::size_t c = 0; c < chains; ++c) out.push_back(series(k, c));
    return out;
  }

  std::size_t divergences() const {
    std::size_t n = 0;
    for (const auto& s : chain_stats) n += s.divergences;
    return n;
  }

  /// More than 1% of kept transitions diverged.
  bool divergence_warning() const {
    return static_cast<double>(divergences()) > 0.01 * static_cast<double>(chains * draws);
  }

  std::size_t index_of(const std::string& name) const {
    for (std::size_t k = 0; k < names.size(); ++k)
      if (names[k] == name) return k;
    throw ConfigError("no coefficient '" + name + "'");
  }
};

namespace detail {

struct DualAveraging {
  double mu = 0.0;
  double log_eps_bar = 0.0;
  double h_bar = 0.0;
  double counter = 0.0;
  double target = 0.8;
  static constexpr double kGamma = 0.05;
  static constexpr double kT0 = 10.0;
  static constexpr double kKappa = 0.75;

  void restart(double eps) {
    mu = std::log(10.0 * eps);
    log_eps_bar = 0.0;
    h_bar = 0.0;
    counter = 0.0;
  }

  double update(double accept) {
    counter += 1.0;
    const double w = 1.0 / (counter + kT0);
    h_bar = (1.0 - w) * h_bar + w * (target - accept);
    const double log_eps = mu - std::sqrt(counter) / kGamma * h_bar;
    const double eta = std::pow(counter, -kKappa);
    log_eps_bar = eta * log_eps + (1.0 - eta) * log_eps_bar;
    return std::exp(log_eps);
  }

  double final_step() const { return std::exp(log_eps_bar); }
};

// Warmup schedule: an initial fast interval, doubling metric windows, and a
// terminal fast interval.
inline std::vector<std::size_t> metric_window_ends(std::size_t warmup) {
  std::size_t init = 75, term = 50, base = 25;
  if (warmup < init + term + base) {
    init = warmup * 15 / 100;
    term = warmup / 10;
    base = warmup - init - term;
  }
  std::vector<std::size_t> ends;
  if (base == 0) return ends;
  const std::size_t slow_end = warmup - term;
  std::size_t start = init;
  std::size_t size = base;
  while (start < slow_end) {
    std::size_t end = start + size;
    if (end + 2 * size > slow_end) end = slow_end;
    ends.push_back(end);
    start = end;
    size *= 2;
  }
  return ends;
}

class HmcChain {
public:
  HmcChain(const LogisticPosterior& post, const SamplerConfig& cfg, std::size_t chain_index)
      : post_(post),
        cfg_(cfg),
        rng_(cfg.seed + chain_index),
        dim_(post.dim()),
        theta_(dim_, 0.0),
        grad_(dim_, 0.0),
        inv_metric_(dim_, 1.0) {}

  void run(std::span<double> out_values, std::span<double> out_lp, ChainStats& stats) {
    std::normal_distribution<double> jitter(0.0, cfg_.init_jitter);
    for (auto& t : theta_) t = jitter(rng_);
    lp_ = post_(theta_, grad_);
    if (!std::isfinite(lp_)) throw ValidationError("non-finite log posterior at initialization");

    eps_ = initial_step_size();
    DualAveraging da;
    da.target = cfg_.target_accept;
    da.restart(eps_);

    const auto windows = cfg_.adapt_metric ? metric_window_ends(cfg_.warmup)
                                           : std::vector<std::size_t>{};
    std::size_t window = 0;
    std::size_t window_start = windows.empty() ? 0 : (cfg_.warmup < 150 ? cfg_.warmup * 15 / 100 : 75);
    std::vector<double> w_mean(dim_, 0.0), w_m2(dim_, 0.0);
    std::size_t w_n = 0;

    const std::size_t total = cfg_.warmup + cfg_.draws;
    double accept_sum = 0.0;
    for (std::size_t it = 0; it < total; ++it) {
      const bool warm = it < cfg_.warmup;
      bool divergent = false;
      const double accept = transition(divergent);
      if (warm) {
        eps_ = da.update(accept);
        if (window < windows.size() && it >= window_start) {
          ++w_n;
          for (std::size_t k = 0; k < dim_; ++k) {
            const double delta = theta_[k] - w_mean[k];
            w_mean[k] += delta / static_cast<double>(w_n);
            w_m2[k] += delta * (theta_[k] - w_mean[k]);
          }
          if (it + 1 == windows[window]) {
            const double n = static_cast<double>(w_n);
            for (std::size_t k = 0; k < dim_; ++k) {
              const double var = w_n > 1 ? w_m2[k] / (n - 1.0) : 1.0;
              inv_metric_[k] = (n / (n + 5.0)) * var + 1e-3 * (5.0 / (n + 5.0));
            }
            std::fill(w_mean.begin(), w_mean.end(), 0.0);
            std::fill(w_m2.begin(), w_m2.end(), 0.0);
            w_n = 0;
            window_start = windows[window];
            ++window;
            eps_ = initial_step_size();
            da.restart(eps_);
          }
        }
        if (it + 1 == cfg_.warmup) eps_ = da.final_step();
      } else {
        const std::size_t d = it - cfg_.warmup;
        std::copy(theta_.begin(), theta_.end(), out_values.begin() + static_cast<std::ptrdiff_t>(d * dim_));
        out_lp[d] = lp_;
        accept_sum += accept;
        if (divergent) ++stats.divergences;
      }
    }
    stats.mean_accept = accept_sum / static_cast<double>(cfg_.draws);
    stats.step_size = eps_;
    stats.leapfrog_steps = leapfrog_total_;
    stats.inv_metric = inv_metric_;
  }

private:
  double kinetic(const std::vector<double>& p) const {
    double k = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) k += inv_metric_[i] * p[i] * p[i];
    return 0.5 * k;
  }

  void draw_momentum(std::vector<double>& p) {
    std::normal_distribution<double> z(0.0, 1.0);
    for (std::size_t i = 0; i < dim_; ++i) p[i] = z(rng_) / std::sqrt(inv_metric_[i]);
  }

  // One leapfrog step in place; returns the new log density.
  double leapfrog(std::vector<double>& q, std::vector<double>& p, std::vector<double>& g,
                  double eps) const {
    for (std::size_t i = 0; i < dim_; ++i) p[i] += 0.5 * eps * g[i];
    for (std::size_t i = 0; i < dim_; ++i) q[i] += eps * inv_metric_[i] * p[i];
    double lp = 0.0;
    bool finite = true;
    for (double v : q) finite = finite && std::isfinite(v);
    if (!finite) return -std::numeric_limits<double>::infinity();
    lp = post_(q, g);
    for (std::size_t i = 0; i < dim_; ++i) p[i] += 0.5 * eps * g[i];
    return lp;
  }

  double initial_step_size() {
    double eps = eps_ > 0.0 ? eps_ : 1.0;
    std::vector<double> q(dim_), p(dim_), g(dim_);
    draw_momentum(p);
    const double h0 = -lp_ + kinetic(p);
    auto log_accept = [&](double e) {
      q = theta_;
      g = grad_;
      auto pp = p;
      const double lp1 = leapfrog(q, pp, g, e);
      const double h1 = -lp1 + kinetic(pp);
      return std::isfinite(h1) ? h0 - h1 : -std::numeric_limits<double>::infinity();
    };
    const double la = log_accept(eps);
    const double dir = la > std::log(0.8) ? 1.0 : -1.0;
    for (int iter = 0; iter < 100; ++iter) {
      const double l = log_accept(eps);
      if (dir > 0 && !(l > std::log(0.8))) break;
      if (dir < 0 && l > std::log(0.8)) break;
      eps = dir > 0 ? eps * 2.0 : eps * 0.5;
      if (eps > 1e7 || eps < 1e-7) break;
    }
    return eps;
  }

  double transition(bool& divergent) {
    std::vector<double> p(dim_);
    draw_momentum(p);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double time = cfg_.path_length * (0.8 + 0.4 * unit(rng_));
    const auto steps = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(time / eps_)), 1, cfg_.max_leapfrog);

    const double h0 = -lp_ + kinetic(p);
    std::vector<double> q = theta_;
    std::vector<double> g = grad_;
    double lp = lp_;
    for (std::size_t s = 0; s < steps; ++s) {
      lp = leapfrog(q, p, g, eps_);
      ++leapfrog_total_;
      if (!std::isfinite(lp)) break;
    }
    const double h1 = -lp + kinetic(p);
    divergent = !std::isfinite(h1) || h1 - h0 > 1000.0;
    const double accept = divergent ? 0.0 : std::min(1.0, std::exp(h0 - h1));
    if (!divergent && unit(rng_) < accept) {
      theta_ = std::move(q);
      grad_ = std::move(g);
      lp_ = lp;
    }
    return accept;
  }

  const LogisticPosterior& post_;
  const SamplerConfig& cfg_;
  std::mt19937_64 rng_;
  std::size_t dim_;
  std::vector<double> theta_;
  std::vector<double> grad_;
  std::vector<double> inv_metric_;
  double lp_ = 0.0;
  double eps_ = 0.0;
  std::size_t leapfrog_total_ = 0;
};

}  // namespace detail

/// Runs `config.chains` independent chains; chain c is seeded with
/// seed + c, so results do not depend on scheduling.
inline PosteriorDraws sample_posterior(const DesignMatrix& matrix, const ModelSpec& spec,
                                       const SamplerConfig& config) {
  config.validate();
  const LogisticPosterior post(matrix, spec);
  PosteriorDraws out;
  out.names = spec.coefficient_names();
  out.chains = config.chains;
  out.draws = config.draws;
  out.values.assign(config.chains * config.draws * post.dim(), 0.0);
  out.lp.assign(config.chains * config.draws, 0.0);
  out.chain_stats.resize(config.chains);

  auto run_chain = [&](std::size_t c) {
    detail::HmcChain chain(post, config, c);
    const std::size_t stride = config.draws * post.dim();
    chain.run(std::span<double>(out.values).subspan(c * stride, stride),
              std::span<double>(out.lp).subspan(c * config.draws, config.draws),
              out.chain_stats[c]);
  };
  if (config.parallel && config.chains > 1) {
    std::vector<std::future<void>> jobs;
    for (std::size_t c = 0; c < config.chains; ++c)
      jobs.push_back(std::async(std::launch::async, run_chain, c));
    for (auto& j : jobs) j.get();
  } else {
    for (std::size_t c = 0; c < config.chains; ++c) run_chain(c);
  }
  return out;
}

/// Gelman-Rubin potential scale reduction over equal-length chains.
/// Returns nullopt when the within-chain variance is zero.
inline std::optional<double> rhat(std::span<const std::vector<double>> chains) {
  if (chains.size() < 2) throw ConfigError("R-hat needs at least two chains");
  const std::size_t n = chains.front().size();
  if (n < 2) throw ConfigError("R-hat needs at least two draws per chain");
  for (const auto& c : chains)
    if (c.size() != n) throw ConfigError("R-hat chains must have equal length");
  const auto m = static_cast<double>(chains.size());
  const auto nd = static_cast<double>(n);
  std::vector<double> means, vars;
  for (const auto& c : chains) {
    double s = 0.0;
    for (double v : c) s += v;
    const double mu = s / nd;
    double ss = 0.0;
    for (double v : c) ss += (v - mu) * (v - mu);
    means.push_back(mu);
    vars.push_back(ss / (nd - 1.0));
  }
  // Sorted accumulation keeps the result independent of chain order.
  std::sort(means.begin(), means.end());
  std::sort(vars.begin(), vars.end());
  double grand = 0.0;
  for (double v : means) grand += v;
  grand /= m;
  double b = 0.0;
  for (double v : means) b += (v - grand) * (v - grand);
  b *= nd / (m - 1.0);
  double w = 0.0;
  for (double v : vars) w += v;
  w /= m;
  if (!(w > 0.0)) return std::nullopt;
  return std::sqrt(((nd - 1.0) / nd * w + b / nd) / w);
}

struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
};

struct CoefficientSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double hdi_low = 0.0;
  double hdi_high = 0.0;
  std::optional<double> rhat;
  Histogram histogram;
};

/// Shortest interval holding `prob` of the sorted sample.
inline std::pair<double, double> hdi(std::span<const double> sorted, double prob) {
  const std::size_t n = sorted.size();
  if (n == 0) throw ConfigError("HDI of an empty sample");
  const auto inc = static_cast<std::size_t>(std::floor(prob * static_cast<double>(n)));
  if (inc == 0 || inc >= n) return {sorted.front(), sorted.back()};
  std::size_t best = 0;
  double width = sorted[inc] - sorted[0];
  for (std::size_t i = 1; i + inc < n; ++i) {
    const double w = sorted[i + inc] - sorted[i];
    if (w < width) {
      width = w;
      best = i;
    }
  }
  return {sorted[best], sorted[best + inc]};
}

inline Histogram histogram(std::span<const double> sorted, std::size_t bins) {
  Histogram h;
  const double lo = sorted.front();
  const double hi = sorted.back();
  if (!(hi > lo)) {
    h.edges = {lo, hi};
    h.counts = {sorted.size()};
    return h;
  }
  h.counts.assign(bins, 0);
  for (std::size_t b = 0; b <= bins; ++b)
    h.edges.push_back(lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins));
  for (double v : sorted) {
    auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

/// Pooled per-coefficient summaries; statistics are computed over sorted
/// values so they do not depend on chain order.
inline std::vector<CoefficientSummary> summarize(const PosteriorDraws& draws,
                                                 double hdi_prob = 0.94,
                                                 std::size_t bins = 30) {
  std::vector<CoefficientSummary> out;
  for (std::size_t k = 0; k < draws.dim(); ++k) {
    CoefficientSummary s;
    s.name = draws.names[k];
    std::vector<double> pooled;
    pooled.reserve(draws.chains * draws.draws);
    for (std::size_t c = 0; c < draws.chains; ++c)
      for (std::size_t d = 0; d < draws.draws; ++d) pooled.push_back(draws.at(c, d, k));
    std::sort(pooled.begin(), pooled.end());
    const auto n = static_cast<double>(pooled.size());
    double sum = 0.0;
    for (double v : pooled) sum += v;
    s.mean = sum / n;
    double ss = 0.0;
    for (double v : pooled) ss += (v - s.mean) * (v - s.mean);
    s.sd = pooled.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    if (s.sd == 0.0) s.mean = pooled.front();
    std::tie(s.hdi_low, s.hdi_high) = hdi(pooled, hdi_prob);
    if (draws.chains >= 2 && draws.draws >= 2) s.rhat = rhat(draws.chains_of(k));
    s.histogram = histogram(pooled, bins);
    out.push_back(std::move(s));
  }
  return out;
}

inline double max_rhat(const std::vector<CoefficientSummary>& summary) {
  double worst = 1.0;
  for (const auto& s : summary) {
    if (!s.rhat) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, *s.rhat);
  }
  return worst;
}

/// CSV with header chain,draw,<coefficients...>,lp.
inline void write_draws_csv(std::ostream& os, const PosteriorDraws& draws) {
  os << "chain,draw";
  for (const auto& n : draws.names) os << ',' << n;
  os << ",lp\n";
  char buf[40];
  for (std::size_t c = 0; c < draws.chains; ++c) {
    for (std::size_t d = 0; d < draws.draws; ++d) {
      os << c << ',' << d;
      for (std::size_t k = 0; k < draws.dim(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", draws.at(c, d, k));
        os << ',' << buf;
      }
      std::snprintf(buf, sizeof buf, "%.17g", draws.lp[c * draws.draws + d]);
      os << ',' << buf << '\n';
    }
  }
}

}  // namespace splitbench
