// SPDX-License-Identifier: Apache-2.0
//
// Finite-sample surrogates for the asymptotic rate limits: windowed sup/inf
// extraction from lambda- and eps-grids, Monte Carlo Laplace transforms, and
// the Chernoff / sandwich bounds that tie transform tails to small-ball
// tails.  limsup / liminf are approximated by the sup / inf over the
// trailing portion of a geometric grid; the window fraction is part of every
// result so the surrogate is reproducible.
#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tauber/numerics.hpp"
#include "tauber/random.hpp"

namespace tauber {

// A sampled tail grid in log space: (abscissa, log value), with values <= 0.
// Lambda grids are strictly increasing, eps grids strictly decreasing; both
// orderings put the asymptotic end (large lambda, small eps) last.
struct TailGrid {
  std::vector<std::pair<double, double>> points;

  // From raw probabilities / transform values in (0, 1].  A zero value is a
  // hard error: it signals the grid ran past the resolution of the data, not
  // a true rate.
  static TailGrid from_values(std::span<const std::pair<double, double>> pts,
                              bool increasing_abscissa) {
    TailGrid g;
    g.points.reserve(pts.size());
    for (const auto& [x, v] : pts) {
      if (!(v > 0.0) || v > 1.0)
        throw std::domain_error("TailGrid: values must lie in (0, 1]");
      g.points.emplace_back(x, std::log(v));
    }
    g.check_order(increasing_abscissa);
    return g;
  }

  static TailGrid from_log_values(std::span<const std::pair<double, double>> pts,
                                  bool increasing_abscissa) {
    TailGrid g;
    g.points.assign(pts.begin(), pts.end());
    for (const auto& [x, lv] : g.points)
      if (lv > 0.0) throw std::domain_error("TailGrid: log values must be <= 0");
    g.check_order(increasing_abscissa);
    return g;
  }

  void check_order(bool increasing) const {
    if (points.empty()) throw std::invalid_argument("TailGrid: empty grid");
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!(points[i].first > 0.0))
        throw std::domain_error("TailGrid: abscissae must be positive");
      if (i > 0) {
        const bool ok = increasing ? points[i].first > points[i - 1].first
                                   : points[i].first < points[i - 1].first;
        if (!ok) throw std::domain_error("TailGrid: abscissae must be strictly monotone");
      }
    }
  }
};

// Windowed limsup/liminf surrogate over a transformed grid.
struct RateEstimate {
  double window_sup = 0.0;
  double window_inf = 0.0;
  std::vector<std::pair<double, double>> grid;  // (abscissa, transformed value)
  double window_fraction = 0.5;
};

namespace detail {

inline RateEstimate window_extrema(std::vector<std::pair<double, double>> transformed,
                                   double window_fraction) {
  if (!(window_fraction > 0.0) || window_fraction > 1.0)
    throw std::domain_error("rate window: window_fraction must be in (0, 1]");
  const std::size_t n = transformed.size();
  std::size_t k = static_cast<std::size_t>(std::ceil(window_fraction * static_cast<double>(n)));
  if (k < 1) k = 1;
  if (k > n) k = n;
  RateEstimate est;
  est.window_fraction = window_fraction;
  est.window_sup = kNegInf;
  est.window_inf = kPosInf;
  for (std::size_t i = n - k; i < n; ++i) {
    est.window_sup = std::max(est.window_sup, transformed[i].second);
    est.window_inf = std::min(est.window_inf, transformed[i].second);
  }
  est.grid = std::move(transformed);
  return est;
}

}  // namespace detail

// Transforms (lambda, log L(lambda)) to lambda^{-alpha} log L and reports
// sup/inf over the trailing (largest-lambda) window.
inline RateEstimate laplace_rate_window(const TailGrid& grid, double alpha,
                                        double window_fraction = 0.5) {
  grid.check_order(/*increasing=*/true);
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::domain_error("laplace_rate_window: alpha must be in (0, 1)");
  std::vector<std::pair<double, double>> transformed;
  transformed.reserve(grid.points.size());
  for (const auto& [lambda, log_l] : grid.points)
    transformed.emplace_back(lambda, std::exp(-alpha * std::log(lambda)) * log_l);
  return detail::window_extrema(std::move(transformed), window_fraction);
}

// Transforms (eps, log P(X <= eps)) to eps^beta log P and reports sup/inf
// over the trailing (smallest-eps) window.
inline RateEstimate smallball_rate_window(const TailGrid& grid, double beta,
                                          double window_fraction = 0.5) {
  grid.check_order(/*increasing=*/false);
  if (!(beta > 0.0)) throw std::domain_error("smallball_rate_window: beta must be positive");
  std::vector<std::pair<double, double>> transformed;
  transformed.reserve(grid.points.size());
  for (const auto& [eps, log_p] : grid.points)
    transformed.emplace_back(eps, std::exp(beta * std::log(eps)) * log_p);
  return detail::window_extrema(std::move(transformed), window_fraction);
}

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

// Sample mean of e^{-lambda X_i} with its standard error.  Work is split
// into fixed-size chunks, chunk c drawing from seed.chunk(c), and the chunk
// sums are reduced in index order, so the result is identical for any thread
// count.  Sub-probability samplers are fine: missing mass contributes 0.
inline McEstimate mc_laplace(const std::function<double(RngStream&)>& sampler,
                             double lambda, std::size_t n, SeedSpec seed,
                             int threads = 1) {
  if (n < 2) throw std::domain_error("mc_laplace: n must be >= 2");
  if (!(lambda >= 0.0)) throw std::domain_error("mc_laplace: lambda must be >= 0");
  constexpr std::size_t kChunk = 8192;
  const std::size_t n_chunks = chunk_count(n, kChunk);
  std::vector<double> sums(n_chunks, 0.0), sqsums(n_chunks, 0.0);
  std::atomic<bool> negative_draw{false};
  for_each_chunk(n, kChunk, seed, threads,
                 [&](std::size_t c, std::size_t begin, std::size_t end, RngStream& rng) {
                   double s = 0.0, s2 = 0.0;
                   for (std::size_t i = begin; i < end; ++i) {
                     const double x = sampler(rng);
                     if (!(x >= 0.0)) negative_draw.store(true, std::memory_order_relaxed);
                     const double v = std::exp(-lambda * x);
                     s += v;
                     s2 += v * v;
                   }
                   sums[c] = s;
                   sqsums[c] = s2;
                 });
  if (negative_draw.load())
    throw std::domain_error("mc_laplace: sampler must produce nonnegative values");
  double total = 0.0, total_sq = 0.0;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    total += sums[c];
    total_sq += sqsums[c];
  }
  const double nn = static_cast<double>(n);
  const double mean = total / nn;
  const double var = std::max(0.0, (total_sq - nn * mean * mean) / (nn - 1.0));
  return {mean, std::sqrt(var / nn), n};
}

// log of min over the grid of e^{lambda eps} L(lambda), an upper bound on
// log P(X <= eps) by the exponential Markov inequality.
inline double chernoff_smallball_log_bound(const std::function<double(double)>& log_laplace,
                                           double epsilon,
                                           std::span<const double> lambda_grid) {
  if (!(epsilon > 0.0)) throw std::domain_error("chernoff bound: epsilon must be positive");
  if (lambda_grid.empty()) throw std::invalid_argument("chernoff bound: empty lambda grid");
  double best = kPosInf;
  for (double lambda : lambda_grid) {
    if (!(lambda >= 0.0)) throw std::domain_error("chernoff bound: lambda must be >= 0");
    const double ll = log_laplace(lambda);
    if (ll > 0.0) throw std::domain_error("chernoff bound: transform must be in (0, 1]");
    best = std::min(best, lambda * epsilon + ll);
  }
  return best;
}

// Probability-space convenience wrapper; usable while e^{lambda eps} L stays
// in double range.
inline double chernoff_smallball_bound(const std::function<double(double)>& laplace,
                                       double epsilon,
                                       std::span<const double> lambda_grid) {
  auto log_l = [&](double lambda) {
    const double v = laplace(lambda);
    if (!(v > 0.0) || v > 1.0)
      throw std::domain_error("chernoff bound: transform must be in (0, 1]");
    return std::log(v);
  };
  return std::exp(chernoff_smallball_log_bound(log_l, epsilon, lambda_grid));
}

// P(X <= eps) + e^{-lambda eps}, an upper bound on E(e^{-lambda X}).
inline double sandwich_upper(double cdf_at_eps, double lambda, double epsilon) {
  if (!(cdf_at_eps >= 0.0) || cdf_at_eps > 1.0)
    throw std::domain_error("sandwich_upper: cdf must be in [0, 1]");
  if (!(lambda >= 0.0) || !(epsilon >= 0.0))
    throw std::domain_error("sandwich_upper: lambda and epsilon must be >= 0");
  return cdf_at_eps + std::exp(-lambda * epsilon);
}

// Same bound in log space: log(P(X <= eps) + e^{-lambda eps}).
inline double sandwich_log_upper(double log_cdf_at_eps, double lambda, double epsilon) {
  if (log_cdf_at_eps > 0.0)
    throw std::domain_error("sandwich_log_upper: log cdf must be <= 0");
  if (!(lambda >= 0.0) || !(epsilon >= 0.0))
    throw std::domain_error("sandwich_log_upper: lambda and epsilon must be >= 0");
  return log_add(log_cdf_at_eps, -lambda * epsilon);
}

}  // namespace tauber
