// SPDX-License-Identifier: Apache-2.0
//
// The geometric-lattice distribution supported on {q^n : n >= 1} with
//
//   P(X = q^n) = e^{-|s| q^{-beta(n-1)}} - e^{-|s| q^{-beta n}},
//
// using q^0-with-n=1 read as eps_0 = infinity, so the mass telescopes to 1.
// Its small-ball rate eps^beta log P(X <= eps) oscillates forever between
// s (approached just above each lattice point) and q^beta * s (attained at
// the lattice points), which makes it the extremal witness for the gap
// between lower-limit rate bands.  Everything is evaluated in log space;
// cdf values underflow doubles already at eps = q^30 for desk parameters.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tauber/core.hpp"
#include "tauber/numerics.hpp"
#include "tauber/random.hpp"

namespace tauber {

struct LatticeRates {
  RateValue s_lower;       // liminf small-ball rate: s itself
  RateValue s_upper;       // limsup rate: q^beta * s
  RateValue r_upper;       // limsup Laplace rate, converted from s_upper
  RateBand r_lower_band;   // admissible liminf Laplace rates
};

class LatticeDistribution {
 public:
  // Index cap for sampling; the mass beyond e_400 is far below double
  // resolution for any usable (q, s, beta), and the cap keeps the
  // inverse-cdf search finite.
  static constexpr int kSupportCap = 400;

  LatticeDistribution(double q, double s, double beta)
      : q_(q), s_(s), beta_(beta) {
    if (!(q > 0.0) || !(q < 1.0)) throw std::domain_error("lattice: q must be in (0, 1)");
    if (!(s < 0.0) || !std::isfinite(s)) throw std::domain_error("lattice: s must be negative");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw std::domain_error("lattice: beta must be positive");
  }

  double q() const noexcept { return q_; }
  double s() const noexcept { return s_; }
  double beta() const noexcept { return beta_; }

  // eps_n = q^n.
  double support_point(int n) const {
    require_index(n);
    return std::pow(q_, static_cast<double>(n));
  }

  // log P(X = eps_n).  n = 1 uses eps_0^{-beta} = 0; n >= 2 uses the
  // factored form e^{-|s| q^{-beta(n-1)}} (1 - e^{-|s|(1-q^beta) q^{-beta n}})
  // so the difference of nearby exponentials never cancels.
  double log_pmf(int n) const {
    require_index(n);
    const double abs_s = -s_;
    if (n == 1) return log1mexp(abs_s * q_pow_neg_beta(1));
    const double gap = abs_s * (1.0 - std::pow(q_, beta_)) * q_pow_neg_beta(n);
    if (gap == kPosInf) return kNegInf;  // mass at this depth is below double range
    return -abs_s * q_pow_neg_beta(n - 1) + log1mexp(gap);
  }

  double pmf(int n) const { return std::exp(log_pmf(n)); }

  // n(eps) = min{ n >= 1 : q^n <= eps }.  Computed by logarithm plus an
  // integer fixup against q^n itself, so eps exactly equal to a lattice
  // point lands on its own index.
  int index_of(double eps) const {
    if (!(eps > 0.0)) throw std::domain_error("lattice: eps must be positive");
    if (std::pow(q_, 1.0) <= eps) return 1;
    int n = static_cast<int>(std::ceil(std::log(eps) / std::log(q_)));
    if (n < 1) n = 1;
    while (n > 1 && std::pow(q_, static_cast<double>(n - 1)) <= eps) --n;
    while (std::pow(q_, static_cast<double>(n)) > eps) ++n;
    return n;
  }

  // log P(X <= eps) = -|s| eps_{n(eps)-1}^{-beta}; exactly 0 for eps >= q.
  double log_cdf(double eps) const {
    const int n = index_of(eps);
    if (n == 1) return 0.0;
    return s_ * q_pow_neg_beta(n - 1);  // s < 0, so this is -|s| q^{-beta(n-1)}
  }

  double cdf(double eps) const { return std::exp(log_cdf(eps)); }

  struct SampleResult {
    std::vector<double> values;
    std::uint64_t clamped = 0;  // draws that hit the support cap
  };

  // Inverse-cdf sampling.  The cumulative mass of {eps_1..eps_k} is
  // F_k = 1 - e^{-|s| q^{-beta k}}, so the index solves a single log and is
  // then fixed up by direct comparison.
  SampleResult sample(std::size_t n, SeedSpec seed) const {
    if (n < 1) throw std::domain_error("lattice: sample count must be >= 1");
    SampleResult out;
    out.values.resize(n);
    RngStream rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
      int k = index_from_uniform(rng.uniform01());
      if (k > kSupportCap) {
        k = kSupportCap;
        ++out.clamped;
      }
      out.values[i] = std::pow(q_, static_cast<double>(k));
    }
    return out;
  }

  // log E(e^{-lambda X}), summed term by term in log space.  The residual
  // after N terms is at most the remaining mass e^{-|s| q^{-beta N}}, and the
  // series stops once that bound drops below rel_tol of the running sum.
  double log_laplace(double lambda, double rel_tol = 1e-12) const {
    if (!(lambda >= 0.0)) throw std::domain_error("lattice: lambda must be >= 0");
    if (!(rel_tol > 0.0)) throw std::domain_error("lattice: rel_tol must be positive");
    const double log_tol = std::log(rel_tol);
    double acc = kNegInf;
    for (int n = 1; n <= 100000; ++n) {
      acc = log_add(acc, -lambda * std::pow(q_, static_cast<double>(n)) + log_pmf(n));
      const double qnb = q_pow_neg_beta(n);
      const double log_tail = qnb == kPosInf ? kNegInf : s_ * qnb;
      if (acc > kNegInf && log_tail <= acc + log_tol) return acc;
    }
    throw std::runtime_error("lattice: Laplace series failed to converge");
  }

  double laplace(double lambda, double rel_tol = 1e-12) const {
    return std::exp(log_laplace(lambda, rel_tol));
  }

  // The exact limit rates of this distribution.  For eps_n = q^n the liminf
  // of eps_n^beta / eps_{n-1}^beta is q^beta, giving s_upper = q^beta * s
  // (equal to q*s only when beta = 1; see README).  The liminf Laplace rate
  // is pinned between the explicit transform bound -(1 + max(q, q^beta)) |s|^{1-alpha}
  // and the band edge -|s|^{1-alpha}.
  LatticeRates theoretic_rates(const ExponentPair& pair) const {
    if (std::abs(pair.beta() - beta_) > 1e-12 * std::max(1.0, beta_))
      throw std::domain_error("lattice: pair.beta must match the distribution beta");
    const double q_beta = std::pow(q_, beta_);
    const RateValue s_lower(s_);
    const RateValue s_upper(q_beta * s_);
    const RateValue r_upper = r_from_s(s_upper, pair);
    const double abs_s_pow = std::exp((1.0 - pair.alpha()) * std::log(-s_));
    RateBand band{RateValue(-(1.0 + std::max(q_, q_beta)) * abs_s_pow),
                  RateValue(-abs_s_pow)};
    return {s_lower, s_upper, r_upper, band};
  }

 private:
  static void require_index(int n) {
    if (n < 1) throw std::domain_error("lattice: support index must be >= 1");
  }

  // q^{-beta n}; +inf when the power leaves the double range.
  double q_pow_neg_beta(int n) const {
    return std::pow(q_, -beta_ * static_cast<double>(n));
  }

  // Smallest k with F_k > u, from q^{-beta k} > -log(1-u)/|s|.
  int index_from_uniform(double u) const {
    const double y = -std::log1p(-u) / (-s_);
    int k = 1;
    if (y > 0.0) {
      const double x = std::log(y) / (-beta_ * std::log(q_));
      k = static_cast<int>(std::floor(x)) + 1;
      if (k < 1) k = 1;
    }
    if (k > kSupportCap) return k;
    while (k > 1 && cumulative(k - 1) > u) --k;
    while (k <= kSupportCap && cumulative(k) <= u) ++k;
    return k;
  }

  // F_k = P(X in {eps_1..eps_k}) = 1 - e^{-|s| q^{-beta k}}.
  double cumulative(int k) const { return -std::expm1(s_ * q_pow_neg_beta(k)); }

  double q_;
  double s_;
  double beta_;
};

}  // namespace tauber
