// SPDX-License-Identifier: Apache-2.0
//
// Exponent-pair algebra for exponential Tauberian relations.
//
// For a nonnegative random variable X, a Laplace-transform decay rate
// r = lim 1/lambda^alpha log E(e^{-lambda X}) and a small-ball decay rate
// s = lim eps^beta log P(X <= eps) with conjugate exponents
// 1/alpha = 1/beta + 1 are linked through the constant identity
// |alpha r|^{1/alpha} = |beta s|^{1/beta}.  When only lower limits exist the
// identity degrades to a two-sided band whose width is controlled by the
// binary entropy H(alpha); this header implements the conversions and the
// band arithmetic.  All power evaluations run as exp((1/p) log(...)) with an
// explicit zero guard.
#pragma once

#include <cmath>
#include <stdexcept>

namespace tauber {

// The conjugate pair (alpha, beta) with 1/alpha = 1/beta + 1, stored
// together so the conjugacy is checked once at construction.
class ExponentPair {
 public:
  static ExponentPair from_alpha(double alpha) {
    require_alpha(alpha);
    return ExponentPair(alpha, alpha / (1.0 - alpha));
  }

  static ExponentPair from_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta))
      throw std::domain_error("ExponentPair: beta must be in (0, inf)");
    return ExponentPair(beta / (1.0 + beta), beta);
  }

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

 private:
  ExponentPair(double a, double b) : alpha_(a), beta_(b) {
    if (std::abs(1.0 / alpha_ - (1.0 / beta_ + 1.0)) > 1e-12 * (1.0 / alpha_))
      throw std::domain_error("ExponentPair: conjugacy 1/alpha = 1/beta + 1 violated");
  }

  static void require_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
      throw std::domain_error("ExponentPair: alpha must be in (0, 1)");
  }

  double alpha_;
  double beta_;
};

inline ExponentPair pair_from_alpha(double alpha) { return ExponentPair::from_alpha(alpha); }
inline ExponentPair pair_from_beta(double beta) { return ExponentPair::from_beta(beta); }

// An exponential decay rate (log-probability per eps^-beta or lambda^alpha).
// Laplace transforms of nonnegative variables lie in (0, 1], so every rate
// handled here is a finite nonpositive real; -inf (super-exponential decay)
// is rejected at construction instead of propagated.
class RateValue {
 public:
  explicit RateValue(double value) : value_(value) {
    if (!std::isfinite(value) || value > 0.0)
      throw std::domain_error("RateValue: must be finite and <= 0");
  }

  double value() const noexcept { return value_; }

 private:
  double value_;
};

// Interval [lower, upper] of admissible rates, both <= 0.
struct RateBand {
  RateValue lower;
  RateValue upper;

  RateBand(RateValue lo, RateValue hi) : lower(lo), upper(hi) {
    if (lower.value() > upper.value())
      throw std::domain_error("RateBand: lower must not exceed upper");
  }
};

// Binary entropy H(alpha) = -alpha log alpha - (1-alpha) log(1-alpha),
// in (0, log 2] on (0, 1).
inline double entropy_H(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::domain_error("entropy_H: alpha must be in (0, 1)");
  return -alpha * std::log(alpha) - (1.0 - alpha) * std::log(1.0 - alpha);
}

namespace detail {

// |x|^p as exp(p log|x|) with the zero case handled explicitly.
inline double pow_abs(double x, double p) {
  const double ax = std::abs(x);
  return ax == 0.0 ? 0.0 : std::exp(p * std::log(ax));
}

}  // namespace detail

// |alpha r|^{1/alpha}, the transform-side De Bruijn constant.
inline double debruijn_from_laplace(RateValue r, const ExponentPair& pair) {
  return detail::pow_abs(pair.alpha() * r.value(), 1.0 / pair.alpha());
}

// |beta s|^{1/beta}, the small-ball-side De Bruijn constant.
inline double debruijn_from_smallball(RateValue s, const ExponentPair& pair) {
  return detail::pow_abs(pair.beta() * s.value(), 1.0 / pair.beta());
}

// Relative defect of the identity |alpha r|^{1/alpha} = |beta s|^{1/beta}.
inline double identity_residual(RateValue r, RateValue s, const ExponentPair& pair) {
  const double lhs = debruijn_from_laplace(r, pair);
  const double rhs = debruijn_from_smallball(s, pair);
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
}

// Small-ball rate with the same De Bruijn constant as r:
// s = -|alpha r|^{beta/alpha} / beta.
inline RateValue s_from_r(RateValue r, const ExponentPair& pair) {
  if (r.value() == 0.0) return RateValue(0.0);
  const double mag = detail::pow_abs(pair.alpha() * r.value(), pair.beta() / pair.alpha());
  return RateValue(-mag / pair.beta());
}

// Inverse conversion: r = -|beta s|^{alpha/beta} / alpha.
inline RateValue r_from_s(RateValue s, const ExponentPair& pair) {
  if (s.value() == 0.0) return RateValue(0.0);
  const double mag = detail::pow_abs(pair.beta() * s.value(), pair.alpha() / pair.beta());
  return RateValue(-mag / pair.alpha());
}

// Band of small-ball lower-limit rates compatible with a Laplace lower-limit
// rate r_lower:  |alpha r|^{1/alpha} <= |beta s|^{1/beta} <= |e^{H(alpha)} alpha r|^{1/alpha},
// solved for s.  Degenerates to [0, 0] when r_lower is zero.
inline RateBand slower_band_from_rlower(RateValue r_lower, const ExponentPair& pair) {
  if (r_lower.value() == 0.0) return RateBand(RateValue(0.0), RateValue(0.0));
  const double p = pair.beta() / pair.alpha();
  const double log_k = std::log(pair.alpha() * std::abs(r_lower.value()));
  const double upper = -std::exp(p * log_k) / pair.beta();
  const double lower = -std::exp(p * (log_k + entropy_H(pair.alpha()))) / pair.beta();
  return RateBand(RateValue(lower), RateValue(upper));
}

// The same band inverted: r_lower in [-|beta s|^{1-alpha}/alpha, -|s|^{1-alpha}].
// The endpoints match slower_band_from_rlower through the identity
// beta^{1-alpha}/alpha = e^{H(alpha)}.
inline RateBand rlower_band_from_slower(RateValue s_lower, const ExponentPair& pair) {
  if (s_lower.value() == 0.0) return RateBand(RateValue(0.0), RateValue(0.0));
  const double p = 1.0 - pair.alpha();
  const double abs_s = std::abs(s_lower.value());
  const double lower = -detail::pow_abs(pair.beta() * abs_s, p) / pair.alpha();
  const double upper = -detail::pow_abs(abs_s, p);
  return RateBand(RateValue(lower), RateValue(upper));
}

}  // namespace tauber
