// SPDX-License-Identifier: Apache-2.0
//
// Log-space numerical machinery shared by the whole library: stable special
// functions (log-sum-exp, log sinh/cosh, log(1-e^-x)), the closed-form
// minimizer of v -> c*v^-beta + v, a generic golden-section search, and an
// adaptive Gauss-Legendre quadrature that works entirely on log-integrands.
//
// Everything here takes and returns log-values where magnitudes can leave
// the double range (exp(-|s| q^-beta*n) and sinh(t*gamma) both do at
// desk-scale parameters).
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

namespace tauber {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();
inline constexpr double kLn2 = 0.69314718055994530942;
inline constexpr double kLn2Pi = 1.8378770664093454836;

// Thrown when adaptive refinement runs out of depth before reaching tolerance.
class quadrature_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// log(1 - e^{-x}) for x > 0, stable across both branches.
inline double log1mexp(double x) {
  if (!(x > 0.0)) throw std::domain_error("log1mexp: requires x > 0");
  return x > kLn2 ? std::log1p(-std::exp(-x)) : std::log(-std::expm1(-x));
}

// log(e^a + e^b); tolerates -inf in either slot.
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (a == kNegInf) return kNegInf;
  return a + std::log1p(std::exp(b - a));
}

// log sum_i exp(v_i), computed as m + log sum exp(v_i - m) with m = max v_i.
inline double log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("log_sum_exp: empty input");
  const double m = *std::max_element(values.begin(), values.end());
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - m);
  return m + std::log(acc);
}

// log(sinh u) for u > 0 without overflow: u - log 2 + log(1 - e^{-2u}).
inline double log_sinh(double u) {
  if (!(u > 0.0)) throw std::domain_error("log_sinh: requires u > 0");
  return u - kLn2 + log1mexp(2.0 * u);
}

// log(cosh u), valid for all u.
inline double log_cosh(double u) {
  const double a = std::abs(u);
  return a - kLn2 + std::log1p(std::exp(-2.0 * a));
}

// coth(u) for u > 0 via expm1; behaves like 1/u near zero and 1 at infinity.
inline double coth(double u) {
  if (!(u > 0.0)) throw std::domain_error("coth: requires u > 0");
  const double em = std::expm1(-2.0 * u);  // e^{-2u} - 1, in (-1, 0)
  return (2.0 + em) / (-em);
}

// 1/cosh(u), overflow-safe.
inline double sech(double u) {
  const double e = std::exp(-std::abs(u));
  return 2.0 * e / (1.0 + e * e);
}

struct MinimizeResult {
  double argmin = 0.0;
  double value = 0.0;
};

// Minimizes v -> c*v^{-beta} + v over v > 0.  The function diverges at both
// ends of the half-line, so the infimum is attained at the stationary point
// v* = (beta*c)^{1/(beta+1)} with value c^{1/(beta+1)} beta^{-beta/(beta+1)} (1+beta).
inline MinimizeResult minimize_power_sum(double c, double beta) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::domain_error("minimize_power_sum: requires c > 0");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::domain_error("minimize_power_sum: requires beta > 0");
  const double p = 1.0 / (beta + 1.0);
  const double argmin = std::exp(p * (std::log(beta) + std::log(c)));
  const double value =
      std::exp(p * std::log(c) - beta * p * std::log(beta)) * (1.0 + beta);
  return {argmin, value};
}

// Golden-section search for a unimodal f on [a, b].  Independent of any
// closed form; used as the cross-check route for minimize_power_sum.
template <class F>
MinimizeResult golden_section_minimize(F&& f, double a, double b,
                                       double x_tol = 1e-12,
                                       int max_iter = 400) {
  if (!(a < b)) throw std::invalid_argument("golden_section_minimize: a < b required");
  constexpr double invphi = 0.61803398874989484820;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < max_iter && (b - a) > x_tol * (1.0 + std::abs(a) + std::abs(b)); ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1; f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2; f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  const double xm = 0.5 * (a + b);
  return {xm, f(xm)};
}

struct QuadratureConfig {
  double abs_tol = 1e-300;          // accept a panel whose value is below this outright
  double rel_tol = 1e-10;           // log-space difference accepted between refinements
  int max_depth = 40;               // bisection depth budget
  double truncation_log_tol = -40.0;  // integrand log-values this far below the
                                      // running scale are treated as negligible

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
      throw std::domain_error("QuadratureConfig: tolerances must be positive");
    if (max_depth < 1)
      throw std::domain_error("QuadratureConfig: max_depth >= 1 required");
    if (!(truncation_log_tol < 0.0))
      throw std::domain_error("QuadratureConfig: truncation_log_tol must be negative");
  }
};

namespace detail {

// 15-point Gauss-Legendre rule on [-1, 1].
inline constexpr int kGlOrder = 15;
inline constexpr double kGlNode[kGlOrder] = {
    -0.98799251802048542849, -0.937273392400705904308, -0.848206583410427216201,
    -0.724417731360170047416, -0.570972172608538847537, -0.394151347077563369897,
    -0.201194093997434522301, 0.0,                      0.201194093997434522301,
    0.394151347077563369897,  0.570972172608538847537,  0.724417731360170047416,
    0.848206583410427216201,  0.937273392400705904308,  0.98799251802048542849};
inline constexpr double kGlWeight[kGlOrder] = {
    0.0307532419961172683546, 0.0703660474881081247093, 0.107159220467171935012,
    0.139570677926154314448,  0.166269205816993933553,  0.186161000015562211027,
    0.198431485327111576456,  0.202578241925561272881,  0.198431485327111576456,
    0.186161000015562211027,  0.166269205816993933553,  0.139570677926154314448,
    0.107159220467171935012,  0.0703660474881081247093, 0.0307532419961172683546};

// log of the 15-point panel estimate of int_a^b exp(g).
template <class F>
double gl15_log_panel(F& g, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double vals[kGlOrder];
  double m = kNegInf;
  for (int i = 0; i < kGlOrder; ++i) {
    vals[i] = g(mid + half * kGlNode[i]);
    m = std::max(m, vals[i]);
  }
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (int i = 0; i < kGlOrder; ++i) acc += kGlWeight[i] * std::exp(vals[i] - m);
  return m + std::log(acc) + std::log(half);
}

template <class F>
struct AdaptiveCtx {
  F& g;
  const QuadratureConfig& cfg;
  double root_scale;  // log of the first whole-interval estimate

  double recurse(double a, double b, double whole, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = gl15_log_panel(g, a, mid);
    const double right = gl15_log_panel(g, mid, b);
    const double combined = log_add(left, right);
    // A few forced levels so a sharply peaked integrand cannot be missed by
    // the coarse nodes of the first panels.
    if (depth >= 2) {
      if (combined == kNegInf && whole == kNegInf) return kNegInf;
      const double err = std::abs(combined - whole);
      if (err <= cfg.rel_tol) return combined;
      if (combined < std::log(cfg.abs_tol)) return combined;
      if (combined < root_scale + cfg.truncation_log_tol - 10.0) return combined;
    }
    if (depth >= cfg.max_depth)
      throw quadrature_error("integrate_1d: max_depth exhausted before tolerance");
    return log_add(recurse(a, mid, left, depth + 1),
                   recurse(mid, b, right, depth + 1));
  }
};

}  // namespace detail

// Returns log of int_lower^upper exp(log_integrand(x)) dx by adaptive
// bisection with a fixed 15-point Gauss-Legendre rule per panel, accumulated
// in log space.  Bounds must be finite; callers clip unbounded domains at a
// truncation radius of their own choosing (see the kernel-chain code).
template <class F>
double integrate_1d(F&& log_integrand, double lower, double upper,
                    const QuadratureConfig& config = {}) {
  config.validate();
  if (!std::isfinite(lower) || !std::isfinite(upper))
    throw std::domain_error("integrate_1d: bounds must be finite");
  if (!(lower < upper))
    throw std::domain_error("integrate_1d: requires lower < upper");
  auto& g = log_integrand;
  const double whole = detail::gl15_log_panel(g, lower, upper);
  detail::AdaptiveCtx<std::remove_reference_t<F>> ctx{g, config, whole};
  return ctx.recurse(lower, upper, whole, 0);
}

}  // namespace tauber
