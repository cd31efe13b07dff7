// SPDX-License-Identifier: Apache-2.0
//
// Damped Brownian path functionals: X = int_0^t B_s^2 ds.
//
// The damped transition kernel
//
//   phi(x; t, z) = sqrt(gamma) / sqrt(2 pi sinh(t gamma))
//                  * exp( -((x^2+z^2) gamma cosh(t gamma) - 2 x z gamma)
//                         / (2 sinh(t gamma)) )
//
// is the density of E_x(exp(-gamma^2/2 X); B_t in dz).  The Markov property
// factorizes expectations with box constraints at intermediate times into a
// chain of 1-D kernel integrals, which this module evaluates by backward
// recursion in log space.  The gamma -> infinity scaling limit of the chain
// is a per-coordinate quadratic minimization; its small-ball counterpart
// (after rate conversion with alpha = 1/2) gives the finite-dimensional rate
// functions implemented here, plus plain Monte Carlo to probe them.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tauber/numerics.hpp"
#include "tauber/random.hpp"

namespace tauber {

// The conditioning event held no sampled path (exit-code 4 at the CLI).
class conditioning_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A closed interval, possibly unbounded on either side.  "Essential infimum"
// over a box with nonempty interior equals the plain infimum, which is the
// semantics used throughout; degenerate point boxes [a, a] get the pointwise
// value.
struct Interval {
  double lo = -kPosInf;
  double hi = kPosInf;

  Interval() = default;
  Interval(double a, double b) : lo(a), hi(b) {
    if (std::isnan(a) || std::isnan(b) || !(lo <= hi))
      throw std::domain_error("Interval: requires lo <= hi");
  }

  static Interval all() { return {}; }

  bool contains(double x) const { return x >= lo && x <= hi; }
  bool is_all() const { return lo == -kPosInf && hi == kPosInf; }

  // The point of the box closest to the origin.
  double nearest_to_zero() const {
    if (lo > 0.0) return lo;
    if (hi < 0.0) return hi;
    return 0.0;
  }

  // "a:b" | ":b" | "a:" | ":" with missing sides unbounded.
  static Interval parse(std::string_view text);
};

using BoxFamily = std::vector<Interval>;

// Comma-separated list of interval specs, one box per constrained time.
inline BoxFamily parse_box_list(std::string_view text) {
  BoxFamily out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(Interval::parse(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

inline Interval Interval::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("Interval: expected 'a:b', ':b', 'a:' or ':'");
  const auto parse_side = [](std::string_view side, double unbounded) {
    if (side.empty()) return unbounded;
    std::size_t used = 0;
    const double v = std::stod(std::string(side), &used);
    if (used != side.size())
      throw std::invalid_argument("Interval: malformed endpoint '" + std::string(side) + "'");
    return v;
  };
  return Interval(parse_side(text.substr(0, colon), -kPosInf),
                  parse_side(text.substr(colon + 1), kPosInf));
}

// Ordered observation times 0 < t_1 < ... < t_n <= horizon.
struct TimeGrid {
  double horizon = 1.0;
  std::vector<double> times;

  TimeGrid(double horizon_, std::vector<double> times_)
      : horizon(horizon_), times(std::move(times_)) {
    if (!(horizon > 0.0)) throw std::domain_error("TimeGrid: horizon must be positive");
    if (times.empty()) throw std::domain_error("TimeGrid: at least one time required");
    double prev = 0.0;
    for (double t : times) {
      if (!(t > prev)) throw std::domain_error("TimeGrid: times must be strictly increasing and positive");
      prev = t;
    }
    if (times.back() > horizon)
      throw std::domain_error("TimeGrid: times must not exceed the horizon");
  }

  bool ends_at_horizon() const { return times.back() == horizon; }
};

struct KernelParams {
  double gamma = 1.0;  // damping; the integrand weight is exp(-gamma^2/2 X)
  double t = 1.0;      // time increment

  KernelParams(double gamma_, double t_) : gamma(gamma_), t(t_) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
      throw std::domain_error("KernelParams: gamma must be positive");
    if (!(t > 0.0) || !std::isfinite(t))
      throw std::domain_error("KernelParams: t must be positive");
  }
};

// log phi(x; t, z), entirely in log space:
//   1/2 log gamma - 1/2 log(2 pi) - 1/2 logsinh(t gamma)
//   - gamma [ (x^2+z^2) coth(t gamma) - 2 x z / sinh(t gamma) ] / 2
// with logsinh(u) = u - log 2 + log(1 - e^{-2u}).  Finite up to t*gamma = 500
// and beyond; sinh itself would overflow at u ~ 710.
inline double log_kernel(double x, double z, const KernelParams& params) {
  const double u = params.t * params.gamma;
  const double ls = log_sinh(u);
  const double inv_sinh = std::exp(-ls);
  const double quad = (x * x + z * z) * coth(u) - 2.0 * x * z * inv_sinh;
  return 0.5 * std::log(params.gamma) - 0.5 * kLn2Pi - 0.5 * ls -
         0.5 * params.gamma * quad;
}

// Closed form of the unconstrained transform: the kernel integrates to
//   E_x exp(-gamma^2/2 int_0^t B^2) = exp(-(gamma x^2 / 2) tanh(t gamma)) / sqrt(cosh(t gamma)).
// Serves as the analytic cross-check for the chain quadrature.
inline double log_laplace_exact(double x0, double gamma, double t) {
  const KernelParams params(gamma, t);  // validates
  const double u = params.t * params.gamma;
  return -0.5 * gamma * x0 * x0 * std::tanh(u) - 0.5 * log_cosh(u);
}

namespace detail {

// Backward recursion over the kernel chain.  Level k integrates
// phi(z; dt_k, y) * h_{k+1}(y) over A_k, where h is the continuation value;
// every level is an adaptive 1-D pass, so cost grows with the node product
// across levels (n <= 4 or so stays cheap).  Unbounded box sides are clipped
// at the kernel's own Gaussian window: given z, the kernel in y has mean
// z sech(u) and standard deviation sqrt(tanh(u)/gamma); the window is wide
// enough that the clipped tail sits below truncation_log_tol relative to the
// panel scale.
struct ChainProblem {
  std::vector<double> deltas;
  BoxFamily boxes;
  double gamma = 1.0;
  QuadratureConfig quad;

  double eval(std::size_t level, double z) const {
    const double dt = deltas[level];
    const double u = gamma * dt;
    const KernelParams params(gamma, dt);
    const double mu = z * sech(u);
    const double sigma = std::sqrt(std::tanh(u) / gamma);
    const double radius = std::sqrt(2.0 * (-quad.truncation_log_tol + 25.0)) * sigma;
    // Window around the kernel's maximum inside the box (the box point
    // nearest the Gaussian mean), so far-away boxes keep their boundary
    // layer; the discarded tail is e^{-radius^2/2sigma^2} relative to it.
    const double peak = std::min(std::max(mu, boxes[level].lo), boxes[level].hi);
    const double lo = std::max(boxes[level].lo, peak - radius);
    const double hi = std::min(boxes[level].hi, peak + radius);
    if (!(lo < hi)) return kNegInf;
    const bool last = level + 1 == boxes.size();
    auto integrand = [&](double y) {
      const double lk = log_kernel(z, y, params);
      return last ? lk : lk + eval(level + 1, y);
    };
    return integrate_1d(integrand, lo, hi, quad);
  }
};

inline void check_chain_args(const TimeGrid& grid, const BoxFamily& boxes) {
  if (grid.times.size() != boxes.size())
    throw std::invalid_argument("kernel chain: one box per time required");
}

// Appends the horizon time with an unconstrained box when the user grid
// stops early; the factorization needs t_n = horizon.
inline void append_horizon(std::vector<double>& times, BoxFamily& boxes, double horizon) {
  if (times.back() < horizon) {
    times.push_back(horizon);
    boxes.push_back(Interval::all());
  }
}

}  // namespace detail

// log E_x0[ exp(-gamma^2/2 int_0^t B^2) prod_i 1_{A_i}(B_{t_i}) ] by nested
// 1-D quadrature of the kernel chain.
inline double chain_log_functional(double x0, const TimeGrid& grid, const BoxFamily& boxes,
                                   double gamma, const QuadratureConfig& quad = {}) {
  detail::check_chain_args(grid, boxes);
  if (!(gamma > 0.0)) throw std::domain_error("kernel chain: gamma must be positive");
  std::vector<double> times = grid.times;
  BoxFamily working = boxes;
  detail::append_horizon(times, working, grid.horizon);
  detail::ChainProblem problem;
  problem.boxes = std::move(working);
  problem.gamma = gamma;
  problem.quad = quad;
  problem.deltas.resize(times.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    problem.deltas[i] = times[i] - prev;
    prev = times[i];
  }
  return problem.eval(0, x0);
}

struct EssInfResult {
  double value = 0.0;
  std::vector<double> argmin;
};

// Minimizes sum_i w_i z_i^2 over the box product: separable, so each
// coordinate takes the box point nearest the origin.
inline EssInfResult essinf_quadratic(const BoxFamily& boxes, std::span<const double> weights) {
  if (boxes.size() != weights.size())
    throw std::invalid_argument("essinf_quadratic: one weight per box required");
  EssInfResult out;
  out.argmin.reserve(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw std::domain_error("essinf_quadratic: weights must be >= 0");
    if (!(boxes[i].lo <= boxes[i].hi)) throw std::domain_error("essinf_quadratic: empty box");
    const double zi = boxes[i].nearest_to_zero();
    out.argmin.push_back(zi);
    out.value += weights[i] * zi * zi;
  }
  return out;
}

// gamma -> infinity limit of (1/gamma) chain_log_functional:
//   -( t/2 + x0^2/2 + essinf sum z_i^2 with final weight 1/2 ).
inline double bsqr_asymptotic_rate(double x0, const TimeGrid& grid, const BoxFamily& boxes) {
  detail::check_chain_args(grid, boxes);
  std::vector<double> times = grid.times;
  BoxFamily working = boxes;
  detail::append_horizon(times, working, grid.horizon);
  std::vector<double> weights(working.size(), 1.0);
  weights.back() = 0.5;
  const double m = essinf_quadratic(working, weights).value;
  return -(grid.horizon / 2.0 + x0 * x0 / 2.0 + m);
}

// Small-ball rate of the conditional box probability:
//   lim eps log P( B_{t_i} in A_i | X <= eps ) = -( (t+m)^2 - t^2 ) / 8,
// m the quadratic ess inf with weights 2 on interior times and 1 on a final
// time sitting at the horizon (2 everywhere when t_n < horizon).
inline double condbb_rate(const TimeGrid& grid, const BoxFamily& boxes) {
  detail::check_chain_args(grid, boxes);
  std::vector<double> weights(boxes.size(), 2.0);
  if (grid.ends_at_horizon()) weights.back() = 1.0;
  const double m = essinf_quadratic(boxes, weights).value;
  const double t = grid.horizon;
  return -m * (m + 2.0 * t) / 8.0;  // expanded (t+m)^2/8 - t^2/8
}

// Finite-dimensional rate function at the skeleton value z:
//   ( (t + S)^2 - t^2 ) / 8 with S = 2 z_1^2 + ... + 2 z_n^2, the final
// term entering with coefficient 1 instead of 2 when t_n = horizon.
inline double rate_I_finite(std::span<const double> z, const TimeGrid& grid) {
  if (z.size() != grid.times.size())
    throw std::invalid_argument("rate_I_finite: one value per grid time required");
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double coeff = (i + 1 == z.size() && grid.ends_at_horizon()) ? 1.0 : 2.0;
    s += coeff * z[i] * z[i];
  }
  return s * (s + 2.0 * grid.horizon) / 8.0;
}

// Path-space rate function evaluated on a finite skeleton, times strictly
// increasing in (0, horizon].  Adding interior points only grows the value,
// so the supremum over subsets of the skeleton is attained using all of it:
//   ( (t + 2 sum_{u<t} w_u^2 + w_t^2)^2 - t^2 ) / 8,
// with w_t = 0 when the skeleton does not reach the horizon.
//
// Refining the skeleton of a continuous path with any nonzero value picks up
// infinitely many times where w_u^2 is bounded below, so the full-path rate
// is +inf there; finite rates live on skeletons (equivalently, on paths
// vanishing off a finite time set).  This evaluator is the finite-skeleton
// lower bound, exact once the skeleton carries the support of the path.
inline double rate_I_path(std::span<const std::pair<double, double>> skeleton, double horizon) {
  if (!(horizon > 0.0)) throw std::domain_error("rate_I_path: horizon must be positive");
  double s = 0.0;
  double at_horizon = 0.0;
  double prev = 0.0;
  for (const auto& [time, value] : skeleton) {
    if (!(time > prev) || time > horizon)
      throw std::domain_error("rate_I_path: times must be strictly increasing in (0, horizon]");
    prev = time;
    if (time == horizon)
      at_horizon = value;
    else
      s += 2.0 * value * value;
  }
  const double total = s + at_horizon * at_horizon;
  return total * (total + 2.0 * horizon) / 8.0;
}

struct PathSampleConfig {
  std::size_t steps = 1000;    // uniform discretization of [0, horizon]
  std::size_t n_paths = 10000;
  SeedSpec seed;
  int threads = 1;

  void validate() const {
    if (steps < 2) throw std::domain_error("PathSampleConfig: steps must be >= 2");
    if (n_paths < 1) throw std::domain_error("PathSampleConfig: n_paths must be >= 1");
  }
};

namespace detail {

// Nearest discretization index for each requested time.
inline std::vector<std::size_t> skeleton_indices(std::span<const double> times,
                                                 double horizon, std::size_t steps) {
  std::vector<std::size_t> idx;
  idx.reserve(times.size());
  const double dt = horizon / static_cast<double>(steps);
  for (double t : times) {
    if (!(t > 0.0) || t > horizon)
      throw std::domain_error("path sampling: skeleton times must lie in (0, horizon]");
    auto i = static_cast<std::size_t>(std::llround(t / dt));
    if (i > steps) i = steps;
    idx.push_back(i);
  }
  return idx;
}

// Walks Gaussian-increment paths chunk by chunk (chunk c on seed.chunk(c)),
// handing each visitor the trapezoid value of int B^2 and the path values at
// the requested indices.  Chunk slots + in-order reduction keep every
// consumer thread-count-independent.
template <class Visit>
void visit_l2_paths(const PathSampleConfig& config, double horizon,
                    std::span<const std::size_t> sk_idx, Visit&& visit) {
  config.validate();
  if (!(horizon > 0.0)) throw std::domain_error("path sampling: horizon must be positive");
  constexpr std::size_t kChunk = 1024;
  const double dt = horizon / static_cast<double>(config.steps);
  const double sqrt_dt = std::sqrt(dt);
  for_each_chunk(
      config.n_paths, kChunk, config.seed, config.threads,
      [&](std::size_t c, std::size_t begin, std::size_t end, RngStream& rng) {
        std::vector<double> skeleton(sk_idx.size());
        for (std::size_t path = begin; path < end; ++path) {
          double prev = 0.0;
          double acc = 0.0;
          for (std::size_t k = 0; k < sk_idx.size(); ++k)
            if (sk_idx[k] == 0) skeleton[k] = 0.0;
          for (std::size_t step = 1; step <= config.steps; ++step) {
            const double b = prev + sqrt_dt * rng.normal();
            acc += prev * prev + b * b;
            for (std::size_t k = 0; k < sk_idx.size(); ++k)
              if (sk_idx[k] == step) skeleton[k] = b;
            prev = b;
          }
          visit(c, path, acc * dt * 0.5, std::span<const double>(skeleton));
        }
      });
}

}  // namespace detail

struct PathFunctionalSample {
  double integral = 0.0;
  std::vector<double> skeleton;
};

// Simulates X = int_0^t B^2 by Gaussian increments and the trapezoid rule,
// returning per-path integrals plus path values at the requested times
// (snapped to the nearest grid point).
inline std::vector<PathFunctionalSample> sample_l2_functional(
    const PathSampleConfig& config, double horizon,
    std::span<const double> skeleton_times = {}) {
  const auto idx = detail::skeleton_indices(skeleton_times, horizon, config.steps);
  std::vector<PathFunctionalSample> out(config.n_paths);
  detail::visit_l2_paths(config, horizon, idx,
                         [&](std::size_t, std::size_t path, double integral,
                             std::span<const double> skeleton) {
                           out[path].integral = integral;
                           out[path].skeleton.assign(skeleton.begin(), skeleton.end());
                         });
  return out;
}

struct SmallBallEstimate {
  double p_hat = 0.0;
  double ci_halfwidth = 0.0;  // binomial 95%
  std::uint64_t hits = 0;
  std::size_t n_paths = 0;
  bool reliable = true;  // false when hits < 30
};

// P(X <= eps) by plain rejection counting.
inline SmallBallEstimate mc_smallball(double epsilon, const PathSampleConfig& config,
                                      double horizon) {
  if (!(epsilon > 0.0)) throw std::domain_error("mc_smallball: epsilon must be positive");
  const std::size_t n_chunks = chunk_count(config.n_paths, 1024);
  std::vector<std::uint64_t> hits(n_chunks, 0);
  detail::visit_l2_paths(config, horizon, {},
                         [&](std::size_t c, std::size_t, double integral,
                             std::span<const double>) {
                           if (integral <= epsilon) ++hits[c];
                         });
  SmallBallEstimate est;
  est.n_paths = config.n_paths;
  for (auto h : hits) est.hits += h;
  const double n = static_cast<double>(config.n_paths);
  est.p_hat = static_cast<double>(est.hits) / n;
  est.ci_halfwidth = 1.96 * std::sqrt(est.p_hat * (1.0 - est.p_hat) / n);
  est.reliable = est.hits >= 30;
  return est;
}

struct ConditionalEstimate {
  double p_hat = 0.0;
  double ci_halfwidth = 0.0;
  std::uint64_t conditioning_hits = 0;
  std::uint64_t joint_hits = 0;
  std::size_t n_paths = 0;
  bool reliable = true;
};

// P( B_{t_i} in A_i | X <= eps ) as a ratio of counts over the same paths.
inline ConditionalEstimate mc_conditional(const TimeGrid& grid, const BoxFamily& boxes,
                                          double epsilon, const PathSampleConfig& config) {
  detail::check_chain_args(grid, boxes);
  if (!(epsilon > 0.0)) throw std::domain_error("mc_conditional: epsilon must be positive");
  const auto idx = detail::skeleton_indices(grid.times, grid.horizon, config.steps);
  const std::size_t n_chunks = chunk_count(config.n_paths, 1024);
  std::vector<std::uint64_t> cond(n_chunks, 0), joint(n_chunks, 0);
  detail::visit_l2_paths(config, grid.horizon, idx,
                         [&](std::size_t c, std::size_t, double integral,
                             std::span<const double> skeleton) {
                           if (integral > epsilon) return;
                           ++cond[c];
                           for (std::size_t k = 0; k < boxes.size(); ++k)
                             if (!boxes[k].contains(skeleton[k])) return;
                           ++joint[c];
                         });
  ConditionalEstimate est;
  est.n_paths = config.n_paths;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    est.conditioning_hits += cond[c];
    est.joint_hits += joint[c];
  }
  if (est.conditioning_hits == 0)
    throw conditioning_error("mc_conditional: no sampled path satisfied the conditioning event");
  const double m = static_cast<double>(est.conditioning_hits);
  est.p_hat = static_cast<double>(est.joint_hits) / m;
  est.ci_halfwidth = 1.96 * std::sqrt(est.p_hat * (1.0 - est.p_hat) / m);
  est.reliable = est.joint_hits >= 30;
  return est;
}

}  // namespace tauber
