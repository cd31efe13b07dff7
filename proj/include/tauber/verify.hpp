// SPDX-License-Identifier: Apache-2.0
//
// Programmatic verification checks.  Each check pins an expected value, an
// observed value and an explicit tolerance; a report is the conjunction of
// its checks.  The checks are grouped into small functions so the acceptance
// harness can run and time them individually; the CLI `verify` command
// bundles them into the core / lattice / brownian suites, with Monte Carlo
// sizes taken from VerifyOptions.
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tauber/brownian.hpp"
#include "tauber/core.hpp"
#include "tauber/estimators.hpp"
#include "tauber/jsonio.hpp"
#include "tauber/lattice.hpp"
#include "tauber/numerics.hpp"
#include "tauber/random.hpp"

namespace tauber {

struct CheckResult {
  std::string name;
  double expected = 0.0;
  double observed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline CheckResult check_close(std::string name, double expected, double observed,
                               double tolerance) {
  const bool pass = std::isfinite(observed) && std::abs(observed - expected) <= tolerance;
  return {std::move(name), expected, observed, tolerance, pass};
}

// Count-style check: passes when `violations` is zero.
inline CheckResult check_zero_count(std::string name, std::uint64_t violations) {
  return {std::move(name), 0.0, static_cast<double>(violations), 0.0, violations == 0};
}

struct VerifyOptions {
  SeedSpec seed{};
  int threads = 1;
  std::size_t lattice_samples = 1'000'000;
  std::size_t transform_paths = 50'000;   // acceptance harness raises to 200000
  std::size_t transform_steps = 2000;
  std::size_t smallball_paths = 200'000;  // acceptance harness raises to 1000000
  std::size_t smallball_steps = 1000;
  double smallball_epsilon = 0.02;
};

// ---------------------------------------------------------------------------
// core checks
// ---------------------------------------------------------------------------

// 200 random (alpha, s) draws: the De Bruijn constants of r_from_s(s) and s
// must agree, and the conversions must invert each other.
inline std::vector<CheckResult> checks_debruijn_identity(SeedSpec seed) {
  RngStream rng(seed.chunk(101));
  double worst_residual = 0.0;
  double worst_round_trip = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double alpha = 0.05 + 0.9 * rng.uniform01();
    const double s_mag = std::exp(std::log(1e-6) + rng.uniform01() * std::log(20.0 / 1e-6));
    const ExponentPair pair = pair_from_alpha(alpha);
    const RateValue s(-s_mag);
    const RateValue r = r_from_s(s, pair);
    worst_residual = std::max(worst_residual, identity_residual(r, s, pair));
    const double back = s_from_r(r, pair).value();
    worst_round_trip = std::max(worst_round_trip, std::abs(back - s.value()) / s_mag);
  }
  return {check_close("debruijn-identity-residual", 0.0, worst_residual, 1e-12),
          check_close("debruijn-round-trip", 0.0, worst_round_trip, 1e-12)};
}

// alpha = 1/2 closed form s = -r^2/4, exact in floating point.
inline std::vector<CheckResult> checks_alpha_half() {
  const ExponentPair half = pair_from_alpha(0.5);
  return {check_close("alpha-half-s-from-r", -1.0, s_from_r(RateValue(-2.0), half).value(), 0.0),
          check_close("alpha-half-r-from-s", -2.0, r_from_s(RateValue(-1.0), half).value(), 0.0)};
}

// Band arithmetic at alpha = 1/2 plus inversion consistency across alpha:
// feeding either edge of the r-band of s back through the s-band recovers s
// as the matching edge.
inline std::vector<CheckResult> checks_rate_bands() {
  std::vector<CheckResult> out;
  const ExponentPair half = pair_from_alpha(0.5);
  const RateBand band = slower_band_from_rlower(RateValue(-1.0), half);
  out.push_back(check_close("band-alpha-half-lower", -1.0, band.lower.value(), 1e-12));
  out.push_back(check_close("band-alpha-half-upper", -0.25, band.upper.value(), 1e-12));
  double worst = 0.0;
  const RateValue s(-0.7);
  for (int k = 1; k <= 9; ++k) {
    const ExponentPair pair = pair_from_alpha(0.1 * k);
    const RateBand r_band = rlower_band_from_slower(s, pair);
    const double via_lower = slower_band_from_rlower(r_band.lower, pair).upper.value();
    const double via_upper = slower_band_from_rlower(r_band.upper, pair).lower.value();
    worst = std::max(worst, std::abs(via_lower - s.value()) / 0.7);
    worst = std::max(worst, std::abs(via_upper - s.value()) / 0.7);
  }
  out.push_back(check_close("band-inversion-consistency", 0.0, worst, 1e-12));
  return out;
}

// ---------------------------------------------------------------------------
// lattice checks (q = 1/2, s = -1, beta = 1 unless stated)
// ---------------------------------------------------------------------------

// The oscillation extremes of eps^beta log cdf: exactly q^beta * s = -1/2 at
// lattice points, and s = -1 (to 1e-9) just above them, plus the Kolmogorov
// distance of the empirical cdf.
inline std::vector<CheckResult> checks_lattice_exactness(SeedSpec seed,
                                                         std::size_t n_samples) {
  std::vector<CheckResult> out;
  const LatticeDistribution dist(0.5, -1.0, 1.0);

  double worst_at = 0.0, worst_below = 0.0;
  for (int n = 2; n <= 20; ++n) {
    const double eps = dist.support_point(n);
    worst_at = std::max(worst_at, std::abs(eps * dist.log_cdf(eps) - (-0.5)));
    const double eps_below = eps * (1.0 - 1e-9);
    worst_below =
        std::max(worst_below, std::abs(eps_below * dist.log_cdf(eps_below) - (-1.0)));
  }
  out.push_back(check_close("lattice-rate-at-points", 0.0, worst_at, 0.0));
  out.push_back(check_close("lattice-rate-below-points", 0.0, worst_below, 1e-8));

  const auto sampled = dist.sample(n_samples, seed.chunk(201));
  std::vector<std::uint64_t> counts(LatticeDistribution::kSupportCap + 1, 0);
  for (double v : sampled.values) ++counts[static_cast<std::size_t>(dist.index_of(v))];
  double ks = 0.0;
  std::uint64_t tail = 0;  // samples <= q^n, accumulated from deep n upward
  for (int n = LatticeDistribution::kSupportCap; n >= 1; --n) {
    tail += counts[static_cast<std::size_t>(n)];
    const double emp = static_cast<double>(tail) / static_cast<double>(sampled.values.size());
    ks = std::max(ks, std::abs(emp - dist.cdf(dist.support_point(n))));
  }
  out.push_back(check_close("lattice-empirical-ks", 0.0, ks, 0.003));
  return out;
}

// Windowed Laplace rates on a geometric grid of 64 points over [1e2, 1e6],
// trailing-half window.
inline std::vector<CheckResult> checks_lattice_window() {
  std::vector<CheckResult> out;
  const LatticeDistribution dist(0.5, -1.0, 1.0);
  const ExponentPair pair = pair_from_alpha(0.5);
  const LatticeRates rates = dist.theoretic_rates(pair);
  std::vector<std::pair<double, double>> pts;
  const int n_pts = 64;
  for (int i = 0; i < n_pts; ++i) {
    const double lambda = std::exp(std::log(1e2) + (std::log(1e6) - std::log(1e2)) *
                                                       (static_cast<double>(i) / (n_pts - 1)));
    pts.emplace_back(lambda, dist.log_laplace(lambda));
  }
  const auto grid = TailGrid::from_log_values(pts, /*increasing_abscissa=*/true);
  const RateEstimate est = laplace_rate_window(grid, pair.alpha(), 0.5);
  const double r_upper = rates.r_upper.value();  // -sqrt(2)
  out.push_back(check_close("lattice-laplace-window-sup", r_upper, est.window_sup,
                            0.05 * std::abs(r_upper)));
  // Admissible liminf band [-1.5, -1], widened by 5% on each edge.
  const double lo = rates.r_lower_band.lower.value() * 1.05;
  const double hi = rates.r_lower_band.upper.value() * 0.95;
  out.push_back(check_close("lattice-laplace-window-inf", 0.5 * (lo + hi), est.window_inf,
                            0.5 * (hi - lo)));
  return out;
}

// Chernoff and sandwich dominance on a 20 x 20 (lambda, eps) grid, compared
// in log space so deep-tail cdf values stay meaningful.
inline std::vector<CheckResult> checks_lattice_dominance() {
  const LatticeDistribution dist(0.5, -1.0, 1.0);
  std::vector<double> lambdas, epsilons;
  for (int i = 0; i < 20; ++i) {
    lambdas.push_back(std::exp((std::log(1e4) - std::log(1.0)) * i / 19.0));
    epsilons.push_back(std::exp(std::log(dist.support_point(20)) +
                                (std::log(0.5) - std::log(dist.support_point(20))) * i / 19.0));
  }
  std::vector<double> log_l(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) log_l[i] = dist.log_laplace(lambdas[i]);
  auto log_laplace_fn = [&](double lambda) {
    for (std::size_t i = 0; i < lambdas.size(); ++i)
      if (lambdas[i] == lambda) return log_l[i];
    return dist.log_laplace(lambda);
  };
  std::uint64_t chernoff_viol = 0, sandwich_viol = 0;
  const double slack = 1e-9;  // float headroom on mathematically weak inequalities
  for (double eps : epsilons) {
    const double bound = chernoff_smallball_log_bound(log_laplace_fn, eps, lambdas);
    if (dist.log_cdf(eps) > bound + slack) ++chernoff_viol;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      const double upper = sandwich_log_upper(dist.log_cdf(eps), lambdas[i], eps);
      if (log_l[i] > upper + slack) ++sandwich_viol;
    }
  }
  return {check_zero_count("lattice-chernoff-dominance", chernoff_viol),
          check_zero_count("lattice-sandwich-dominance", sandwich_viol)};
}

// ---------------------------------------------------------------------------
// brownian checks
// ---------------------------------------------------------------------------

// Unconstrained chain against the closed form -1/2 log cosh(gamma t), and
// Chapman-Kolmogorov composition of the kernel over intermediate times.
inline std::vector<CheckResult> checks_chain_transform() {
  std::vector<CheckResult> out;
  const QuadratureConfig quad{};
  for (double gamma : {1.0, 5.0, 20.0}) {
    const TimeGrid grid(1.0, {1.0});
    const double chain = chain_log_functional(0.0, grid, {Interval::all()}, gamma, quad);
    out.push_back(check_close("chain-vs-closed-form-gamma-" + format_double(gamma),
                              log_laplace_exact(0.0, gamma, 1.0), chain, 1e-6));
  }
  struct Case {
    double gamma, t1, t2, x, z;
  };
  const Case cases[] = {{1.0, 0.4, 0.6, 0.3, -0.8},
                        {5.0, 0.5, 0.5, 1.0, 0.5},
                        {20.0, 0.3, 0.9, -0.4, 0.2}};
  double worst = 0.0;
  for (const auto& c : cases) {
    const KernelParams k1(c.gamma, c.t1), k2(c.gamma, c.t2);
    const double sigma = std::sqrt(
        std::max(std::tanh(c.gamma * c.t1), std::tanh(c.gamma * c.t2)) / c.gamma);
    const double radius = std::max(std::abs(c.x), std::abs(c.z)) + 12.0 * sigma;
    auto integrand = [&](double y) {
      return log_kernel(c.x, y, k1) + log_kernel(y, c.z, k2);
    };
    const double composed = integrate_1d(integrand, -radius, radius, quad);
    const double direct = log_kernel(c.x, c.z, KernelParams(c.gamma, c.t1 + c.t2));
    worst = std::max(worst, std::abs(composed - direct));
  }
  out.push_back(check_close("chapman-kolmogorov-residual", 0.0, worst, 1e-6));
  return out;
}

// Monte Carlo transform against 1/sqrt(cosh gamma): one path sweep feeds all
// gamma values; tolerance is 3 standard errors plus a 0.5% discretization
// allowance.
inline std::vector<CheckResult> checks_mc_transform(SeedSpec seed, std::size_t paths,
                                                    std::size_t steps, int threads) {
  std::vector<CheckResult> out;
  const std::vector<double> gammas = {1.0, 2.0, 5.0};
  PathSampleConfig config;
  config.steps = steps;
  config.n_paths = paths;
  config.seed = seed.chunk(10'000);
  config.threads = threads;
  const std::size_t n_chunks = chunk_count(config.n_paths, 1024);
  std::vector<std::vector<double>> sums(gammas.size(), std::vector<double>(n_chunks, 0.0));
  std::vector<std::vector<double>> sqs(gammas.size(), std::vector<double>(n_chunks, 0.0));
  detail::visit_l2_paths(config, 1.0, {},
                         [&](std::size_t c, std::size_t, double integral,
                             std::span<const double>) {
                           for (std::size_t g = 0; g < gammas.size(); ++g) {
                             const double v = std::exp(-0.5 * gammas[g] * gammas[g] * integral);
                             sums[g][c] += v;
                             sqs[g][c] += v * v;
                           }
                         });
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    double total = 0.0, total_sq = 0.0;
    for (std::size_t c = 0; c < n_chunks; ++c) {
      total += sums[g][c];
      total_sq += sqs[g][c];
    }
    const double n = static_cast<double>(config.n_paths);
    const double mean = total / n;
    const double var = std::max(0.0, (total_sq - n * mean * mean) / (n - 1.0));
    const double se = std::sqrt(var / n);
    const double expected = std::exp(log_laplace_exact(0.0, gammas[g], 1.0));
    out.push_back(check_close("mc-transform-gamma-" + format_double(gammas[g]), expected,
                              mean, 3.0 * se + 0.005 * expected));
  }
  return out;
}

// Scaling limit of the constrained chain: (1/gamma) log -> -1 for the box
// [1, 2] at the horizon, approaching monotonically.
inline std::vector<CheckResult> checks_chain_scaling_limit() {
  const QuadratureConfig quad{};
  const TimeGrid grid(1.0, {1.0});
  const BoxFamily boxes = {Interval(1.0, 2.0)};
  const double target = bsqr_asymptotic_rate(0.0, grid, boxes);  // -1
  std::vector<double> values;
  for (double gamma : {25.0, 50.0, 100.0, 200.0})
    values.push_back(chain_log_functional(0.0, grid, boxes, gamma, quad) / gamma);
  std::uint64_t non_monotone = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(std::abs(values[i] - target) < std::abs(values[i - 1] - target))) ++non_monotone;
  return {check_zero_count("scaling-limit-monotone", non_monotone),
          check_close("scaling-limit-gamma-200", target, values.back(), 0.05 * std::abs(target))};
}

// Small-ball exponent of int_0^1 B^2: eps log p_hat near the limit -1/8.
// The default tolerance of 25% covers the finite-eps prefactor correction,
// which at eps = 0.02 is 18.9% of the leading term (the exact value of
// eps log P(X <= eps) there is -0.1486, from the spectral decomposition of
// the functional); the correction decays only like eps log(1/eps).
inline std::vector<CheckResult> checks_smallball_exponent(SeedSpec seed, std::size_t paths,
                                                          std::size_t steps, double eps,
                                                          int threads,
                                                          double tol_fraction = 0.25) {
  PathSampleConfig config;
  config.steps = steps;
  config.n_paths = paths;
  config.seed = seed.chunk(20'000);
  config.threads = threads;
  const SmallBallEstimate est = mc_smallball(eps, config, 1.0);
  const double observed = est.hits == 0 ? kNegInf : eps * std::log(est.p_hat);
  return {check_close("smallball-exponent", -0.125, observed, tol_fraction * 0.125)};
}

// Rate-function consistency: I_{t_1..t_n}(z) equals the negated conditional
// rate on the point boxes {z_i}, I vanishes at 0, and the separable ess inf
// matches a scan-and-refine oracle.
inline std::vector<CheckResult> checks_rate_consistency(SeedSpec seed) {
  std::vector<CheckResult> out;
  {
    RngStream rng(seed.chunk(301));
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform01() * 4.0);
      const double horizon = 0.5 + 2.0 * rng.uniform01();
      std::vector<double> times;
      for (std::size_t i = 0; i < n; ++i) {
        const double slot = static_cast<double>(i + 1) - 0.9 * rng.uniform01();
        times.push_back(horizon * slot / static_cast<double>(n));
      }
      if (rng.uniform01() < 0.5) times.back() = horizon;
      const TimeGrid grid(horizon, times);
      std::vector<double> z;
      BoxFamily boxes;
      for (std::size_t i = 0; i < n; ++i) {
        const double zi = -2.0 + 4.0 * rng.uniform01();
        z.push_back(zi);
        boxes.emplace_back(zi, zi);
      }
      worst = std::max(worst, std::abs(rate_I_finite(z, grid) - (-condbb_rate(grid, boxes))));
    }
    out.push_back(check_close("rate-vs-condbb-point-boxes", 0.0, worst, 1e-12));
    const TimeGrid grid(1.0, {0.5, 1.0});
    const std::vector<double> zero = {0.0, 0.0};
    out.push_back(check_close("rate-at-zero", 0.0, rate_I_finite(zero, grid), 0.0));
  }
  {
    RngStream rng(seed.chunk(302));
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
      const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform01() * 4.0);
      BoxFamily boxes;
      std::vector<double> weights;
      for (std::size_t i = 0; i < n; ++i) {
        double a = -5.0 + 10.0 * rng.uniform01();
        double b = -5.0 + 10.0 * rng.uniform01();
        if (a > b) std::swap(a, b);
        const double style = rng.uniform01();
        if (style < 0.15)
          boxes.emplace_back(a, kPosInf);
        else if (style < 0.3)
          boxes.emplace_back(-kPosInf, b);
        else
          boxes.emplace_back(a, b);
        weights.push_back(2.0 * rng.uniform01());
      }
      // Oracle: per coordinate, dense scan over the (clipped) box followed by
      // golden-section refinement of the best bracket.
      double oracle = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double lo = std::max(boxes[i].lo, -6.0);
        const double hi = std::min(boxes[i].hi, 6.0);
        auto f = [&](double v) { return weights[i] * v * v; };
        const int m = 2000;
        double best_v = lo, best_f = f(lo);
        for (int k = 1; k <= m; ++k) {
          const double v = lo + (hi - lo) * k / m;
          if (f(v) < best_f) {
            best_f = f(v);
            best_v = v;
          }
        }
        const double step = (hi - lo) / m;
        const auto refined = golden_section_minimize(
            f, std::max(lo, best_v - step), std::min(hi, best_v + step), 1e-14);
        oracle += std::min(best_f, refined.value);
      }
      worst = std::max(worst, std::abs(essinf_quadratic(boxes, weights).value - oracle));
    }
    out.push_back(check_close("essinf-vs-brute-force", 0.0, worst, 1e-9));
  }
  return out;
}

// ---------------------------------------------------------------------------
// suites
// ---------------------------------------------------------------------------

struct VerifyReport {
  std::string suite;
  VerifyOptions options;
  std::vector<CheckResult> checks;
  double wall_seconds = 0.0;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

inline std::vector<CheckResult> verify_core(const VerifyOptions& opts) {
  std::vector<CheckResult> out;
  for (auto&& block : {checks_debruijn_identity(opts.seed), checks_alpha_half(),
                       checks_rate_bands()})
    for (const auto& c : block) out.push_back(c);
  return out;
}

inline std::vector<CheckResult> verify_lattice(const VerifyOptions& opts) {
  std::vector<CheckResult> out;
  for (auto&& block : {checks_lattice_exactness(opts.seed, opts.lattice_samples),
                       checks_lattice_window(), checks_lattice_dominance()})
    for (const auto& c : block) out.push_back(c);
  return out;
}

inline std::vector<CheckResult> verify_brownian(const VerifyOptions& opts) {
  std::vector<CheckResult> out;
  for (auto&& block :
       {checks_chain_transform(),
        checks_mc_transform(opts.seed, opts.transform_paths, opts.transform_steps,
                            opts.threads),
        checks_chain_scaling_limit(),
        checks_smallball_exponent(opts.seed, opts.smallball_paths, opts.smallball_steps,
                                  opts.smallball_epsilon, opts.threads),
        checks_rate_consistency(opts.seed)})
    for (const auto& c : block) out.push_back(c);
  return out;
}

inline VerifyReport run_verify(std::string_view suite, const VerifyOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  VerifyReport report;
  report.suite = suite;
  report.options = opts;
  auto append = [&](std::vector<CheckResult> checks) {
    for (auto& c : checks) report.checks.push_back(std::move(c));
  };
  if (suite == "core" || suite == "all") append(verify_core(opts));
  if (suite == "lattice" || suite == "all") append(verify_lattice(opts));
  if (suite == "brownian" || suite == "all") append(verify_brownian(opts));
  if (report.checks.empty())
    throw std::invalid_argument("verify: unknown suite '" + std::string(suite) + "'");
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

inline JsonValue report_to_json(const VerifyReport& report) {
  JsonValue config = JsonValue::object();
  config.set("seed_root", report.options.seed.root_seed)
      .set("seed_stream", report.options.seed.stream_index)
      .set("threads", report.options.threads)
      .set("lattice_samples", report.options.lattice_samples)
      .set("transform_paths", report.options.transform_paths)
      .set("transform_steps", report.options.transform_steps)
      .set("smallball_paths", report.options.smallball_paths)
      .set("smallball_steps", report.options.smallball_steps)
      .set("smallball_epsilon", report.options.smallball_epsilon);
  JsonValue checks = JsonValue::array();
  for (const auto& c : report.checks) {
    JsonValue item = JsonValue::object();
    item.set("name", c.name)
        .set("expected", c.expected)
        .set("observed", c.observed)
        .set("tolerance", c.tolerance)
        .set("pass", c.pass);
    checks.push(std::move(item));
  }
  JsonValue root = JsonValue::object();
  root.set("suite", report.suite)
      .set("config", std::move(config))
      .set("checks", std::move(checks))
      .set("all_pass", report.all_pass())
      .set("wall_time_seconds", report.wall_seconds);
  return root;
}

}  // namespace tauber
