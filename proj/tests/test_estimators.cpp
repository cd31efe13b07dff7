// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <utility>
#include <vector>

#include "catch2/catch_amalgamated.hpp"
#include "tauber/estimators.hpp"
#include "tauber/lattice.hpp"

using namespace tauber;

namespace {

std::vector<std::pair<double, double>> geometric_log_grid(
    double lo, double hi, int n, const std::function<double(double)>& log_value) {
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < n; ++i) {
    const double x = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
    pts.emplace_back(x, log_value(x));
  }
  return pts;
}

}  // namespace

TEST_CASE("tail grid validation") {
  const std::vector<std::pair<double, double>> ok = {{1.0, 1.0}, {2.0, 0.5}};
  CHECK_NOTHROW(TailGrid::from_values(ok, true));
  const std::vector<std::pair<double, double>> zero = {{1.0, 1.0}, {2.0, 0.0}};
  CHECK_THROWS_AS(TailGrid::from_values(zero, true), std::domain_error);
  const std::vector<std::pair<double, double>> big = {{1.0, 1.5}};
  CHECK_THROWS_AS(TailGrid::from_values(big, true), std::domain_error);
  const std::vector<std::pair<double, double>> not_monotone = {{2.0, 0.5}, {1.0, 0.5}};
  CHECK_THROWS_AS(TailGrid::from_values(not_monotone, true), std::domain_error);
  CHECK_NOTHROW(TailGrid::from_values(not_monotone, false));
  CHECK_THROWS_AS(TailGrid::from_log_values({}, true), std::invalid_argument);
}

TEST_CASE("laplace rate window on exact power laws") {
  // L(lambda) = exp(-2 sqrt(lambda)): the transform is the constant -2.
  const auto grid = TailGrid::from_log_values(
      geometric_log_grid(1.0, 1e8, 40, [](double l) { return -2.0 * std::sqrt(l); }), true);
  const auto est = laplace_rate_window(grid, 0.5, 0.5);
  CHECK(est.window_sup == Catch::Approx(-2.0).epsilon(1e-12));
  CHECK(est.window_inf == Catch::Approx(-2.0).epsilon(1e-12));
  CHECK(est.grid.size() == 40);

  // L == 1: zero rate.
  std::vector<std::pair<double, double>> ones;
  for (int i = 1; i <= 10; ++i) ones.emplace_back(static_cast<double>(i), 1.0);
  const auto est1 = laplace_rate_window(TailGrid::from_values(ones, true), 0.5, 0.5);
  CHECK(est1.window_sup == 0.0);
  CHECK(est1.window_inf == 0.0);

  CHECK_THROWS_AS(laplace_rate_window(grid, 1.5, 0.5), std::domain_error);
  CHECK_THROWS_AS(laplace_rate_window(grid, 0.5, 0.0), std::domain_error);
}

TEST_CASE("smallball rate window on exact decay") {
  // P(X <= eps) = exp(-1/eps), beta = 1: transform is exactly -1.
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < 30; ++i) {
    const double eps = std::exp(0.0 - 0.4 * i);
    pts.emplace_back(eps, -1.0 / eps);
  }
  const auto est = smallball_rate_window(TailGrid::from_log_values(pts, false), 1.0, 0.5);
  CHECK(est.window_sup == Catch::Approx(-1.0).epsilon(1e-14));
  CHECK(est.window_inf == Catch::Approx(-1.0).epsilon(1e-14));

  std::vector<std::pair<double, double>> ones = {{0.5, 1.0}, {0.25, 1.0}, {0.125, 1.0}};
  const auto est1 = smallball_rate_window(TailGrid::from_values(ones, false), 1.0, 1.0);
  CHECK(est1.window_sup == 0.0);
  CHECK(est1.window_inf == 0.0);
}

TEST_CASE("lattice windows land on the analytic rates") {
  const LatticeDistribution dist(0.5, -1.0, 1.0);

  // Small-ball side: grids hugging the lattice points from both sides.
  std::vector<std::pair<double, double>> at, below;
  for (int n = 2; n <= 24; ++n) {
    const double eps = dist.support_point(n);
    at.emplace_back(eps, dist.log_cdf(eps));
    const double b = eps * (1.0 - 1e-9);
    below.emplace_back(b, dist.log_cdf(b));
  }
  const auto est_at = smallball_rate_window(TailGrid::from_log_values(at, false), 1.0, 0.5);
  CHECK(est_at.window_sup == Catch::Approx(-0.5).margin(1e-6));
  CHECK(est_at.window_inf == Catch::Approx(-0.5).margin(1e-6));
  const auto est_below =
      smallball_rate_window(TailGrid::from_log_values(below, false), 1.0, 0.5);
  CHECK(est_below.window_sup == Catch::Approx(-1.0).margin(1e-6));
  CHECK(est_below.window_inf == Catch::Approx(-1.0).margin(1e-6));

  // One combined grid sampling both sides of each jump sees the full
  // oscillation: sup at the lattice points, inf just below them (where the
  // next, much smaller cdf step applies).
  std::vector<std::pair<double, double>> combined;
  for (int n = 2; n <= 24; ++n) {
    const double eps = dist.support_point(n);
    combined.emplace_back(eps, dist.log_cdf(eps));
    const double b = eps * (1.0 - 1e-9);
    combined.emplace_back(b, dist.log_cdf(b));
  }
  const auto est_both =
      smallball_rate_window(TailGrid::from_log_values(combined, false), 1.0, 0.5);
  CHECK(est_both.window_sup == Catch::Approx(-0.5).margin(1e-6));
  CHECK(est_both.window_inf == Catch::Approx(-1.0).margin(1e-6));
}

TEST_CASE("window nesting across fractions") {
  RngStream rng(SeedSpec{5, 0});
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < 64; ++i)
    pts.emplace_back(std::pow(10.0, 1.0 + 0.1 * i), -5.0 * rng.uniform01());
  const auto grid = TailGrid::from_log_values(pts, true);
  // Nested windows give nested [inf, sup] intervals: growing the fraction
  // can only grow the sup and shrink the inf.
  double prev_sup = -kPosInf, prev_inf = kPosInf;
  for (double frac : {0.1, 0.25, 0.5, 0.75, 1.0}) {
    const auto est = laplace_rate_window(grid, 0.5, frac);
    CHECK(est.window_sup >= prev_sup);
    CHECK(est.window_inf <= prev_inf);
    CHECK(est.window_inf <= est.window_sup);
    CHECK(est.window_sup <= 0.0);
    prev_sup = est.window_sup;
    prev_inf = est.window_inf;
  }
}

TEST_CASE("mc_laplace") {
  const LatticeDistribution dist(0.5, -1.0, 1.0);
  auto sampler = [&](RngStream& rng) {
    return dist.support_point(1 + static_cast<int>(rng.uniform01() < 0.5 ? 0 : 1));
  };

  // lambda = 0 with a full-mass sampler is exactly (1, 0).
  const auto unit = mc_laplace(sampler, 0.0, 1000, SeedSpec{1, 0});
  CHECK(unit.estimate == 1.0);
  CHECK(unit.std_error == 0.0);

  // Against the analytic transform, three standard errors; the sampler is a
  // plain inverse-cdf walk fed by the passed stream.
  auto inv_sampler = [&](RngStream& rng) {
    const double u = rng.uniform01();
    int k = 1;
    while (k < 60 && -std::expm1(dist.s() * std::pow(dist.q(), -k)) <= u) ++k;
    return dist.support_point(k);
  };
  const auto est = mc_laplace(inv_sampler, 1.0, 100'000, SeedSpec{2, 0});
  CHECK(est.estimate ==
        Catch::Approx(dist.laplace(1.0)).margin(3.0 * est.std_error));

  // Pathwise monotone in lambda under a common seed.
  const auto lo = mc_laplace(inv_sampler, 1.0, 20'000, SeedSpec{3, 0});
  const auto hi = mc_laplace(inv_sampler, 10.0, 20'000, SeedSpec{3, 0});
  CHECK(hi.estimate <= lo.estimate);

  // Thread-count invariance.
  const auto t1 = mc_laplace(inv_sampler, 2.0, 50'000, SeedSpec{4, 0}, 1);
  const auto t4 = mc_laplace(inv_sampler, 2.0, 50'000, SeedSpec{4, 0}, 4);
  CHECK(t1.estimate == t4.estimate);
  CHECK(t1.std_error == t4.std_error);

  CHECK_THROWS_AS(mc_laplace(inv_sampler, 1.0, 1, SeedSpec{1, 0}), std::domain_error);
  auto negative = [](RngStream&) { return -1.0; };
  CHECK_THROWS_AS(mc_laplace(negative, 1.0, 10, SeedSpec{1, 0}), std::domain_error);
}

TEST_CASE("chernoff bound on a closed-form transform") {
  // L(lambda) = exp(-c sqrt(lambda)) has analytic optimum exp(-c^2/(4 eps)).
  const double c = 2.0, eps = 0.1;
  auto log_l = [&](double lambda) { return -c * std::sqrt(lambda); };
  std::vector<double> grid;
  for (int i = 0; i < 400; ++i)
    grid.push_back(std::exp(std::log(1.0) + i * (std::log(1e4) - 0.0) / 399.0));
  const double bound = chernoff_smallball_log_bound(log_l, eps, grid);
  const double analytic = -c * c / (4.0 * eps);
  CHECK(bound >= analytic);                    // grid minimum cannot beat the continuum
  CHECK(bound <= analytic + std::log(1.01));   // and brackets it within 1%

  // L == 1 with 0 in the grid: the bound is exactly 1.
  auto log_one = [](double) { return 0.0; };
  const std::vector<double> with_zero = {0.0, 1.0, 2.0};
  CHECK(chernoff_smallball_log_bound(log_one, 0.5, with_zero) == 0.0);
  CHECK(chernoff_smallball_bound([](double) { return 1.0; }, 0.5, with_zero) == 1.0);

  CHECK_THROWS_AS(chernoff_smallball_log_bound(log_one, 0.0, with_zero), std::domain_error);
  CHECK_THROWS_AS(chernoff_smallball_log_bound(log_one, 1.0, std::vector<double>{}),
                  std::invalid_argument);
}

TEST_CASE("sandwich bound") {
  CHECK(sandwich_upper(1.0, 3.0, 2.0) >= 1.0);
  CHECK(sandwich_upper(0.0, 10.0, 1.0) == Catch::Approx(std::exp(-10.0)).epsilon(1e-15));
  CHECK_THROWS_AS(sandwich_upper(1.5, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(sandwich_upper(0.5, -1.0, 1.0), std::domain_error);

  // Log version agrees with the probability version where both are finite.
  for (double lc : {-0.5, -5.0, -30.0})
    CHECK(sandwich_log_upper(lc, 2.0, 1.5) ==
          Catch::Approx(std::log(sandwich_upper(std::exp(lc), 2.0, 1.5))).epsilon(1e-12));

  // Lattice Monte Carlo stays below the sandwich bound.
  const LatticeDistribution dist(0.5, -1.0, 1.0);
  auto inv_sampler = [&](RngStream& rng) {
    const double u = rng.uniform01();
    int k = 1;
    while (k < 60 && -std::expm1(dist.s() * std::pow(dist.q(), -k)) <= u) ++k;
    return dist.support_point(k);
  };
  RngStream pick(SeedSpec{6, 0});
  for (int rep = 0; rep < 20; ++rep) {
    const double lambda = std::exp(std::log(0.5) + pick.uniform01() * std::log(200.0));
    const double eps = std::exp(std::log(0.01) + pick.uniform01() * std::log(50.0));
    const auto est = mc_laplace(inv_sampler, lambda, 20'000, SeedSpec{7, pick.next_u64() % 1000});
    const double upper = sandwich_upper(dist.cdf(eps), lambda, eps);
    CHECK(est.estimate - 3.0 * est.std_error <= upper);
  }
}
