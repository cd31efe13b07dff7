// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <map>
#include <vector>

#include "catch2/catch_amalgamated.hpp"
#include "tauber/estimators.hpp"
#include "tauber/lattice.hpp"

using namespace tauber;

namespace {
const LatticeDistribution kRef(0.5, -1.0, 1.0);
}

TEST_CASE("lattice parameter validation") {
  CHECK_THROWS_AS(LatticeDistribution(1.0, -1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(LatticeDistribution(0.5, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(LatticeDistribution(0.5, -1.0, 0.0), std::domain_error);
}

TEST_CASE("pmf values and telescoping mass") {
  CHECK(kRef.pmf(1) == Catch::Approx(-std::expm1(-2.0)).epsilon(1e-14));   // 0.864665
  CHECK(kRef.pmf(2) ==
        Catch::Approx(std::exp(-2.0) - std::exp(-4.0)).epsilon(1e-14));    // 0.117019
  CHECK_THROWS_AS(kRef.pmf(0), std::domain_error);

  // Partial sums telescope to 1 - e^{-|s| q^{-beta N}}.
  for (const auto& dist :
       {kRef, LatticeDistribution(0.3, -0.2, 2.0), LatticeDistribution(0.9, -3.0, 0.5)}) {
    double acc = 0.0;
    for (int n = 1; n <= 50; ++n) {
      acc += dist.pmf(n);
      const double expected =
          -std::expm1(dist.s() * std::pow(dist.q(), -dist.beta() * n));
      CHECK(acc == Catch::Approx(expected).margin(1e-13));
    }
    CHECK(acc == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("cdf step structure") {
  CHECK(kRef.cdf(0.5) == 1.0);
  CHECK(kRef.cdf(0.7) == 1.0);
  CHECK(kRef.cdf(0.3) == Catch::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(kRef.cdf(0.2) == Catch::Approx(std::exp(-4.0)).epsilon(1e-15));
  CHECK_THROWS_AS(kRef.cdf(0.0), std::domain_error);

  // Right-continuous steps: constant on [q^n, q^{n-1}), jump exactly at q^n.
  // Compared in log space; the raw cdf underflows around n = 12 here.
  for (int n = 2; n <= 30; ++n) {
    const double eps = kRef.support_point(n);
    CHECK(kRef.index_of(eps) == n);
    CHECK(kRef.log_cdf(eps) == -std::pow(2.0, static_cast<double>(n - 1)));
    CHECK(kRef.log_cdf(eps * 1.5) == kRef.log_cdf(eps / (1.0 - 1e-12)));
    CHECK(kRef.log_cdf(eps * (1.0 - 1e-12)) < kRef.log_cdf(eps));
  }
}

TEST_CASE("rate oscillation between s and q^beta s") {
  // eps^beta log cdf equals q^beta * s exactly at lattice points and returns
  // to s (up to the 1e-9 offset) just above them.
  for (int n = 2; n <= 20; ++n) {
    const double eps = kRef.support_point(n);
    CHECK(eps * kRef.log_cdf(eps) == -0.5);
    const double above = eps * (1.0 - 1e-9);
    CHECK(above * kRef.log_cdf(above) == Catch::Approx(-1.0).margin(1e-8));
  }

  // Same structure for beta != 1.
  const LatticeDistribution d(0.4, -0.7, 1.7);
  const double qb = std::pow(0.4, 1.7);
  for (int n = 2; n <= 12; ++n) {
    const double eps = d.support_point(n);
    CHECK(std::pow(eps, 1.7) * d.log_cdf(eps) == Catch::Approx(-0.7 * qb).epsilon(1e-12));
  }
}

TEST_CASE("sampling matches the pmf and stays on the support") {
  const std::size_t n = 1'000'000;
  const auto res = kRef.sample(n, SeedSpec{42, 0});
  REQUIRE(res.values.size() == n);
  CHECK(res.clamped == 0);

  std::map<int, std::uint64_t> hist;
  for (double v : res.values) {
    const int k = kRef.index_of(v);
    CHECK(v == kRef.support_point(k));  // exact support membership
    ++hist[k];
  }
  const double p1 = kRef.pmf(1);
  const double se = std::sqrt(p1 * (1.0 - p1) / static_cast<double>(n));
  CHECK(static_cast<double>(hist[1]) / n == Catch::Approx(p1).margin(3.0 * se));

  const auto res2 = kRef.sample(n, SeedSpec{42, 0});
  CHECK(res.values == res2.values);
  const auto res3 = kRef.sample(1000, SeedSpec{43, 0});
  CHECK(res3.values != std::vector<double>(res.values.begin(), res.values.begin() + 1000));
}

TEST_CASE("sampling clamps at the support cap and reports it") {
  // Almost all mass of this distribution sits beyond index 400: the
  // cumulative mass of the first 400 points is ~1e-12.
  const LatticeDistribution slow(0.99, -1e-12, 0.01);
  const auto res = slow.sample(200, SeedSpec{5, 0});
  CHECK(res.clamped > 150);
  for (double v : res.values)
    CHECK(v >= slow.support_point(LatticeDistribution::kSupportCap));
}

TEST_CASE("laplace series against direct summation") {
  // Direct truncated sum, independent of the log-space path.
  auto direct = [](const LatticeDistribution& d, double lambda, int terms) {
    double acc = 0.0;
    for (int n = 1; n <= terms; ++n) {
      const double prev = n == 1 ? 0.0 : std::pow(d.q(), -d.beta() * (n - 1));
      const double cur = std::pow(d.q(), -d.beta() * n);
      acc += std::exp(-lambda * std::pow(d.q(), n)) *
             (std::exp(d.s() * prev) - std::exp(d.s() * cur));
    }
    return acc;
  };

  const double oracle = direct(kRef, 1.0, 25);
  CHECK(oracle == Catch::Approx(0.6318).margin(5e-4));
  // Leading terms of the oracle sum: 0.5245, 0.0911, 0.0159.
  CHECK(std::exp(-0.5) * kRef.pmf(1) == Catch::Approx(0.5245).margin(5e-4));
  CHECK(std::exp(-0.25) * kRef.pmf(2) == Catch::Approx(0.0911).margin(5e-4));
  CHECK(std::exp(-0.125) * kRef.pmf(3) == Catch::Approx(0.0159).margin(5e-4));

  CHECK(kRef.log_laplace(1.0) == Catch::Approx(std::log(oracle)).margin(1e-10));
  CHECK(kRef.laplace(1.0) == Catch::Approx(oracle).epsilon(1e-10));

  for (double lambda : {0.0, 0.5, 3.0, 40.0}) {
    const LatticeDistribution d(0.35, -0.4, 1.3);
    CHECK(d.log_laplace(lambda) ==
          Catch::Approx(std::log(direct(d, lambda, 40))).margin(1e-9));
  }

  // Total mass at lambda = 0.
  CHECK(std::abs(kRef.log_laplace(0.0)) < 1e-12);

  // Large-lambda rate lands in the admissible band.
  const double big = kRef.log_laplace(1e6) / std::sqrt(1e6);
  CHECK(big > -1.5 * 1.05);
  CHECK(big < -1.0 * 0.95);

  CHECK_THROWS_AS(kRef.log_laplace(-1.0), std::domain_error);
}

TEST_CASE("theoretic rates") {
  const auto pair = pair_from_alpha(0.5);
  const LatticeRates r = kRef.theoretic_rates(pair);
  CHECK(r.s_lower.value() == -1.0);
  CHECK(r.s_upper.value() == -0.5);
  CHECK(r.r_upper.value() == Catch::Approx(-std::sqrt(2.0)).epsilon(1e-14));
  CHECK(r.r_lower_band.lower.value() == Catch::Approx(-1.5).epsilon(1e-14));
  CHECK(r.r_lower_band.upper.value() == Catch::Approx(-1.0).epsilon(1e-14));

  // q -> 1: the limsup rate collapses onto s.
  const LatticeDistribution near1(0.999999, -1.0, 1.0);
  const auto rates1 = near1.theoretic_rates(pair);
  CHECK(rates1.s_upper.value() / rates1.s_lower.value() == Catch::Approx(1.0).margin(1e-5));

  // Small q widens the band; the upper edge -|s|^{1-alpha} stays put.
  const LatticeDistribution small_q(0.1, -1.0, 1.0);
  const auto rates_q = small_q.theoretic_rates(pair);
  CHECK(rates_q.r_lower_band.lower.value() == Catch::Approx(-1.1).epsilon(1e-14));
  CHECK(rates_q.r_lower_band.upper.value() == Catch::Approx(-1.0).epsilon(1e-14));

  CHECK_THROWS_AS(kRef.theoretic_rates(pair_from_alpha(0.4)), std::domain_error);
}

TEST_CASE("chernoff bound dominates the true cdf") {
  std::vector<double> lambdas;
  for (int i = 0; i < 50; ++i)
    lambdas.push_back(std::exp(std::log(1.0) + i * (std::log(1e6) - 0.0) / 49.0));
  auto log_l = [&](double lambda) { return kRef.log_laplace(lambda); };
  for (int i = 0; i < 40; ++i) {
    const double eps = std::exp(std::log(kRef.support_point(20)) +
                                i * (std::log(0.5) - std::log(kRef.support_point(20))) / 39.0);
    const double bound = chernoff_smallball_log_bound(log_l, eps, lambdas);
    CHECK(kRef.log_cdf(eps) <= bound + 1e-9);
  }
}
