// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: runs every numbered criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion.  Exits nonzero if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tauber/verify.hpp"

using namespace tauber;

namespace {

int g_failures = 0;

std::string brief(const CheckResult& c) {
  char buf[256];
  if (c.pass) {
    std::snprintf(buf, sizeof buf, "%s ok", c.name.c_str());
  } else {
    std::snprintf(buf, sizeof buf, "%s FAILED (expected %.9g, observed %.9g, tol %.3g)",
                  c.name.c_str(), c.expected, c.observed, c.tolerance);
  }
  return buf;
}

void report(int id, const std::string& title, double budget_s,
            const std::function<std::vector<CheckResult>()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<CheckResult> checks;
  std::string error;
  try {
    checks = body();
  } catch (const std::exception& e) {
    error = e.what();
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  bool pass = error.empty();
  for (const auto& c : checks) pass = pass && c.pass;
  const bool in_budget = dt <= budget_s;
  pass = pass && in_budget;

  std::string detail;
  if (!error.empty()) {
    detail = "exception: " + error;
  } else {
    for (std::size_t i = 0; i < checks.size(); ++i)
      detail += (i ? "; " : "") + brief(checks[i]);
  }
  if (!in_budget) detail += "; RUNTIME over budget";
  std::printf("criterion-%02d %s (%.2fs of %gs) %s: %s\n", id, pass ? "PASS" : "FAIL", dt,
              budget_s, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

struct CliRun {
  int exit_code = -1;
  std::string report_text;
};

CliRun run_verify_cli(const std::string& out_path) {
  const std::string cmd = std::string(TAUBER_CLI_PATH) + " verify --suite all --seed 42 --out " +
                          out_path + " > /dev/null 2>&1";
  CliRun run;
  const int status = std::system(cmd.c_str());
  run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream f(out_path);
  std::stringstream ss;
  ss << f.rdbuf();
  run.report_text = ss.str();
  return run;
}

}  // namespace

int main() {
  VerifyOptions full;
  full.seed = SeedSpec{42, 0};
  full.threads = 1;
  full.lattice_samples = 1'000'000;
  full.transform_paths = 200'000;
  full.transform_steps = 2'000;
  full.smallball_paths = 1'000'000;
  full.smallball_steps = 1'000;
  full.smallball_epsilon = 0.02;

  report(1, "De Bruijn identity and round trip on 200 random pairs", 1.0,
         [&] { return checks_debruijn_identity(full.seed); });

  report(2, "alpha = 1/2 special case s = -r^2/4", 1.0, [&] { return checks_alpha_half(); });

  report(3, "lower-limit band arithmetic and inversion", 1.0,
         [&] { return checks_rate_bands(); });

  report(4, "lattice rate oscillation and empirical cdf", 30.0,
         [&] { return checks_lattice_exactness(full.seed, full.lattice_samples); });

  report(5, "lattice Laplace window rates", 10.0, [&] { return checks_lattice_window(); });

  report(6, "Chernoff and sandwich dominance", 5.0,
         [&] { return checks_lattice_dominance(); });

  report(7, "kernel chain vs closed-form transform, Chapman-Kolmogorov", 10.0,
         [&] { return checks_chain_transform(); });

  report(8, "Monte Carlo transform vs 1/sqrt(cosh gamma)", 120.0, [&] {
    return checks_mc_transform(full.seed, full.transform_paths, full.transform_steps,
                               full.threads);
  });

  report(9, "constrained-chain scaling limit", 30.0, [&] { return checks_chain_scaling_limit(); });

  // Stated tolerance 15%: see the project notes on the finite-eps prefactor
  // correction, which is 18.9% at eps = 0.02; the criterion is expected to
  // fail for a correct implementation and is reported as measured.
  report(10, "small-ball exponent of int_0^1 B^2", 180.0, [&] {
    return checks_smallball_exponent(full.seed, full.smallball_paths, full.smallball_steps,
                                     full.smallball_epsilon, full.threads, 0.15);
  });

  report(11, "rate-function consistency and ess-inf oracle", 10.0,
         [&] { return checks_rate_consistency(full.seed); });

  report(12, "verify CLI determinism", 300.0, [&] {
    std::vector<CheckResult> out;
    const CliRun a = run_verify_cli("/tmp/tauber_acceptance_report_a.json");
    const CliRun b = run_verify_cli("/tmp/tauber_acceptance_report_b.json");
    auto ja = nlohmann::json::parse(a.report_text, nullptr, false);
    auto jb = nlohmann::json::parse(b.report_text, nullptr, false);
    std::uint64_t mismatch = 1;
    if (!ja.is_discarded() && !jb.is_discarded()) {
      ja.erase("wall_time_seconds");
      jb.erase("wall_time_seconds");
      mismatch = ja != jb ? 1 : 0;
    }
    out.push_back(check_zero_count("verify-report-identical-modulo-walltime", mismatch));
    out.push_back(check_close("verify-exit-code-first", 0.0, a.exit_code, 0.0));
    out.push_back(check_close("verify-exit-code-second", 0.0, b.exit_code, 0.0));
    return out;
  });

  std::printf("acceptance: %d of 12 criteria passed\n", 12 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
