// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: rate conversions, the lattice example, Brownian
// kernel-chain computations, and the `verify` suites.
//
// Exit codes: 0 success, 1 verification failure, 2 usage, 3 numeric domain,
// 4 degenerate Monte Carlo conditioning, 5 I/O.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tauber/brownian.hpp"
#include "tauber/core.hpp"
#include "tauber/estimators.hpp"
#include "tauber/jsonio.hpp"
#include "tauber/lattice.hpp"
#include "tauber/verify.hpp"

namespace {

using namespace tauber;

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_times(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw usage_error("malformed time value '" + item + "'");
    }
  }
  if (out.empty()) throw usage_error("--times requires at least one value");
  return out;
}

BoxFamily parse_boxes_or_usage(const std::string& text) {
  try {
    return parse_box_list(text);
  } catch (const std::exception& e) {
    throw usage_error(std::string("bad --boxes value: ") + e.what());
  }
}

std::vector<double> geometric_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2)
    throw usage_error("grid requires 0 < min < max and at least 2 points");
  std::vector<double> out;
  out.reserve(points);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < points; ++i)
    out.push_back(std::exp(llo + (lhi - llo) * i / (points - 1)));
  out.front() = lo;  // exact endpoints, no exp/log round trip
  out.back() = hi;
  return out;
}

void emit_table(const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows,
                const std::string& format) {
  if (format == "csv") {
    for (std::size_t i = 0; i < header.size(); ++i)
      std::cout << (i ? "," : "") << header[i];
    std::cout << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i)
        std::cout << (i ? "," : "") << format_double(row[i]);
      std::cout << '\n';
    }
    return;
  }
  JsonValue arr = JsonValue::array();
  for (const auto& row : rows) {
    JsonValue obj = JsonValue::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj.set(header[i], row[i]);
    arr.push(std::move(obj));
  }
  std::cout << arr.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

int run_convert(double alpha, std::optional<double> r_in, std::optional<double> s_in) {
  if (r_in.has_value() == s_in.has_value())
    throw usage_error("convert: supply exactly one of --r, --s");
  const ExponentPair pair = pair_from_alpha(alpha);
  RateValue r(0.0), s(0.0);
  std::string direction;
  if (r_in) {
    r = RateValue(*r_in);
    s = s_from_r(r, pair);
    direction = "r_to_s";
  } else {
    s = RateValue(*s_in);
    r = r_from_s(s, pair);
    direction = "s_to_r";
  }
  JsonValue out = JsonValue::object();
  out.set("command", "convert")
      .set("alpha", pair.alpha())
      .set("beta", pair.beta())
      .set("direction", direction)
      .set("r", r.value())
      .set("s", s.value())
      .set("identity_lhs", debruijn_from_laplace(r, pair))
      .set("identity_rhs", debruijn_from_smallball(s, pair))
      .set("identity_residual", identity_residual(r, s, pair));
  std::cout << out.dump(2) << '\n';
  return 0;
}

struct ExampleArgs {
  double q = 0.5;
  double s = -1.0;
  double beta = 1.0;
  std::string emit = "pmf";
  int n = 20;
  double grid_min = 0.0;  // 0 = derive from q
  double grid_max = 0.0;
  int grid_points = 48;
  std::string format;
};

int run_example(const ExampleArgs& args) {
  const LatticeDistribution dist(args.q, args.s, args.beta);
  const ExponentPair pair = pair_from_beta(args.beta);
  const std::string format = args.format.empty() ? "csv" : args.format;

  if (args.emit == "pmf") {
    std::vector<std::vector<double>> rows;
    for (int n = 1; n <= args.n; ++n)
      rows.push_back({static_cast<double>(n), dist.support_point(n), dist.pmf(n),
                      dist.log_pmf(n)});
    emit_table({"n", "epsilon_n", "pmf", "log_pmf"}, rows, format);
    return 0;
  }
  if (args.emit == "cdf") {
    const double lo = args.grid_min > 0.0 ? args.grid_min : dist.support_point(12);
    const double hi = args.grid_max > 0.0 ? args.grid_max : args.q;
    auto grid = geometric_grid(lo, hi, args.grid_points);
    std::vector<std::vector<double>> rows;
    for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
      const double eps = *it;
      const double log_cdf = dist.log_cdf(eps);
      rows.push_back({eps, dist.cdf(eps), log_cdf,
                      std::exp(args.beta * std::log(eps)) * log_cdf});
    }
    emit_table({"epsilon", "cdf", "log_cdf", "eps_beta_log_cdf"}, rows, format);
    return 0;
  }
  if (args.emit == "laplace") {
    const double lo = args.grid_min > 0.0 ? args.grid_min : 1e2;
    const double hi = args.grid_max > 0.0 ? args.grid_max : 1e6;
    auto grid = geometric_grid(lo, hi, args.grid_points);
    std::vector<std::vector<double>> rows;
    for (double lambda : grid) {
      const double ll = dist.log_laplace(lambda);
      rows.push_back({lambda, ll, std::exp(-pair.alpha() * std::log(lambda)) * ll});
    }
    emit_table({"lambda", "log_laplace", "lambda_neg_alpha_log_laplace"}, rows, format);
    return 0;
  }
  if (args.emit == "rates") {
    const LatticeRates rates = dist.theoretic_rates(pair);
    if (format == "csv") {
      emit_table({"s_lower", "s_upper", "r_upper", "r_lower_band_lo", "r_lower_band_hi"},
                 {{rates.s_lower.value(), rates.s_upper.value(), rates.r_upper.value(),
                   rates.r_lower_band.lower.value(), rates.r_lower_band.upper.value()}},
                 format);
    } else {
      JsonValue out = JsonValue::object();
      out.set("command", "example-rates")
          .set("q", args.q)
          .set("s", args.s)
          .set("beta", args.beta)
          .set("alpha", pair.alpha())
          .set("s_lower", rates.s_lower.value())
          .set("s_upper", rates.s_upper.value())
          .set("r_upper", rates.r_upper.value())
          .set("r_lower_band",
               JsonValue::array()
                   .push(rates.r_lower_band.lower.value())
                   .push(rates.r_lower_band.upper.value()));
      std::cout << out.dump(2) << '\n';
    }
    return 0;
  }
  throw usage_error("example: unknown --emit mode '" + args.emit + "'");
}

struct BrownianArgs {
  double gamma = 1.0;
  double t = 1.0;
  double x0 = 0.0;
  std::string times;
  std::string boxes;
  double epsilon = 0.1;
  std::size_t paths = 100000;
  std::size_t steps = 1000;
  SeedSpec seed;
  int threads = 1;
};

int run_brownian_laplace(const BrownianArgs& a) {
  const double closed = log_laplace_exact(a.x0, a.gamma, a.t);
  const TimeGrid grid(a.t, {a.t});
  const double chain = chain_log_functional(a.x0, grid, {Interval::all()}, a.gamma);
  JsonValue out = JsonValue::object();
  out.set("command", "brownian-laplace")
      .set("gamma", a.gamma)
      .set("t", a.t)
      .set("x0", a.x0)
      .set("log_laplace_closed_form", closed)
      .set("log_laplace_chain", chain)
      .set("abs_diff", std::abs(closed - chain));
  std::cout << out.dump(2) << '\n';
  return 0;
}

JsonValue boxes_json(const BoxFamily& boxes) {
  JsonValue arr = JsonValue::array();
  for (const auto& b : boxes)
    arr.push(JsonValue::array().push(b.lo).push(b.hi));
  return arr;
}

int run_brownian_chain(const BrownianArgs& a) {
  const TimeGrid grid(a.t, parse_times(a.times));
  const BoxFamily boxes = parse_boxes_or_usage(a.boxes);
  const double value = chain_log_functional(a.x0, grid, boxes, a.gamma);
  JsonValue out = JsonValue::object();
  out.set("command", "brownian-chain")
      .set("gamma", a.gamma)
      .set("t", a.t)
      .set("x0", a.x0)
      .set("times", [&] {
        JsonValue arr = JsonValue::array();
        for (double t : grid.times) arr.push(t);
        return arr;
      }())
      .set("boxes", boxes_json(boxes))
      .set("chain_log_functional", value)
      .set("per_gamma_rate", value / a.gamma);
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_brownian_rate(const BrownianArgs& a) {
  const TimeGrid grid(a.t, parse_times(a.times));
  const BoxFamily boxes = parse_boxes_or_usage(a.boxes);
  JsonValue out = JsonValue::object();
  out.set("command", "brownian-rate")
      .set("t", a.t)
      .set("x0", a.x0)
      .set("times", [&] {
        JsonValue arr = JsonValue::array();
        for (double t : grid.times) arr.push(t);
        return arr;
      }())
      .set("boxes", boxes_json(boxes))
      .set("bsqr_asymptotic_rate", bsqr_asymptotic_rate(a.x0, grid, boxes))
      .set("condbb_rate", condbb_rate(grid, boxes));
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_brownian_mc(const BrownianArgs& a) {
  PathSampleConfig config;
  config.steps = a.steps;
  config.n_paths = a.paths;
  config.seed = a.seed;
  config.threads = a.threads;
  JsonValue out = JsonValue::object();
  out.set("command", "brownian-mc")
      .set("t", a.t)
      .set("epsilon", a.epsilon)
      .set("paths", a.paths)
      .set("steps", a.steps)
      .set("seed_root", a.seed.root_seed)
      .set("seed_stream", a.seed.stream_index)
      .set("threads", a.threads);
  if (a.times.empty()) {
    // Plain rejection cannot resolve probabilities below ~30/n_paths; the
    // leading-order exponent -t^2/(8 eps) gives the floor before sampling.
    const double expected_hits =
        static_cast<double>(a.paths) * std::exp(-a.t * a.t / (8.0 * a.epsilon));
    if (expected_hits < 30.0)
      throw std::domain_error(
          "epsilon too small for this path count: expected hits ~" +
          std::to_string(expected_hits) + " < 30; raise --paths or --epsilon");
    const SmallBallEstimate est = mc_smallball(a.epsilon, config, a.t);
    out.set("estimator", "smallball")
        .set("p_hat", est.p_hat)
        .set("ci_halfwidth", est.ci_halfwidth)
        .set("hits", est.hits)
        .set("eps_log_p", est.hits == 0 ? kNegInf : a.epsilon * std::log(est.p_hat))
        .set("reliable", est.reliable);
  } else {
    const TimeGrid grid(a.t, parse_times(a.times));
    const BoxFamily boxes = parse_boxes_or_usage(a.boxes);
    const ConditionalEstimate est = mc_conditional(grid, boxes, a.epsilon, config);
    out.set("estimator", "conditional")
        .set("times", [&] {
          JsonValue arr = JsonValue::array();
          for (double t : grid.times) arr.push(t);
          return arr;
        }())
        .set("boxes", boxes_json(boxes))
        .set("p_hat", est.p_hat)
        .set("ci_halfwidth", est.ci_halfwidth)
        .set("conditioning_hits", est.conditioning_hits)
        .set("joint_hits", est.joint_hits)
        .set("eps_log_p",
             est.joint_hits == 0 ? kNegInf : a.epsilon * std::log(est.p_hat))
        .set("reliable", est.reliable);
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_verify_cmd(const std::string& suite, const VerifyOptions& opts,
                   const std::string& out_path) {
  const VerifyReport report = run_verify(suite, opts);
  const std::string text = report_to_json(report).dump(2);
  std::cout << text << '\n';
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    f << text << '\n';
    if (!f) {
      std::cerr << "error: cannot write report to '" << out_path << "'\n";
      return 5;
    }
  }
  return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Exponential Tauberian rate conversions, the sharp lattice example, and "
      "Brownian L2 small-ball computations"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed_root = 0;
  int threads = 1;
  std::string format;
  app.add_option("--seed", seed_root, "Root seed for all random streams")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads for Monte Carlo (results do not depend on this)")
      ->capture_default_str();
  app.add_option("--format", format, "Output format for tables: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  // convert
  auto* convert = app.add_subcommand("convert", "Convert between Laplace and small-ball rates");
  double conv_alpha = 0.5;
  std::optional<double> conv_r, conv_s;
  convert->add_option("--alpha", conv_alpha, "Exponent alpha in (0, 1)")->required();
  auto* opt_r = convert->add_option("--r", conv_r, "Laplace-transform rate (<= 0)");
  convert->add_option("--s", conv_s, "Small-ball rate (<= 0)")->excludes(opt_r);

  // example
  auto* example = app.add_subcommand("example", "The lattice distribution on {q^n}");
  ExampleArgs ex;
  example->add_option("--q", ex.q, "Lattice ratio in (0, 1)")->capture_default_str();
  example->add_option("--s", ex.s, "Small-ball liminf rate (< 0)")->capture_default_str();
  example->add_option("--beta", ex.beta, "Small-ball exponent (> 0)")->capture_default_str();
  example->add_option("--emit", ex.emit, "pmf | cdf | laplace | rates")
      ->check(CLI::IsMember({"pmf", "cdf", "laplace", "rates"}))
      ->capture_default_str();
  example->add_option("--n", ex.n, "Number of pmf rows")->capture_default_str();
  example->add_option("--grid-min", ex.grid_min, "Grid lower end (cdf/laplace)");
  example->add_option("--grid-max", ex.grid_max, "Grid upper end (cdf/laplace)");
  example->add_option("--grid-points", ex.grid_points, "Grid size")->capture_default_str();

  // brownian
  auto* brownian = app.add_subcommand("brownian", "Damped Brownian path functionals");
  brownian->require_subcommand(1);
  BrownianArgs ba;
  auto* b_laplace = brownian->add_subcommand("laplace", "Exact transform vs chain quadrature");
  auto* b_chain = brownian->add_subcommand("chain", "Kernel-chain log functional with boxes");
  auto* b_rate = brownian->add_subcommand("rate", "Asymptotic and conditional rates");
  auto* b_mc = brownian->add_subcommand("mc", "Monte Carlo small-ball / conditional estimates");
  for (auto* sub : {b_laplace, b_chain}) sub->add_option("--gamma", ba.gamma, "Damping")->required();
  for (auto* sub : {b_laplace, b_chain, b_rate, b_mc})
    sub->add_option("--t", ba.t, "Horizon")->capture_default_str();
  for (auto* sub : {b_laplace, b_chain, b_rate})
    sub->add_option("--x0", ba.x0, "Starting point")->capture_default_str();
  for (auto* sub : {b_chain, b_rate})
    sub->add_option("--times", ba.times, "Comma-separated observation times")->required();
  for (auto* sub : {b_chain, b_rate})
    sub->add_option("--boxes", ba.boxes, "Comma-separated boxes a:b, :b, a:, :")->required();
  b_mc->add_option("--times", ba.times, "Observation times (enables the conditional estimator)");
  b_mc->add_option("--boxes", ba.boxes, "Boxes for the conditional estimator");
  b_mc->add_option("--epsilon", ba.epsilon, "Small-ball radius")->required();
  b_mc->add_option("--paths", ba.paths, "Sampled paths")->capture_default_str();
  b_mc->add_option("--steps", ba.steps, "Time steps per path")->capture_default_str();

  // verify
  auto* verify = app.add_subcommand("verify", "Run the numerical verification suites");
  std::string suite = "all";
  std::string out_path;
  VerifyOptions vopts;
  verify->add_option("--suite", suite, "core | lattice | brownian | all")
      ->check(CLI::IsMember({"core", "lattice", "brownian", "all"}))
      ->capture_default_str();
  verify->add_option("--out", out_path, "Write the JSON report to this file");
  verify->add_option("--lattice-samples", vopts.lattice_samples)->capture_default_str();
  verify->add_option("--transform-paths", vopts.transform_paths)->capture_default_str();
  verify->add_option("--transform-steps", vopts.transform_steps)->capture_default_str();
  verify->add_option("--smallball-paths", vopts.smallball_paths)->capture_default_str();
  verify->add_option("--smallball-steps", vopts.smallball_steps)->capture_default_str();
  verify->add_option("--smallball-epsilon", vopts.smallball_epsilon)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ba.seed = SeedSpec{seed_root, 0};
    ba.threads = threads;
    vopts.seed = SeedSpec{seed_root, 0};
    vopts.threads = threads;
    ex.format = format;

    if (*convert) return run_convert(conv_alpha, conv_r, conv_s);
    if (*example) return run_example(ex);
    if (*brownian) {
      if (*b_laplace) return run_brownian_laplace(ba);
      if (*b_chain) return run_brownian_chain(ba);
      if (*b_rate) return run_brownian_rate(ba);
      if (*b_mc) {
        if (ba.times.empty() != ba.boxes.empty())
          throw usage_error("brownian mc: --times and --boxes go together");
        return run_brownian_mc(ba);
      }
    }
    if (*verify) return run_verify_cmd(suite, vopts, out_path);
    throw usage_error("no subcommand given");
  } catch (const usage_error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const conditioning_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
