// Command-line front end: combine estimates, sweep risk functionals, check
// minimax claims and run finite-sample simulations.
//
// Exit codes: 0 success, 2 usage/validation, 3 I/O, 4 simulation quality.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msecomb/combine.hpp"
#include "msecomb/expect.hpp"
#include "msecomb/io.hpp"
#include "msecomb/risk.hpp"
#include "msecomb/sim.hpp"

namespace {

using namespace msecomb;

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitQuality = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EngineOpts {
  std::string method = "gauss_hermite";
  std::size_t nodes = 0;  // 0: 150 nodes for quadrature, 10^6 draws for MC
  std::uint64_t seed = 0;
  unsigned halton_base = 2;
  std::uint64_t halton_skip = 0;

  void attach(CLI::App* app) {
    app->add_option("--method", method, "gauss_hermite | halton_mc | pseudo_mc");
    app->add_option("--nodes", nodes, "quadrature nodes or Monte-Carlo draws");
    app->add_option("--engine-seed", seed, "seed for pseudo_mc");
    app->add_option("--halton-base", halton_base);
    app->add_option("--halton-skip", halton_skip);
  }

  EngineConfig config() const {
    EngineConfig c;
    c.method = parse_method(method);
    c.nodes = nodes != 0 ? nodes : (c.method == Method::gauss_hermite ? 150 : 1000000);
    c.seed = seed;
    c.halton_base = halton_base;
    c.halton_skip = halton_skip;
    return c;
  }
};

struct GridOpts {
  double lo = 0.0;
  double hi = 10.0;
  double step = 0.0;  // 0: command default

  void attach(CLI::App* app, const std::string& prefix) {
    app->add_option("--" + prefix + "-min", lo);
    app->add_option("--" + prefix + "-max", hi);
    app->add_option("--" + prefix + "-step", step);
  }

  std::vector<double> grid(double default_step) const {
    return uniform_grid(lo, hi, step > 0.0 ? step : default_step);
  }
};

struct DgpOpts {
  std::string kind = "iv";
  std::size_t n = 2000;
  double noise_sd = 1.0;
  double beta0 = 1.0;
  double endo = 0.0;
  double instr_strength = 1.0;
  std::vector<double> effects = StratifiedDgp{}.effects;
  std::vector<double> probs = StratifiedDgp{}.probs;
  double effect = 1.0;
  std::string cef_shape = "linear";
  double slope = 1.0;
  double curvature = 0.0;
  double cutoff = 0.0;
  double bandwidth_const = 1.0;
  double bandwidth_exponent = 0.2;

  void attach(CLI::App* app) {
    app->add_option("--dgp", kind, "iv | stratified | two-rate");
    app->add_option("--n", n, "sample size");
    app->add_option("--noise-sd", noise_sd);
    app->add_option("--beta0", beta0, "iv: true coefficient");
    app->add_option("--endo", endo, "iv: corr(x, u)");
    app->add_option("--instr-strength", instr_strength, "iv: first-stage coefficient");
    app->add_option("--effects", effects, "stratified: per-stratum effects")->delimiter(',');
    app->add_option("--probs", probs, "stratified: per-stratum treatment probabilities")->delimiter(',');
    app->add_option("--effect", effect, "two-rate: effect at the cutoff");
    app->add_option("--cef-shape", cef_shape, "two-rate: linear | curved");
    app->add_option("--slope", slope);
    app->add_option("--curvature", curvature);
    app->add_option("--cutoff", cutoff);
    app->add_option("--bandwidth-const", bandwidth_const);
    app->add_option("--bandwidth-exponent", bandwidth_exponent);
  }

  DgpSpec spec() const {
    DgpSpec out;
    if (kind == "iv") {
      out = IvDgp{n, beta0, endo, instr_strength, noise_sd};
    } else if (kind == "stratified") {
      out = StratifiedDgp{n, effects, probs, noise_sd};
    } else if (kind == "two-rate") {
      if (cef_shape != "linear" && cef_shape != "curved") {
        throw UsageError("cef-shape must be linear or curved");
      }
      TwoRateDgp d;
      d.n = n;
      d.effect = effect;
      d.shape = cef_shape == "curved" ? CefShape::curved : CefShape::linear;
      d.slope = slope;
      d.curvature = curvature;
      d.cutoff = cutoff;
      d.bandwidth_const = bandwidth_const;
      d.bandwidth_exponent = bandwidth_exponent;
      d.noise_sd = noise_sd;
      out = d;
    } else {
      throw UsageError("unknown dgp '" + kind + "' (iv | stratified | two-rate)");
    }
    validate(out);
    return out;
  }
};

void check_format(const std::string& format) {
  if (format != "csv" && format != "json") throw UsageError("format must be csv or json");
}

// Writes `content` to `path` ("-" is stdout).
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

// ---- combine ----

struct CombineOpts {
  std::optional<double> beta_c, beta_e, var_c, var_e, cov;
  double lambda = 0.0;
  std::string format = "csv";
};

int run_combine(const CombineOpts& o) {
  check_format(o.format);
  if (!o.beta_c) throw UsageError("beta-c required");
  if (!o.beta_e) throw UsageError("beta-e required");
  if (!o.var_c) throw UsageError("var-c required");
  if (!o.var_e) throw UsageError("var-e required");
  if (!(o.lambda >= 0.0)) throw UsageError("lambda must be >= 0");
  const EstimatorInput in{*o.beta_c, *o.beta_e, *o.var_c, *o.var_e, o.cov.value_or(*o.var_e)};
  in.validate();
  const CombinedEstimate est = o.lambda > 0.0 ? combine_pretest(in, o.lambda) : combine(in);
  double hausman;
  try {
    hausman = hausman_statistic(in);
  } catch (const DegenerateError&) {
    hausman = std::numeric_limits<double>::infinity();
  }
  const double alpha = pretest_level(o.lambda);
  const bool flagged = covariance_ordering_violated(in);

  std::ostringstream os;
  if (o.format == "json") {
    json j = est;
    j["hausman"] = std::isfinite(hausman) ? json(hausman) : json("inf");
    j["lambda"] = o.lambda;
    j["alpha"] = alpha;
    j["ordering_violated"] = flagged;
    j["input"] = in;
    os << j.dump(2) << '\n';
  } else {
    os << "beta,weight,est_mse,hausman,lambda,alpha,ordering_violated\n"
       << format_fixed12(est.beta) << ',' << format_fixed12(est.weight) << ','
       << format_fixed12(est.est_mse) << ',' << format_fixed12(hausman) << ','
       << format_fixed12(o.lambda) << ',' << format_fixed12(alpha) << ',' << (flagged ? 1 : 0)
       << '\n';
  }
  emit("-", os.str());
  return 0;
}

// ---- risk-curve ----

struct CurveOpts {
  std::string functional = "delta";
  double lambda = 0.0;
  double mu_sd = 0.0;
  GridOpts grid;
  EngineOpts engine;
  std::string out = "-";
  std::string format = "csv";
};

int run_risk_curve(const CurveOpts& o) {
  check_format(o.format);
  Functional f;
  std::string param;
  double param_value = 0.0;
  double default_step = 0.01;
  if (o.functional == "delta") {
    f = Functional::plain();
  } else if (o.functional == "delta-pretest") {
    if (!(o.lambda >= 0.0)) throw UsageError("lambda must be >= 0");
    f = Functional::pretest(o.lambda);
    param = "lambda";
    param_value = o.lambda;
  } else if (o.functional == "lambda") {
    f = Functional::mixed(o.mu_sd);
    param = "mu_sd";
    param_value = o.mu_sd;
    default_step = 0.1;
  } else {
    throw UsageError("unknown functional '" + o.functional + "' (delta | delta-pretest | lambda)");
  }
  const EngineConfig cfg = o.engine.config();
  const ExpectationEngine engine(cfg);
  const auto grid = o.grid.grid(default_step);
  const RiskCurve curve = sweep(f, grid, engine);

  std::ostringstream os;
  if (o.format == "json") {
    json j = {{"functional", o.functional}, {"engine", cfg}, {"curve", curve}};
    if (!param.empty()) j[param] = param_value;
    os << j.dump(2) << '\n';
  } else {
    write_curve_csv(os, curve, param, param_value);
  }
  emit(o.out, os.str());
  return 0;
}

// ---- minimax ----

struct MinimaxOpts {
  std::string claim = "thm1.3";
  double lambda = 1.0;
  double mu_sd = 0.0;
  GridOpts grid;
  EngineOpts engine;
  std::string out = "-";
};

int run_minimax(const MinimaxOpts& o) {
  const EngineConfig cfg = o.engine.config();
  std::vector<double> grid;
  ClaimVerdict verdict;
  if (o.claim == "thm1.3") {
    grid = o.grid.grid(0.01);
    verdict = verify_equal_rates(grid, ExpectationEngine(cfg));
  } else if (o.claim == "prop1.3") {
    if (!(o.lambda > 0.0)) throw UsageError("prop1.3 needs lambda > 0");
    grid = o.grid.grid(0.05);
    verdict = verify_pretest(o.lambda, grid, ExpectationEngine(cfg));
  } else if (o.claim == "thm2.3") {
    grid = o.grid.grid(0.1);
    verdict = verify_mixed_rates(o.mu_sd, grid, ExpectationEngine(cfg));
  } else {
    throw UsageError("unknown claim '" + o.claim + "' (thm1.3 | prop1.3 | thm2.3)");
  }
  emit(o.out, claim_to_json(verdict, cfg, grid).dump(2) + "\n");
  return 0;
}

// ---- simulate / local-sweep ----

struct SimOpts {
  DgpOpts dgp;
  std::vector<double> lambdas;
  std::size_t reps = 2000;
  std::uint64_t seed = 20240601;
  std::string csv;
  std::string json_path;
};

int run_simulate(const SimOpts& o) {
  if (o.reps < 2) throw UsageError("reps must be >= 2 (got " + std::to_string(o.reps) + ")");
  const DgpSpec spec = o.dgp.spec();
  const MseTable table = run_monte_carlo(spec, o.lambdas, o.reps, o.seed);
  std::ostringstream csv;
  write_mse_csv(csv, table);
  if (o.csv.empty() && o.json_path.empty()) emit("-", csv.str());
  if (!o.csv.empty()) emit(o.csv, csv.str());
  if (!o.json_path.empty()) emit(o.json_path, json(table).dump(2) + "\n");
  return 0;
}

struct LocalOpts {
  DgpOpts dgp;
  GridOpts h;
  std::size_t reps = 1000;
  std::uint64_t seed = 20240601;
  EngineOpts engine;
  std::string csv;
  std::string json_path;
};

int run_local_sweep(const LocalOpts& o) {
  if (o.reps < 2) throw UsageError("reps must be >= 2");
  const DgpSpec spec = o.dgp.spec();
  const EngineConfig cfg = o.engine.config();
  const auto hs = o.h.grid(1.0);
  const LocalSweepResult res = local_alternative_sweep(spec, hs, o.reps, o.seed, ExpectationEngine(cfg));
  std::ostringstream csv;
  write_local_sweep_csv(csv, res);
  if (o.csv.empty() && o.json_path.empty()) emit("-", csv.str());
  if (!o.csv.empty()) emit(o.csv, csv.str());
  if (!o.json_path.empty()) {
    json j = {{"dgp", spec}, {"R", o.reps}, {"seed", o.seed}, {"engine", cfg}, {"points", res.points}};
    emit(o.json_path, j.dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empirical-MSE combination of a consistent and an efficient estimator"};
  app.set_config("--config", "", "INI file with one [section] per command; flags override it");
  app.require_subcommand(1, 1);

  CombineOpts combine_opts;
  auto* combine_cmd = app.add_subcommand("combine", "combine two estimates");
  combine_cmd->add_option("--beta-c", combine_opts.beta_c, "consistent estimate");
  combine_cmd->add_option("--beta-e", combine_opts.beta_e, "efficient estimate");
  combine_cmd->add_option("--var-c", combine_opts.var_c, "variance of the consistent estimate");
  combine_cmd->add_option("--var-e", combine_opts.var_e, "variance of the efficient estimate");
  combine_cmd->add_option("--cov", combine_opts.cov, "covariance (defaults to var-e)");
  combine_cmd->add_option("--lambda", combine_opts.lambda, "pre-test critical value");
  combine_cmd->add_option("--format", combine_opts.format, "csv | json");

  CurveOpts curve_opts;
  auto* curve_cmd = app.add_subcommand("risk-curve", "evaluate a risk functional on a grid");
  curve_cmd->add_option("--functional", curve_opts.functional, "delta | delta-pretest | lambda");
  curve_cmd->add_option("--lambda", curve_opts.lambda);
  curve_cmd->add_option("--mu-sd", curve_opts.mu_sd);
  curve_opts.grid.attach(curve_cmd, "g");
  curve_opts.engine.attach(curve_cmd);
  curve_cmd->add_option("--out", curve_opts.out, "output path, - for stdout");
  curve_cmd->add_option("--format", curve_opts.format, "csv | json");

  MinimaxOpts minimax_opts;
  auto* minimax_cmd = app.add_subcommand("minimax", "check a minimax-regret dominance claim");
  minimax_cmd->add_option("--claim", minimax_opts.claim, "thm1.3 | prop1.3 | thm2.3");
  minimax_cmd->add_option("--lambda", minimax_opts.lambda);
  minimax_cmd->add_option("--mu-sd", minimax_opts.mu_sd);
  minimax_opts.grid.attach(minimax_cmd, "g");
  minimax_opts.engine.attach(minimax_cmd);
  minimax_cmd->add_option("--out", minimax_opts.out);

  SimOpts sim_opts;
  auto* sim_cmd = app.add_subcommand("simulate", "finite-sample MSE table");
  sim_opts.dgp.attach(sim_cmd);
  sim_cmd->add_option("--lambdas", sim_opts.lambdas, "pre-test critical values")->delimiter(',');
  sim_cmd->add_option("--reps", sim_opts.reps, "replications");
  sim_cmd->add_option("--seed", sim_opts.seed);
  sim_cmd->add_option("--csv", sim_opts.csv, "CSV output path");
  sim_cmd->add_option("--json", sim_opts.json_path, "JSON output path");

  LocalOpts local_opts;
  auto* local_cmd = app.add_subcommand("local-sweep", "empirical vs asymptotic risk under local alternatives");
  local_opts.dgp.attach(local_cmd);
  local_opts.h.attach(local_cmd, "h");
  local_opts.engine.attach(local_cmd);
  local_cmd->add_option("--reps", local_opts.reps);
  local_cmd->add_option("--seed", local_opts.seed);
  local_cmd->add_option("--csv", local_opts.csv);
  local_cmd->add_option("--json", local_opts.json_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*combine_cmd) return run_combine(combine_opts);
    if (*curve_cmd) return run_risk_curve(curve_opts);
    if (*minimax_cmd) return run_minimax(minimax_opts);
    if (*sim_cmd) return run_simulate(sim_opts);
    if (*local_cmd) return run_local_sweep(local_opts);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const SimulationQualityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitQuality;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
