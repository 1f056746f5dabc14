#include "msecomb/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "msecomb/parallel.hpp"

namespace msecomb {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Portable draws: uniform from the top 53 bits of mt19937_64, normal by inversion.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  double normal() { return inv_norm_cdf(uniform()); }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Intercept and its HC1 variance from a simple regression of y on (1, x) over
// the selected rows.
struct InterceptFit {
  double intercept = 0.0;
  double variance = 0.0;
};

InterceptFit fit_intercept(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<std::size_t>& rows, const char* what) {
  const std::size_t m = rows.size();
  if (m < 3) throw EstimationError(std::string(what) + ": fewer than 3 observations in window");
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i : rows) {
    xbar += x[i];
    ybar += y[i];
  }
  xbar /= static_cast<double>(m);
  ybar /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i : rows) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxy += (x[i] - xbar) * (y[i] - ybar);
  }
  if (!(sxx > 0.0)) throw EstimationError(std::string(what) + ": no variation in running variable");
  const double slope = sxy / sxx;
  const double intercept = ybar - slope * xbar;
  // Sandwich for (X'X)^-1 X' diag(e^2) X (X'X)^-1, element [0,0].
  // (X'X)^-1 first row is (sum x^2, -sum x) / (m sxx).
  double sum_x2 = 0.0, sum_x = 0.0;
  for (std::size_t i : rows) {
    sum_x2 += x[i] * x[i];
    sum_x += x[i];
  }
  const double det = static_cast<double>(m) * sxx;
  double meat = 0.0;
  for (std::size_t i : rows) {
    const double e = y[i] - intercept - slope * x[i];
    const double a = (sum_x2 - sum_x * x[i]) / det;
    meat += a * a * e * e;
  }
  const double dof = static_cast<double>(m) / static_cast<double>(m - 2);
  return {intercept, dof * meat};
}

EstimatorInput estimate_iv(const Dataset& d) {
  const std::size_t n = d.y.size();
  if (n < 3 || d.x.size() != n || d.z.size() != n) throw EstimationError("IV dataset malformed");
  const double xbar = mean_of(d.x), ybar = mean_of(d.y), zbar = mean_of(d.z);
  double sxx = 0.0, sxy = 0.0, szx = 0.0, szy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xt = d.x[i] - xbar, yt = d.y[i] - ybar, zt = d.z[i] - zbar;
    sxx += xt * xt;
    sxy += xt * yt;
    szx += zt * xt;
    szy += zt * yt;
  }
  if (!(sxx > 0.0)) throw EstimationError("OLS: regressor has no variation (rank deficient)");
  if (szx == 0.0) throw EstimationError("2SLS: zero first stage (instrument uncorrelated with regressor)");
  const double b_ols = sxy / sxx;
  const double b_iv = szy / szx;
  double meat_ols = 0.0, meat_iv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xt = d.x[i] - xbar, yt = d.y[i] - ybar, zt = d.z[i] - zbar;
    const double e_ols = yt - b_ols * xt;
    const double e_iv = yt - b_iv * xt;
    meat_ols += xt * xt * e_ols * e_ols;
    meat_iv += zt * zt * e_iv * e_iv;
  }
  const double dof = static_cast<double>(n) / static_cast<double>(n - 2);
  const double var_ols = dof * meat_ols / (sxx * sxx);
  const double var_iv = dof * meat_iv / (szx * szx);
  return EstimatorInput::with_default_cov(b_iv, b_ols, var_iv, var_ols);
}

EstimatorInput estimate_stratified(const Dataset& d, const StratifiedDgp& spec) {
  const std::size_t n = d.y.size();
  const std::size_t k_count = spec.strata_count();
  std::vector<double> n1(k_count), n0(k_count), s1(k_count), s0(k_count), ss1(k_count), ss0(k_count);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = d.stratum[i];
    if (d.x[i] > 0.5) {
      n1[k] += 1;
      s1[k] += d.y[i];
    } else {
      n0[k] += 1;
      s0[k] += d.y[i];
    }
  }
  for (std::size_t k = 0; k < k_count; ++k) {
    if (n1[k] < 2 || n0[k] < 2) {
      throw EstimationError("stratum " + std::to_string(k) + " has fewer than 2 treated or control units");
    }
  }
  std::vector<double> m1(k_count), m0(k_count), dbar(k_count), ybar(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    m1[k] = s1[k] / n1[k];
    m0[k] = s0[k] / n0[k];
    dbar[k] = n1[k] / (n1[k] + n0[k]);
    ybar[k] = (s1[k] + s0[k]) / (n1[k] + n0[k]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = d.stratum[i];
    const double r = d.x[i] > 0.5 ? d.y[i] - m1[k] : d.y[i] - m0[k];
    (d.x[i] > 0.5 ? ss1 : ss0)[k] += r * r;
  }
  double beta_c = 0.0, var_c = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    const double w = (n1[k] + n0[k]) / static_cast<double>(n);
    beta_c += w * (m1[k] - m0[k]);
    var_c += w * w * (ss1[k] / (n1[k] - 1) / n1[k] + ss0[k] / (n0[k] - 1) / n0[k]);
  }
  // Strata fixed effects via within-stratum demeaning.
  double sdd = 0.0, sdy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = d.stratum[i];
    const double dt = d.x[i] - dbar[k];
    sdd += dt * dt;
    sdy += dt * (d.y[i] - ybar[k]);
  }
  const double beta_e = sdy / sdd;
  double meat = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = d.stratum[i];
    const double dt = d.x[i] - dbar[k];
    const double e = d.y[i] - ybar[k] - beta_e * dt;
    meat += dt * dt * e * e;
  }
  const double dof = static_cast<double>(n) / static_cast<double>(n - k_count - 1);
  const double var_e = dof * meat / (sdd * sdd);
  return EstimatorInput::with_default_cov(beta_c, beta_e, var_c, var_e);
}

EstimatorInput estimate_two_rate(const Dataset& d, const TwoRateDgp& spec) {
  const std::size_t n = d.y.size();
  const double b = spec.bandwidth();
  std::vector<double> xc(n);
  std::vector<std::size_t> left, right, left_local, right_local;
  for (std::size_t i = 0; i < n; ++i) {
    xc[i] = d.x[i] - spec.cutoff;
    const bool treated = xc[i] >= 0.0;
    (treated ? right : left).push_back(i);
    if (std::abs(xc[i]) < b) (treated ? right_local : left_local).push_back(i);
  }
  const InterceptFit gl = fit_intercept(xc, d.y, left, "global fit left of cutoff");
  const InterceptFit gr = fit_intercept(xc, d.y, right, "global fit right of cutoff");
  const InterceptFit ll = fit_intercept(xc, d.y, left_local, "local fit left of cutoff");
  const InterceptFit lr = fit_intercept(xc, d.y, right_local, "local fit right of cutoff");
  return EstimatorInput::with_default_cov(lr.intercept - ll.intercept, gr.intercept - gl.intercept,
                                          lr.variance + ll.variance, gr.variance + gl.variance);
}

// Projection of t^2 on (1, t) for t ~ Uniform(a, b), evaluated at t = c.
double quadratic_fit_at(double a, double b, double c) {
  const double m = 0.5 * (a + b);
  return m * m + (b - a) * (b - a) / 12.0 + 2.0 * m * (c - m);
}

// Near-identical estimates with vanishing variance, e.g. noiseless data.
bool numerically_degenerate(const EstimatorInput& in) {
  const double scale = std::max(1.0, std::abs(in.beta_c));
  return std::abs(in.beta_e - in.beta_c) <= 1e-12 * scale &&
         std::abs(in.var_e + in.var_c - 2.0 * in.cov_ce) <= 1e-24 * scale * scale;
}

std::string format_short(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

// ---- IvDgp ----

double IvDgp::regressor_sd() const { return std::sqrt(instr_strength * instr_strength + 1.0); }

double IvDgp::max_endo() const { return 1.0 / regressor_sd(); }

void IvDgp::validate() const {
  if (n < 20) throw std::invalid_argument("IvDgp: n must be >= 20");
  if (!std::isfinite(beta0) || !std::isfinite(endo) || !std::isfinite(instr_strength) ||
      !std::isfinite(noise_sd)) {
    throw std::invalid_argument("IvDgp: parameters must be finite");
  }
  if (!(std::abs(endo) < 1.0)) throw std::invalid_argument("IvDgp: |endo| must be < 1");
  if (instr_strength == 0.0) throw std::invalid_argument("IvDgp: instr_strength must be nonzero");
  if (noise_sd < 0.0) throw std::invalid_argument("IvDgp: noise_sd must be >= 0");
  if (!(std::abs(endo) < max_endo())) {
    throw std::invalid_argument("IvDgp: |endo| must be < 1/sqrt(1 + instr_strength^2) = " +
                                format_short(max_endo()));
  }
}

double IvDgp::plim_efficient() const { return beta0 + endo * noise_sd / regressor_sd(); }

// ---- StratifiedDgp ----

void StratifiedDgp::validate() const {
  if (n < 20) throw std::invalid_argument("StratifiedDgp: n must be >= 20");
  if (effects.empty()) throw std::invalid_argument("StratifiedDgp: need at least one stratum");
  if (probs.size() != effects.size()) {
    throw std::invalid_argument("StratifiedDgp: effects and probs must have the same length");
  }
  for (double p : probs) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("StratifiedDgp: probabilities must be in (0, 1)");
  }
  for (double e : effects) {
    if (!std::isfinite(e)) throw std::invalid_argument("StratifiedDgp: effects must be finite");
  }
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
    throw std::invalid_argument("StratifiedDgp: noise_sd must be finite and >= 0");
  }
  if (n < 4 * effects.size()) throw std::invalid_argument("StratifiedDgp: too few units per stratum");
}

double StratifiedDgp::stratum_share(std::size_t k) const {
  const std::size_t kc = strata_count();
  const std::size_t count = n / kc + (k < n % kc ? 1 : 0);
  return static_cast<double>(count) / static_cast<double>(n);
}

double StratifiedDgp::ate() const {
  double a = 0.0;
  for (std::size_t k = 0; k < strata_count(); ++k) a += stratum_share(k) * effects[k];
  return a;
}

double StratifiedDgp::plim_efficient() const {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < strata_count(); ++k) {
    const double v = stratum_share(k) * probs[k] * (1.0 - probs[k]);
    num += v * effects[k];
    den += v;
  }
  return num / den;
}

// ---- TwoRateDgp ----

void TwoRateDgp::validate() const {
  if (n < 20) throw std::invalid_argument("TwoRateDgp: n must be >= 20");
  if (!(bandwidth_exponent > 0.0 && bandwidth_exponent < 0.5)) {
    throw std::invalid_argument("TwoRateDgp: bandwidth_exponent must be in (0, 1/2)");
  }
  if (!(bandwidth_const > 0.0)) throw std::invalid_argument("TwoRateDgp: bandwidth_const must be > 0");
  if (!(cutoff > -1.0 && cutoff < 1.0)) throw std::invalid_argument("TwoRateDgp: cutoff must be in (-1, 1)");
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("TwoRateDgp: noise_sd must be >= 0");
  if (!std::isfinite(effect) || !std::isfinite(slope) || !std::isfinite(curvature)) {
    throw std::invalid_argument("TwoRateDgp: parameters must be finite");
  }
}

double TwoRateDgp::bandwidth() const {
  return bandwidth_const * std::pow(static_cast<double>(n), -bandwidth_exponent);
}

double TwoRateDgp::rate() const {
  return std::pow(static_cast<double>(n), 0.5 * (1.0 - bandwidth_exponent));
}

double TwoRateDgp::bias_per_curvature() const {
  // Curvature enters as (x - cutoff)^2 on the treated side only.
  return quadratic_fit_at(0.0, 1.0 - cutoff, 0.0);
}

double TwoRateDgp::plim_efficient() const { return effect + effective_curvature() * bias_per_curvature(); }

// ---- DgpSpec helpers ----

std::string dgp_kind(const DgpSpec& dgp) {
  return std::visit(Overloaded{[](const IvDgp&) { return std::string("iv"); },
                               [](const StratifiedDgp&) { return std::string("stratified"); },
                               [](const TwoRateDgp&) { return std::string("two-rate"); }},
                    dgp);
}

void validate(const DgpSpec& dgp) {
  std::visit([](const auto& d) { d.validate(); }, dgp);
}

std::size_t sample_size(const DgpSpec& dgp) {
  return std::visit([](const auto& d) { return d.n; }, dgp);
}

double true_value(const DgpSpec& dgp) {
  return std::visit(Overloaded{[](const IvDgp& d) { return d.beta0; },
                               [](const StratifiedDgp& d) { return d.ate(); },
                               [](const TwoRateDgp& d) { return d.effect; }},
                    dgp);
}

double plim_efficient(const DgpSpec& dgp) {
  return std::visit([](const auto& d) { return d.plim_efficient(); }, dgp);
}

double consistent_rate(const DgpSpec& dgp) {
  return std::visit(Overloaded{[](const TwoRateDgp& d) { return d.rate(); },
                               [](const auto& d) { return std::sqrt(static_cast<double>(d.n)); }},
                    dgp);
}

DgpSpec with_local_violation(const DgpSpec& dgp, double h) {
  validate(dgp);
  const double target_bias = h / consistent_rate(dgp);
  DgpSpec out = std::visit(
      Overloaded{
          [&](IvDgp d) -> DgpSpec {
            if (d.noise_sd == 0.0) throw std::invalid_argument("local violation needs noise_sd > 0");
            d.endo = target_bias * d.regressor_sd() / d.noise_sd;
            return d;
          },
          [&](StratifiedDgp d) -> DgpSpec {
            const double base = d.plim_efficient() - d.ate();
            if (base == 0.0) {
              throw std::invalid_argument(
                  "local violation needs heterogeneous template effects with nonzero bias");
            }
            const double center = d.ate();
            const double scale = target_bias / base;
            for (double& e : d.effects) e = center + scale * (e - center);
            return d;
          },
          [&](TwoRateDgp d) -> DgpSpec {
            d.shape = CefShape::curved;
            d.curvature = target_bias / d.bias_per_curvature();
            return d;
          }},
      dgp);
  validate(out);
  return out;
}

// ---- generate / estimate ----

Dataset generate(const DgpSpec& dgp, std::uint64_t seed) {
  validate(dgp);
  Rng rng(seed);
  Dataset data;
  std::visit(
      Overloaded{
          [&](const IvDgp& d) {
            data.y.resize(d.n);
            data.x.resize(d.n);
            data.z.resize(d.n);
            const double a = d.endo * d.regressor_sd();
            const double b = std::sqrt(1.0 - a * a);
            for (std::size_t i = 0; i < d.n; ++i) {
              const double z = rng.normal();
              const double v = rng.normal();
              const double e = rng.normal();
              data.z[i] = z;
              data.x[i] = d.instr_strength * z + v;
              data.y[i] = d.beta0 * data.x[i] + d.noise_sd * (a * v + b * e);
            }
          },
          [&](const StratifiedDgp& d) {
            data.y.resize(d.n);
            data.x.resize(d.n);
            data.stratum.resize(d.n);
            const std::size_t kc = d.strata_count();
            for (std::size_t i = 0; i < d.n; ++i) {
              const auto k = static_cast<std::uint32_t>(i % kc);
              const bool treated = rng.bernoulli(d.probs[k]);
              const double e = rng.normal();
              data.stratum[i] = k;
              data.x[i] = treated ? 1.0 : 0.0;
              data.y[i] = static_cast<double>(k) + (treated ? d.effects[k] : 0.0) + d.noise_sd * e;
            }
          },
          [&](const TwoRateDgp& d) {
            data.y.resize(d.n);
            data.x.resize(d.n);
            const double kappa = d.effective_curvature();
            for (std::size_t i = 0; i < d.n; ++i) {
              const double x = 2.0 * rng.uniform() - 1.0;
              const double e = rng.normal();
              const double t = x - d.cutoff;
              const bool treated = t >= 0.0;
              data.x[i] = x;
              data.y[i] = d.slope * x + (treated ? d.effect + kappa * t * t : 0.0) + d.noise_sd * e;
            }
          }},
      dgp);
  return data;
}

EstimatorInput estimate_pair(const Dataset& data, const DgpSpec& dgp) {
  return std::visit(Overloaded{[&](const IvDgp&) { return estimate_iv(data); },
                               [&](const StratifiedDgp& d) { return estimate_stratified(data, d); },
                               [&](const TwoRateDgp& d) { return estimate_two_rate(data, d); }},
                    dgp);
}

// ---- Monte Carlo ----

const MseRow& MseTable::row(const std::string& estimator) const {
  for (const auto& r : rows) {
    if (r.estimator == estimator) return r;
  }
  throw std::out_of_range("no MSE row named '" + estimator + "'");
}

std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t r) {
  // Hashing the base first keeps seeds s and s ^ 1 from sharing replication streams.
  return splitmix64(splitmix64(seed) ^ r);
}

std::string pretest_row_name(double lambda) { return "beta_mse_lambda_" + format_short(lambda); }

ReplicationDraws draw_replications(const DgpSpec& dgp, std::span<const double> lambdas,
                                   std::size_t reps, std::uint64_t seed) {
  validate(dgp);
  for (double l : lambdas) {
    if (!(l >= 0.0)) throw std::invalid_argument("lambdas must be >= 0");
  }
  ReplicationDraws out;
  out.names = {"beta_c", "beta_e", "beta_mse"};
  for (double l : lambdas) out.names.push_back(pretest_row_name(l));
  const std::size_t k = out.names.size();

  struct Rep {
    EstimatorInput input;
    std::vector<double> values;
  };
  std::vector<std::optional<Rep>> results(reps);
  parallel_for(reps, [&](std::size_t r) {
    try {
      const Dataset data = generate(dgp, replication_seed(seed, r));
      const EstimatorInput in = estimate_pair(data, dgp);
      if (numerically_degenerate(in)) return;
      diff_variance(in);
      Rep rep{in, {}};
      rep.values.reserve(k);
      rep.values.push_back(in.beta_c);
      rep.values.push_back(in.beta_e);
      rep.values.push_back(combine(in).beta);
      for (double l : lambdas) rep.values.push_back(combine_pretest(in, l).beta);
      results[r] = std::move(rep);
    } catch (const EstimationError&) {
    } catch (const DegenerateError&) {
    } catch (const std::invalid_argument&) {
      // Negative estimated difference variance: the pair violates the
      // covariance convention on this draw.
    }
  });

  out.estimates.assign(k, {});
  for (auto& res : results) {
    if (!res) {
      ++out.failures;
      continue;
    }
    out.inputs.push_back(res->input);
    for (std::size_t j = 0; j < k; ++j) out.estimates[j].push_back(res->values[j]);
  }
  return out;
}

MseTable run_monte_carlo(const DgpSpec& dgp, std::span<const double> lambdas, std::size_t reps,
                         std::uint64_t seed) {
  if (reps < 2) throw std::invalid_argument("replications must be >= 2");
  ReplicationDraws draws = draw_replications(dgp, lambdas, reps, seed);
  MseTable table;
  table.dgp = dgp;
  table.reps = reps;
  table.seed = seed;
  table.failures = draws.failures;
  if (static_cast<double>(draws.failures) > 0.01 * static_cast<double>(reps) ||
      draws.inputs.size() < 2) {
    std::ostringstream msg;
    msg << draws.failures << " of " << reps << " replications failed (limit 1%)";
    throw SimulationQualityError(msg.str(), draws.failures, reps);
  }
  const double truth = true_value(dgp);
  for (std::size_t j = 0; j < draws.names.size(); ++j) {
    const auto& est = draws.estimates[j];
    const double m = static_cast<double>(est.size());
    double bias = 0.0, mse = 0.0;
    for (double b : est) {
      bias += b - truth;
      mse += (b - truth) * (b - truth);
    }
    bias /= m;
    mse /= m;
    double var = 0.0, var_sq = 0.0;
    for (double b : est) {
      const double e = b - truth;
      var += (e - bias) * (e - bias);
      var_sq += (e * e - mse) * (e * e - mse);
    }
    var /= m;
    table.rows.push_back({draws.names[j], bias, var, mse, std::sqrt(var_sq / (m - 1.0) / m)});
  }
  return table;
}

PairedGap paired_mse_gap(const ReplicationDraws& draws, double truth, std::size_t a,
                         std::size_t b) {
  const auto& ea = draws.estimates.at(a);
  const auto& eb = draws.estimates.at(b);
  const std::size_t m = ea.size();
  if (m < 2) throw std::invalid_argument("paired_mse_gap needs at least 2 replications");
  std::vector<double> diff(m);
  for (std::size_t i = 0; i < m; ++i) {
    diff[i] = (ea[i] - truth) * (ea[i] - truth) - (eb[i] - truth) * (eb[i] - truth);
  }
  const double mean = mean_of(diff);
  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  const double md = static_cast<double>(m);
  return {mean, std::sqrt(ss / (md - 1.0) / md)};
}

LocalSweepResult local_alternative_sweep(const DgpSpec& dgp, std::span<const double> h_grid,
                                         std::size_t reps, std::uint64_t seed,
                                         const ExpectationEngine& engine) {
  if (h_grid.empty()) throw std::invalid_argument("h grid must be non-empty");
  if (reps < 2) throw std::invalid_argument("replications must be >= 2");
  const bool mixed = std::holds_alternative<TwoRateDgp>(dgp);
  LocalSweepResult out;
  std::vector<double> emp, pred, grid;
  for (double h : h_grid) {
    const DgpSpec local = with_local_violation(dgp, h);
    const ReplicationDraws draws = draw_replications(local, {}, reps, seed);
    if (static_cast<double>(draws.failures) > 0.01 * static_cast<double>(reps)) {
      throw SimulationQualityError("too many failed replications in local sweep", draws.failures, reps);
    }
    const double truth = true_value(local);
    const double rate = consistent_rate(local);
    const double n = static_cast<double>(sample_size(local));
    const PairedGap gap = paired_mse_gap(draws, truth, 2, 0);

    LocalSweepPoint p;
    p.h = h;
    p.empirical = rate * rate * gap.gap;
    p.empirical_se = rate * rate * gap.se;
    double vc = 0.0, ve = 0.0;
    for (const auto& in : draws.inputs) {
      vc += in.var_c;
      ve += in.var_e;
    }
    const double m = static_cast<double>(draws.inputs.size());
    p.sigma2_c = rate * rate * vc / m;
    p.sigma2_e = n * ve / m;
    p.mu = rate * (mean_of(draws.estimates[0]) - truth);

    if (mixed) {
      AsymptoticParams ap{p.sigma2_c, p.sigma2_e, p.mu, p.sigma2_e};
      p.g = (h - p.mu) / std::sqrt(p.sigma2_c);
      p.predicted = risk_gap_mixed_rates(h, ap, engine);
    } else {
      AsymptoticParams ap{p.sigma2_c, p.sigma2_e, 0.0, p.sigma2_e};
      p.g = h / std::sqrt(p.sigma2_c - p.sigma2_e);
      p.predicted = risk_gap_equal_rates(h, ap, engine);
    }
    out.points.push_back(p);
    grid.push_back(h);
    emp.push_back(p.empirical);
    pred.push_back(p.predicted);
  }
  out.empirical = RiskCurve::from_values(grid, std::move(emp));
  out.predicted = RiskCurve::from_values(std::move(grid), std::move(pred));
  return out;
}

}  // namespace msecomb
