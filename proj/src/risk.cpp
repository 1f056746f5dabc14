#include "msecomb/risk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "msecomb/parallel.hpp"

namespace msecomb {
namespace {

void require_lambda(double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
}

// E[s^2] - 2 (E[N s] - g E[s]) for s = shrink_pretest(., lambda).
double delta_impl(double g, double lambda, const ExpectationEngine& engine) {
  const auto m = engine.integrate<3>(
      [lambda](double x) {
        const double s = shrink_pretest(x, lambda);
        return std::array<double, 3>{s * s, x * s, s};
      },
      g);
  return m[0].value - 2.0 * (m[1].value - g * m[2].value);
}

}  // namespace

void AsymptoticParams::validate_equal_rates() const {
  if (!std::isfinite(sigma2_c) || !std::isfinite(sigma2_e)) {
    throw std::invalid_argument("asymptotic variances must be finite");
  }
  if (sigma2_e < 0.0) throw std::invalid_argument("sigma2_e must be >= 0");
  if (!(sigma2_c > sigma2_e)) throw std::invalid_argument("requires sigma2_c > sigma2_e");
}

double shrink(double z) { return z / (z * z + 1.0); }

double shrink_pretest(double z, double lambda) {
  return z / (std::max(0.0, z * z - lambda) + 1.0);
}

double delta(double g, const ExpectationEngine& engine) { return delta_impl(g, 0.0, engine); }

double delta_pretest(double g, double lambda, const ExpectationEngine& engine) {
  require_lambda(lambda);
  return delta_impl(g, lambda, engine);
}

double lambda_curve(double g, double mu_sd, const ExpectationEngine& engine) {
  const auto m = engine.integrate<3>(
      [](double x) {
        const double s = shrink(x);
        return std::array<double, 3>{s * s, x * s, s};
      },
      g);
  const double d = m[0].value - 2.0 * (m[1].value - g * m[2].value);
  return d + 2.0 * mu_sd * m[2].value;
}

double pretest_null_variance(double lambda, const AsymptoticParams& params,
                             const ExpectationEngine& engine) {
  require_lambda(lambda);
  params.validate_equal_rates();
  const double excess = engine.expect(
      [lambda](double z) {
        const double t = z * (1.0 / (std::max(0.0, z * z - lambda) + 1.0) - 1.0);
        return t * t;
      },
      0.0);
  return params.sigma2_e + (params.sigma2_c - params.sigma2_e) * excess;
}

double risk_gap_equal_rates(double h, const AsymptoticParams& params,
                            const ExpectationEngine& engine) {
  params.validate_equal_rates();
  const double d = params.sigma2_c - params.sigma2_e;
  return d * delta(h / std::sqrt(d), engine);
}

double risk_gap_mixed_rates(double h, const AsymptoticParams& params,
                            const ExpectationEngine& engine) {
  if (!(params.sigma2_c > 0.0)) throw std::invalid_argument("requires sigma2_c > 0");
  const double sigma_c = std::sqrt(params.sigma2_c);
  return params.sigma2_c * lambda_curve((h - params.mu) / sigma_c, params.mu / sigma_c, engine);
}

RiskCurve RiskCurve::from_values(std::vector<double> grid, std::vector<double> values) {
  if (grid.size() != values.size()) throw std::invalid_argument("grid/values length mismatch");
  RiskCurve c;
  c.grid = std::move(grid);
  c.values = std::move(values);
  for (double v : c.values) {
    c.max_loss = std::max(c.max_loss, v);
    c.max_gain = std::max(c.max_gain, -v);
  }
  return c;
}

MinimaxVerdict minimax_summary(const RiskCurve& curve) {
  if (curve.values.empty()) throw std::invalid_argument("minimax_summary: empty curve");
  MinimaxVerdict v;
  for (double x : curve.values) {
    v.max_loss = std::max(v.max_loss, x);
    v.max_gain = std::max(v.max_gain, -x);
  }
  v.dominates = v.max_loss < v.max_gain;
  return v;
}

double Functional::operator()(double g, const ExpectationEngine& engine) const {
  switch (kind) {
    case Kind::delta: return delta(g, engine);
    case Kind::delta_pretest: return delta_pretest(g, lambda, engine);
    case Kind::pretest_gap: return delta_pretest(g, lambda, engine) - delta(g, engine);
    case Kind::lambda_curve: return lambda_curve(g, mu_sd, engine);
  }
  throw std::logic_error("unknown functional");
}

std::string Functional::name() const {
  switch (kind) {
    case Kind::delta: return "delta";
    case Kind::delta_pretest: return "delta-pretest";
    case Kind::pretest_gap: return "pretest-gap";
    case Kind::lambda_curve: return "lambda";
  }
  return "unknown";
}

RiskCurve sweep(const Functional& functional, std::span<const double> grid,
                const ExpectationEngine& engine) {
  if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
  if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("sweep: grid must be sorted");
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { values[i] = functional(grid[i], engine); });
  return RiskCurve::from_values({grid.begin(), grid.end()}, std::move(values));
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("grid needs finite lo <= hi and step > 0");
  }
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = lo + static_cast<double>(i) * step;
  return grid;
}

ClaimVerdict verify_equal_rates(std::span<const double> grid, const ExpectationEngine& engine) {
  ClaimVerdict out;
  out.claim = "thm1.3";
  out.verdict = minimax_summary(sweep(Functional::plain(), grid, engine));
  return out;
}

ClaimVerdict verify_pretest(double lambda, std::span<const double> grid,
                            const ExpectationEngine& engine) {
  ClaimVerdict out;
  out.claim = "prop1.3";
  out.parameter = lambda;
  out.verdict = minimax_summary(sweep(Functional::pretest_vs_plain(lambda), grid, engine));
  out.note = "values are risk of the pre-test combination minus the plain combination";
  return out;
}

ClaimVerdict verify_mixed_rates(double mu_sd, std::span<const double> grid,
                                const ExpectationEngine& engine) {
  ClaimVerdict out;
  out.claim = "thm2.3";
  out.parameter = mu_sd;
  out.verdict = minimax_summary(sweep(Functional::mixed(mu_sd), grid, engine));
  out.in_validated_region = std::abs(mu_sd) <= kValidatedMuSd;
  if (!out.in_validated_region) out.note = "outside validated region |mu_sd| <= 0.4";
  return out;
}

}  // namespace msecomb
