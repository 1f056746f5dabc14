#include "msecomb/combine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "msecomb/expect.hpp"

namespace msecomb {
namespace {

constexpr double kNegativeSnap = 1e-12;

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(field) + " must be finite");
}

void require_lambda(double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
}

// max(0, (beta_e - beta_c)^2 - lambda * vdiff). Exactly zero whenever the
// Hausman statistic is <= lambda, so an accepted pre-test returns beta_e.
double shrunk_bias(const EstimatorInput& in, double vdiff, double lambda) {
  const double d = in.beta_e - in.beta_c;
  if (lambda > 0.0 && vdiff > 0.0 && d * d / vdiff <= lambda) return 0.0;
  return std::max(0.0, d * d - lambda * vdiff);
}

// var_e + var_c - 2 cov_ce with tiny negatives snapped to zero but no
// consistency check.
double raw_diff_variance(const EstimatorInput& in) {
  // Grouped so that cov_ce == var_e gives exactly var_c - cov_ce.
  const double v = (in.var_c - in.cov_ce) + (in.var_e - in.cov_ce);
  return (v < 0.0 && v > -kNegativeSnap) ? 0.0 : v;
}

// The plain weight only needs a positive denominator; shrinking the bias by
// lambda times the difference variance needs that variance to be valid.
double vdiff_for(const EstimatorInput& in, double lambda) {
  return lambda == 0.0 ? raw_diff_variance(in) : diff_variance(in);
}

double weight_impl(const EstimatorInput& in, double lambda) {
  in.validate();
  require_lambda(lambda);
  const double vdiff = vdiff_for(in, lambda);
  const double denom = shrunk_bias(in, vdiff, lambda) + vdiff;
  if (denom == 0.0) {
    throw DegenerateError("degenerate denominator: estimates coincide with zero difference variance");
  }
  if (denom < 0.0) {
    throw std::invalid_argument("inconsistent variance inputs: negative weight denominator");
  }
  return (in.var_c - in.cov_ce) / denom;
}

CombinedEstimate combine_impl(const EstimatorInput& in, double lambda) {
  in.validate();
  require_lambda(lambda);
  double p = 1.0;
  if (!is_degenerate(in)) p = weight_impl(in, lambda);
  return {p * in.beta_e + (1.0 - p) * in.beta_c, p, mse_objective(in, p, lambda)};
}

}  // namespace

EstimatorInput EstimatorInput::with_default_cov(double beta_c, double beta_e, double var_c,
                                                double var_e) {
  return {beta_c, beta_e, var_c, var_e, var_e};
}

void EstimatorInput::validate() const {
  require_finite(beta_c, "beta_c");
  require_finite(beta_e, "beta_e");
  require_finite(var_c, "var_c");
  require_finite(var_e, "var_e");
  require_finite(cov_ce, "cov_ce");
  if (var_c < 0.0) throw std::invalid_argument("var_c must be >= 0");
  if (var_e < 0.0) throw std::invalid_argument("var_e must be >= 0");
}

double diff_variance(const EstimatorInput& in) {
  const double v = raw_diff_variance(in);
  if (v >= 0.0) return v;
  throw std::invalid_argument("inconsistent variance inputs: var_e + var_c - 2 cov_ce = " +
                              std::to_string(v) + " < 0");
}

double mse_objective(const EstimatorInput& in, double p, double lambda) {
  const double bias2 = shrunk_bias(in, vdiff_for(in, lambda), lambda);
  return p * p * bias2 + p * p * in.var_e + (1.0 - p) * (1.0 - p) * in.var_c +
         2.0 * p * (1.0 - p) * in.cov_ce;
}

double optimal_weight(const EstimatorInput& in) { return weight_impl(in, 0.0); }

double pretest_weight(const EstimatorInput& in, double lambda) { return weight_impl(in, lambda); }

CombinedEstimate combine(const EstimatorInput& in) { return combine_impl(in, 0.0); }

CombinedEstimate combine_pretest(const EstimatorInput& in, double lambda) {
  return combine_impl(in, lambda);
}

double hausman_statistic(const EstimatorInput& in) {
  in.validate();
  const double d = in.beta_e - in.beta_c;
  const double vdiff = diff_variance(in);
  if (d == 0.0) return 0.0;
  if (vdiff == 0.0) throw DegenerateError("Hausman statistic undefined: zero difference variance");
  return d * d / vdiff;
}

double pretest_level(double lambda) {
  require_lambda(lambda);
  if (std::isinf(lambda)) return 1.0;
  return std::erf(std::sqrt(lambda / 2.0));
}

double level_to_lambda(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in [0, 1]");
  if (alpha == 0.0) return 0.0;
  if (alpha == 1.0) return std::numeric_limits<double>::infinity();
  // F1(lambda) = 2 Phi(sqrt(lambda)) - 1; for alpha near 1 use the upper tail
  // directly to avoid cancellation in (1 + alpha) / 2.
  const double q = alpha > 0.5 ? -inv_norm_cdf((1.0 - alpha) / 2.0)
                               : inv_norm_cdf((1.0 + alpha) / 2.0);
  return q * q;
}

bool covariance_ordering_violated(const EstimatorInput& in) {
  return !(in.var_c >= in.cov_ce && in.cov_ce >= in.var_e);
}

bool is_degenerate(const EstimatorInput& in) {
  return in.beta_e == in.beta_c && raw_diff_variance(in) == 0.0;
}

}  // namespace msecomb
