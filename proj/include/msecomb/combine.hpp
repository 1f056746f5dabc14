#pragma once

#include <stdexcept>

namespace msecomb {

/// Raised when a combination weight or test statistic has a zero denominator.
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The observed quintuple fed to every combination formula.
///
/// `beta_c` is the consistent estimate, `beta_e` the efficient one. Variances
/// and the covariance are finite-sample estimates (already divided by n).
struct EstimatorInput {
  double beta_c = 0.0;
  double beta_e = 0.0;
  double var_c = 0.0;
  double var_e = 0.0;
  double cov_ce = 0.0;

  /// Builds an input whose covariance defaults to `var_e`.
  static EstimatorInput with_default_cov(double beta_c, double beta_e, double var_c,
                                         double var_e);

  /// Throws std::invalid_argument naming the first non-finite or negative field.
  void validate() const;
};

struct CombinedEstimate {
  double beta = 0.0;
  double weight = 0.0;
  double est_mse = 0.0;
};

/// var_e + var_c - 2 cov_ce. Values in (-1e-12, 0) snap to 0; anything more
/// negative throws std::invalid_argument.
double diff_variance(const EstimatorInput& in);

/// Estimated MSE of p*beta_e + (1-p)*beta_c, with the squared-bias estimate
/// shrunk to max(0, (beta_e-beta_c)^2 - lambda*diff_variance).
double mse_objective(const EstimatorInput& in, double p, double lambda = 0.0);

/// Closed-form minimizer of mse_objective over p in R.
double optimal_weight(const EstimatorInput& in);
double pretest_weight(const EstimatorInput& in, double lambda);

/// Combined estimators. When both the bias term and the difference variance are
/// exactly zero every weight gives the same point; these return beta_e with
/// weight 1 instead of throwing.
CombinedEstimate combine(const EstimatorInput& in);
CombinedEstimate combine_pretest(const EstimatorInput& in, double lambda);

/// (beta_e-beta_c)^2 / diff_variance. Zero when the estimates coincide.
double hausman_statistic(const EstimatorInput& in);

/// chi-squared(1) CDF and its inverse.
double pretest_level(double lambda);
double level_to_lambda(double alpha);

/// True unless var_c >= cov_ce >= var_e, the ordering under which the weight
/// is guaranteed to lie in [0, 1].
bool covariance_ordering_violated(const EstimatorInput& in);

/// Both the squared difference and its variance are exactly zero.
bool is_degenerate(const EstimatorInput& in);

}  // namespace msecomb
