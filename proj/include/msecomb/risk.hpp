#pragma once

#include <span>
#include <string>
#include <vector>

#include "msecomb/expect.hpp"

namespace msecomb {

/// Asymptotic variances of the two estimators. `mu` and `rho` only matter in
/// the mixed-rate setting; with equal rates mu = 0 and rho = sigma2_e.
struct AsymptoticParams {
  double sigma2_c = 1.0;
  double sigma2_e = 0.0;
  double mu = 0.0;
  double rho = 0.0;

  /// Equal-rates requirement sigma2_c > sigma2_e >= 0.
  void validate_equal_rates() const;
};

/// z / (z^2 + 1).
double shrink(double z);

/// z / (max(0, z^2 - lambda) + 1); identity on z^2 <= lambda.
double shrink_pretest(double z, double lambda);

/// Normalized local excess risk of the combined estimator over the consistent one:
/// E[s(N)^2] - 2 cov(s(N), N) with s = shrink and N ~ Normal(g, 1).
double delta(double g, const ExpectationEngine& engine);

/// Same functional with s = shrink_pretest(., lambda). Equals delta at lambda = 0.
double delta_pretest(double g, double lambda, const ExpectationEngine& engine);

/// delta(g) + 2 mu_sd E[shrink(N)].
double lambda_curve(double g, double mu_sd, const ExpectationEngine& engine);

/// Limiting variance of the pre-test combination under the null:
/// sigma2_e + (sigma2_c - sigma2_e) E[Z^2 (1/(max(0, Z^2-lambda)+1) - 1)^2].
double pretest_null_variance(double lambda, const AsymptoticParams& params,
                             const ExpectationEngine& engine);

/// E(U_h^2) - sigma2_c = (sigma2_c - sigma2_e) delta(h / sqrt(sigma2_c - sigma2_e)).
double risk_gap_equal_rates(double h, const AsymptoticParams& params,
                            const ExpectationEngine& engine);

/// E(U_h^2) - (mu^2 + sigma2_c) = sigma2_c Lambda((h - mu)/sigma_c, mu/sigma_c).
double risk_gap_mixed_rates(double h, const AsymptoticParams& params,
                            const ExpectationEngine& engine);

/// Values on a grid. Positive values mean the combined estimator is worse
/// than its comparator.
struct RiskCurve {
  std::vector<double> grid;
  std::vector<double> values;
  double max_gain = 0.0;  // max(0, max of -values)
  double max_loss = 0.0;  // max(0, max of values)

  /// Builds a curve and fills the extrema.
  static RiskCurve from_values(std::vector<double> grid, std::vector<double> values);
};

struct MinimaxVerdict {
  double max_gain = 0.0;
  double max_loss = 0.0;
  bool dominates = false;  // max_loss < max_gain
};

MinimaxVerdict minimax_summary(const RiskCurve& curve);

/// Which risk functional a sweep evaluates.
struct Functional {
  enum class Kind { delta, delta_pretest, pretest_gap, lambda_curve };
  Kind kind = Kind::delta;
  double lambda = 0.0;  // delta_pretest, pretest_gap
  double mu_sd = 0.0;   // lambda_curve

  static Functional plain() { return {}; }
  static Functional pretest(double lambda) { return {Kind::delta_pretest, lambda, 0.0}; }
  /// delta_pretest(g, lambda) - delta(g).
  static Functional pretest_vs_plain(double lambda) { return {Kind::pretest_gap, lambda, 0.0}; }
  static Functional mixed(double mu_sd) { return {Kind::lambda_curve, 0.0, mu_sd}; }

  double operator()(double g, const ExpectationEngine& engine) const;
  std::string name() const;
};

/// Evaluates `functional` on a non-empty ascending grid. Grid points may be
/// evaluated concurrently; values are stored in grid order.
RiskCurve sweep(const Functional& functional, std::span<const double> grid,
                const ExpectationEngine& engine);

/// {lo, lo+step, ...} up to hi inclusive, built as lo + i*step to avoid drift.
std::vector<double> uniform_grid(double lo, double hi, double step);

/// The three dominance claims that can be checked numerically.
struct ClaimVerdict {
  std::string claim;  // "thm1.3", "prop1.3", "thm2.3"
  double parameter = 0.0;  // lambda for prop1.3, mu_sd for thm2.3
  MinimaxVerdict verdict;
  bool in_validated_region = true;  // false for thm2.3 with |mu_sd| > 0.4
  std::string note;
};

/// Largest |mu_sd| for which the mixed-rate dominance claim is asserted.
inline constexpr double kValidatedMuSd = 0.4;

ClaimVerdict verify_equal_rates(std::span<const double> grid, const ExpectationEngine& engine);
ClaimVerdict verify_pretest(double lambda, std::span<const double> grid,
                            const ExpectationEngine& engine);
ClaimVerdict verify_mixed_rates(double mu_sd, std::span<const double> grid,
                                const ExpectationEngine& engine);

}  // namespace msecomb
