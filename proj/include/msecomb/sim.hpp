#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "msecomb/combine.hpp"
#include "msecomb/expect.hpp"
#include "msecomb/risk.hpp"

namespace msecomb {

/// Linear outcome y = beta0 x + u with first stage x = instr_strength z + v.
/// `endo` is corr(x, u); H0 (exogeneity) holds iff endo == 0. The consistent
/// estimator is 2SLS, the efficient one OLS.
struct IvDgp {
  std::size_t n = 2000;
  double beta0 = 1.0;
  double endo = 0.0;
  double instr_strength = 1.0;
  double noise_sd = 1.0;

  void validate() const;
  double regressor_sd() const;
  /// Largest admissible |endo| for this first stage.
  double max_endo() const;
  /// beta0 + endo noise_sd / sd(x).
  double plim_efficient() const;

  bool operator==(const IvDgp&) const = default;
};

/// Stratified experiment. Units are assigned to strata round-robin, treated
/// with the stratum probability, and y = stratum index + effect D + noise.
/// The consistent estimator is the share-weighted difference in means, the
/// efficient one the strata fixed-effects regression. H0 holds iff all effects
/// are equal.
struct StratifiedDgp {
  std::size_t n = 2000;
  std::vector<double> effects{1.0, 1.0, 1.0};
  std::vector<double> probs{0.1, 0.5, 0.9};
  double noise_sd = 1.0;

  void validate() const;
  std::size_t strata_count() const noexcept { return effects.size(); }
  double stratum_share(std::size_t k) const;
  double ate() const;
  double plim_efficient() const;

  bool operator==(const StratifiedDgp&) const = default;
};

enum class CefShape { linear, curved };

/// Sharp regression discontinuity with running variable X ~ Uniform(-1, 1),
/// treatment 1{X >= cutoff} and y = slope X + curvature X^2 + effect D + noise
/// (curvature is ignored for the linear shape). The consistent estimator is a
/// local linear fit on each side within b_n = bandwidth_const n^-bandwidth_exponent
/// of the cutoff, the efficient one a global linear fit on each side.
struct TwoRateDgp {
  std::size_t n = 2000;
  double effect = 1.0;
  CefShape shape = CefShape::linear;
  double slope = 1.0;
  double curvature = 0.0;
  double cutoff = 0.0;
  double bandwidth_const = 1.0;
  double bandwidth_exponent = 0.2;
  double noise_sd = 1.0;

  void validate() const;
  double bandwidth() const;
  /// r_n = sqrt(n b_n) up to the constant, i.e. n^((1 - exponent)/2).
  double rate() const;
  double effective_curvature() const { return shape == CefShape::curved ? curvature : 0.0; }
  double plim_efficient() const;
  /// Efficient-estimator bias per unit curvature.
  double bias_per_curvature() const;

  bool operator==(const TwoRateDgp&) const = default;
};

using DgpSpec = std::variant<IvDgp, StratifiedDgp, TwoRateDgp>;

std::string dgp_kind(const DgpSpec& dgp);
void validate(const DgpSpec& dgp);
std::size_t sample_size(const DgpSpec& dgp);
double true_value(const DgpSpec& dgp);
double plim_efficient(const DgpSpec& dgp);
/// Convergence rate of the consistent estimator: sqrt(n) or r_n.
double consistent_rate(const DgpSpec& dgp);

/// Returns a copy of `dgp` whose H0 violation makes plim_efficient - true_value
/// equal h / consistent_rate. Throws if the template has no direction to scale
/// (e.g. stratified with identical effects).
DgpSpec with_local_violation(const DgpSpec& dgp, double h);

/// Columns used by the three designs: `x` is the regressor, treatment or
/// running variable; `z` the instrument (IV only); `stratum` the stratum id
/// (stratified only).
struct Dataset {
  std::vector<double> y;
  std::vector<double> x;
  std::vector<double> z;
  std::vector<std::uint32_t> stratum;

  bool operator==(const Dataset&) const = default;
};

/// Deterministic in (dgp, seed).
Dataset generate(const DgpSpec& dgp, std::uint64_t seed);

/// An estimator could not be computed on a dataset.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Point estimates with HC1 robust variances; cov_ce is set to var_e.
EstimatorInput estimate_pair(const Dataset& data, const DgpSpec& dgp);

struct MseRow {
  std::string estimator;
  double bias = 0.0;
  double variance = 0.0;
  double mse = 0.0;
  double mc_se = 0.0;  // Monte-Carlo standard error of mse

  bool operator==(const MseRow&) const = default;
};

struct MseTable {
  std::vector<MseRow> rows;
  DgpSpec dgp;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::size_t failures = 0;

  const MseRow& row(const std::string& estimator) const;
  bool operator==(const MseTable&) const = default;
};

/// Too many replications failed.
class SimulationQualityError : public std::runtime_error {
 public:
  SimulationQualityError(const std::string& what, std::size_t failures, std::size_t reps)
      : std::runtime_error(what), failures_(failures), reps_(reps) {}
  std::size_t failures() const noexcept { return failures_; }
  std::size_t reps() const noexcept { return reps_; }

 private:
  std::size_t failures_;
  std::size_t reps_;
};

/// Seed for replication r: splitmix64(splitmix64(seed) XOR r).
std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t r);

/// Row name of the pre-test combination with critical value lambda.
std::string pretest_row_name(double lambda);

/// Per-replication estimates of beta_c, beta_e, beta_mse and one pre-test
/// combination per lambda, in that order.
struct ReplicationDraws {
  std::vector<std::string> names;
  std::vector<std::vector<double>> estimates;  // [estimator][replication]
  std::vector<EstimatorInput> inputs;          // successful replications only
  std::size_t failures = 0;
};

ReplicationDraws draw_replications(const DgpSpec& dgp, std::span<const double> lambdas,
                                   std::size_t reps, std::uint64_t seed);

/// Finite-sample bias, variance and MSE of every estimator across `reps`
/// replications (reps >= 2). Failed replications are dropped and counted;
/// more than 1% failures throws SimulationQualityError.
MseTable run_monte_carlo(const DgpSpec& dgp, std::span<const double> lambdas, std::size_t reps,
                         std::uint64_t seed);

/// Difference in MSE between two rows of a replication draw together with the
/// standard error of that paired difference.
struct PairedGap {
  double gap = 0.0;
  double se = 0.0;
};

PairedGap paired_mse_gap(const ReplicationDraws& draws, double truth, std::size_t a,
                         std::size_t b);

struct LocalSweepPoint {
  double h = 0.0;
  double g = 0.0;  // standardized local parameter fed to the risk functional
  double empirical = 0.0;    // rate^2 (mse(beta_mse) - mse(beta_c))
  double empirical_se = 0.0;
  double predicted = 0.0;    // asymptotic risk gap
  double sigma2_c = 0.0;     // rate^2 mean var_c
  double sigma2_e = 0.0;     // n mean var_e
  double mu = 0.0;           // rate mean(beta_c - beta0)
};

struct LocalSweepResult {
  std::vector<LocalSweepPoint> points;
  RiskCurve empirical;
  RiskCurve predicted;
};

/// Runs a Monte Carlo at each h with the H0 violation scaled to h / rate and
/// pairs the empirical normalized risk gap with the asymptotic prediction.
LocalSweepResult local_alternative_sweep(const DgpSpec& dgp, std::span<const double> h_grid,
                                         std::size_t reps, std::uint64_t seed,
                                         const ExpectationEngine& engine);

}  // namespace msecomb
