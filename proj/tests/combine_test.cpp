#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "msecomb/combine.hpp"
#include "oracles.hpp"

using namespace msecomb;

namespace {

const EstimatorInput kBiased{1.0, 1.5, 0.04, 0.01, 0.01};

EstimatorInput random_input(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> beta(-2.0, 2.0);
  std::uniform_real_distribution<double> var(0.001, 1.0);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  const double ve = var(rng);
  const double vc = ve * (2.0 + 3.0 * frac(rng));
  // var_e <= cov <= sqrt(var_c var_e): ordered and positive semi-definite.
  // With var_c >= 2 var_e every weight then lies inside (-10, 10).
  const double cov = ve + frac(rng) * (std::sqrt(vc * ve) - ve);
  return {beta(rng), beta(rng), vc, ve, cov};
}

}  // namespace

TEST(DiffVariance, Examples) {
  EXPECT_DOUBLE_EQ(diff_variance({0, 0, 2, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(diff_variance({0, 0, 1, 1, 1}), 0.0);
  EXPECT_NEAR(diff_variance({0, 0, 0.04, 0.01, 0.01}), 0.03, 1e-15);
}

TEST(DiffVariance, SnapsTinyNegativeAndRejectsLarge) {
  EXPECT_EQ(diff_variance({0, 0, 1.0, 1.0, 1.0 + 1e-13}), 0.0);
  EXPECT_THROW(diff_variance({0, 0, 1.0, 1.0, 1.1}), std::invalid_argument);
}

TEST(EstimatorInput, ValidateNamesField) {
  try {
    EstimatorInput{0, 0, 1, -1, 0}.validate();
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("var_e"), std::string::npos);
  }
  EXPECT_THROW((EstimatorInput{std::nan(""), 0, 1, 1, 1}.validate()), std::invalid_argument);
  EXPECT_EQ(EstimatorInput::with_default_cov(1, 2, 3, 4).cov_ce, 4.0);
}

TEST(OptimalWeight, Examples) {
  EXPECT_DOUBLE_EQ(optimal_weight({1, 1, 2, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(optimal_weight({0, 1, 0.5, 0.2, 0.5}), 0.0);
  EXPECT_NEAR(optimal_weight(kBiased), 0.03 / 0.28, 1e-15);
}

TEST(OptimalWeight, NeedsOnlyPositiveDenominator) {
  // var_e + var_c - 2 cov = -0.3 but the plain weight is still defined.
  const EstimatorInput odd{0, 1, 0.5, 0.2, 0.5};
  EXPECT_EQ(pretest_weight(odd, 0.0), 0.0);
  EXPECT_THROW(pretest_weight(odd, 1.0), std::invalid_argument);
  EXPECT_THROW(hausman_statistic(odd), std::invalid_argument);
  EXPECT_THROW(optimal_weight({0, 0.1, 0.5, 0.2, 0.5}), std::invalid_argument);
}

TEST(OptimalWeight, MatchesGridMinimizer) {
  const double grid = oracle::grid_argmin(
      [](double p) { return oracle::objective(1.0, 1.5, 0.04, 0.01, 0.01, p, 0.0); }, -2.0, 2.0, 1e-6);
  EXPECT_NEAR(grid, 0.107142857, 1e-5);
  EXPECT_NEAR(optimal_weight(kBiased), grid, 1e-5);
}

TEST(OptimalWeight, DegenerateDenominatorThrows) {
  EXPECT_THROW(optimal_weight({2, 2, 1, 1, 1}), DegenerateError);
}

TEST(Combine, Examples) {
  EXPECT_DOUBLE_EQ(combine({3, 3, 2, 1, 1}).beta, 3.0);
  EXPECT_DOUBLE_EQ(combine({3, 3, 0.7, 0.3, 0.4}).beta, 3.0);
  EXPECT_NEAR(combine(kBiased).beta, 1.0 + 0.5 * 0.03 / 0.28, 1e-12);
  EXPECT_NEAR(combine(kBiased).beta, 1.05357, 1e-5);
  EXPECT_DOUBLE_EQ(combine({0, 1, 0.5, 0.2, 0.5}).beta, 0.0);
}

TEST(Combine, DegenerateReturnsEfficient) {
  const auto c = combine({2, 2, 1, 1, 1});
  EXPECT_EQ(c.beta, 2.0);
  EXPECT_EQ(c.weight, 1.0);
  EXPECT_EQ(c.est_mse, 1.0);
}

TEST(Combine, NegativeWeightReportedAndFlagged) {
  // cov > var_c gives a negative weight; it is not clamped.
  const EstimatorInput in{0.0, 1.0, 0.5, 0.9, 0.6};
  EXPECT_LT(optimal_weight(in), 0.0);
  EXPECT_LT(combine(in).weight, 0.0);
  EXPECT_TRUE(covariance_ordering_violated(in));
  EXPECT_FALSE(covariance_ordering_violated(kBiased));
}

TEST(PretestWeight, Examples) {
  EXPECT_EQ(pretest_weight(kBiased, 0.0), optimal_weight(kBiased));
  EXPECT_DOUBLE_EQ(pretest_weight(kBiased, 100.0), 1.0);
  EXPECT_NEAR(pretest_weight(kBiased, 1.0), 0.12, 1e-15);
  EXPECT_THROW(pretest_weight(kBiased, -0.1), std::invalid_argument);
  EXPECT_THROW(pretest_weight({2, 2, 1, 1, 1}, 1.0), DegenerateError);
}

TEST(PretestWeight, MatchesGridMinimizer) {
  const double grid = oracle::grid_argmin(
      [](double p) { return oracle::objective(1.0, 1.5, 0.04, 0.01, 0.01, p, 1.0); }, -2.0, 2.0, 1e-6);
  EXPECT_NEAR(grid, 0.12, 1e-5);
  EXPECT_NEAR(pretest_weight(kBiased, 1.0), grid, 1e-5);
}

TEST(CombinePretest, Examples) {
  const auto a = combine_pretest(kBiased, 0.0);
  const auto b = combine(kBiased);
  EXPECT_EQ(a.beta, b.beta);
  EXPECT_EQ(a.weight, b.weight);
  EXPECT_EQ(combine_pretest({4, 4, 1, 0.5, 0.5}, 7.0).beta, 4.0);
  EXPECT_NEAR(combine_pretest(kBiased, 1.0).beta, 1.06, 1e-12);
}

TEST(Hausman, Examples) {
  EXPECT_EQ(hausman_statistic({2, 2, 1, 0.5, 0.5}), 0.0);
  EXPECT_NEAR(hausman_statistic(kBiased), 0.25 / 0.03, 1e-12);
  EXPECT_NEAR(hausman_statistic({0, 0.1, 0.02, 0.01, 0.01}), 1.0, 1e-12);
  EXPECT_THROW(hausman_statistic({0, 1, 1, 1, 1}), DegenerateError);
}

TEST(PretestLevel, Examples) {
  EXPECT_EQ(pretest_level(0.0), 0.0);
  const double expected = oracle::chi2_1_cdf(3.841459);
  EXPECT_NEAR(expected, 0.95, 1e-6);
  EXPECT_NEAR(pretest_level(3.841459), expected, 1e-12);
  EXPECT_EQ(pretest_level(std::numeric_limits<double>::infinity()), 1.0);
  EXPECT_NEAR(pretest_level(1e4), 1.0, 1e-15);
  EXPECT_THROW(pretest_level(-1.0), std::invalid_argument);
}

TEST(PretestLevel, AgreesWithIncompleteGammaSeries) {
  for (double l : {0.01, 0.3, 1.0, 2.5, 6.0, 12.0}) {
    EXPECT_NEAR(pretest_level(l), oracle::chi2_1_cdf(l), 1e-12) << l;
  }
}

TEST(PretestLevel, RoundTrip) {
  for (double l : {1e-6, 0.01, 0.5, 1.0, 3.841459, 10.0, 25.0}) {
    EXPECT_NEAR(level_to_lambda(pretest_level(l)), l, 1e-8) << l;
  }
  for (double a : {0.01, 0.1, 0.5, 0.9, 0.95, 0.99}) {
    EXPECT_NEAR(pretest_level(level_to_lambda(a)), a, 1e-12) << a;
  }
  EXPECT_EQ(level_to_lambda(0.0), 0.0);
  EXPECT_TRUE(std::isinf(level_to_lambda(1.0)));
  EXPECT_THROW(level_to_lambda(1.5), std::invalid_argument);
}

TEST(CombineProperties, ClosedFormMatchesGridOnRandomInputs) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const EstimatorInput in = random_input(rng);
    for (double lambda : {0.0, 1.5}) {
      const double grid = oracle::refined_argmin(
          [&](double p) {
            return oracle::objective(in.beta_c, in.beta_e, in.var_c, in.var_e, in.cov_ce, p, lambda);
          },
          -10.0, 10.0);
      ASSERT_NEAR(pretest_weight(in, lambda), grid, 1e-5) << "input " << i << " lambda " << lambda;
    }
  }
}

TEST(CombineProperties, RecommendedCovarianceBounds) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    EstimatorInput in = random_input(rng);
    in.cov_ce = in.var_e;
    const double p = optimal_weight(in);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    for (double l : {0.5, 2.0, 10.0}) {
      const double pl = pretest_weight(in, l);
      EXPECT_GE(pl, p);
      EXPECT_LE(pl, 1.0 + 1e-15);
    }
  }
}

TEST(CombineProperties, PretestWeightMonotoneInLambda) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 500; ++i) {
    const EstimatorInput in = random_input(rng);
    double prev = pretest_weight(in, 0.0);
    for (double l = 0.25; l <= 20.0; l += 0.25) {
      const double cur = pretest_weight(in, l);
      ASSERT_GE(cur, prev);
      prev = cur;
    }
  }
}

TEST(CombineProperties, PretestCollapsesToEfficient) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    EstimatorInput in = random_input(rng);
    in.cov_ce = in.var_e;
    const double t = hausman_statistic(in);
    const auto c = combine_pretest(in, t + 0.1);
    EXPECT_EQ(c.beta, in.beta_e);
    EXPECT_EQ(combine_pretest(in, t).beta, in.beta_e);
  }
}

TEST(CombineProperties, EstimatedMseBelowEndpoints) {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 1000; ++i) {
    const EstimatorInput in = random_input(rng);
    const auto c = combine(in);
    EXPECT_LE(c.est_mse, mse_objective(in, 0.0) + 1e-15);
    EXPECT_LE(c.est_mse, mse_objective(in, 1.0) + 1e-15);
    EXPECT_NEAR(c.beta, c.weight * in.beta_e + (1 - c.weight) * in.beta_c, 1e-15);
  }
}
