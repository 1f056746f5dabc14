#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace msecomb {

/// A non-finite integrand value was met while integrating.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double abscissa)
      : std::runtime_error(what), abscissa_(abscissa) {}
  double abscissa() const noexcept { return abscissa_; }

 private:
  double abscissa_;
};

enum class Method { gauss_hermite, halton_mc, pseudo_mc };

const char* method_name(Method m);
Method parse_method(const std::string& name);

struct EngineConfig {
  Method method = Method::gauss_hermite;
  std::size_t nodes = 150;  // quadrature nodes or MC draw count
  std::uint64_t seed = 0;   // pseudo_mc only
  unsigned halton_base = 2;
  std::uint64_t halton_skip = 0;

  void validate() const;
  bool operator==(const EngineConfig&) const = default;
};

struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Hermite rule for the weight e^{-x^2}, 1 <= n <= 200.
/// Nodes are ascending and exactly antisymmetric.
HermiteRule gauss_hermite_rule(int n);

/// Radical inverse of `index` (>= 1) in `base`.
double halton(std::uint64_t index, unsigned base);

/// Standard normal quantile, 0 < u < 1.
double inv_norm_cdf(double u);

double norm_cdf(double x);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;  // zero for quadrature
};

/// Number of batches used for the Halton batch-means standard error.
inline constexpr std::size_t kHaltonBatches = 20;

/// Computes E[f(N)] for N ~ Normal(g, 1).
///
/// Every method reduces to a fixed set of standard-normal offsets z_i with
/// weights w_i, so E[f(N)] ~= sum_i w_i f(g + z_i). The offsets are built once
/// at construction and shared between copies. Sums run in index order, so a
/// given configuration always yields the same bits.
class ExpectationEngine {
 public:
  explicit ExpectationEngine(EngineConfig config = {});

  const EngineConfig& config() const noexcept { return config_; }
  std::span<const double> offsets() const noexcept { return *offsets_; }
  std::span<const double> weights() const noexcept { return *weights_; }

  /// Integrates K scalar functions at once; f maps an abscissa to std::array<double, K>.
  template <std::size_t K, class F>
  std::array<Estimate, K> integrate(F&& f, double g) const;

  Estimate expect_with_error(const std::function<double(double)>& f, double g) const;
  double expect(const std::function<double(double)>& f, double g) const;

 private:
  [[noreturn]] static void throw_non_finite(double abscissa);

  EngineConfig config_;
  std::shared_ptr<const std::vector<double>> offsets_;
  std::shared_ptr<const std::vector<double>> weights_;
};

/// Free-function form of ExpectationEngine::expect.
double expect_normal(const std::function<double(double)>& f, double g,
                     const ExpectationEngine& engine);

template <std::size_t K, class F>
std::array<Estimate, K> ExpectationEngine::integrate(F&& f, double g) const {
  const auto& z = *offsets_;
  const auto& w = *weights_;
  const std::size_t n = z.size();
  std::array<double, K> sum{};
  std::array<double, K> sum_sq{};
  const bool halton = config_.method == Method::halton_mc;
  const std::size_t batch_len = n / kHaltonBatches;
  std::array<std::array<double, K>, kHaltonBatches> batch{};

  for (std::size_t i = 0; i < n; ++i) {
    const double x = g + z[i];
    const std::array<double, K> v = f(x);
    for (std::size_t k = 0; k < K; ++k) {
      if (!std::isfinite(v[k])) throw_non_finite(x);
      sum[k] += w[i] * v[k];
      sum_sq[k] += v[k] * v[k];
      if (halton && batch_len > 0) {
        const std::size_t b = i / batch_len;
        if (b < kHaltonBatches) batch[b][k] += v[k];
      }
    }
  }

  std::array<Estimate, K> out{};
  for (std::size_t k = 0; k < K; ++k) {
    out[k].value = sum[k];
    switch (config_.method) {
      case Method::gauss_hermite:
        break;
      case Method::pseudo_mc:
        if (n > 1) {
          const double nn = static_cast<double>(n);
          const double var = std::max(0.0, (sum_sq[k] - nn * sum[k] * sum[k]) / (nn - 1.0));
          out[k].std_error = std::sqrt(var / nn);
        }
        break;
      case Method::halton_mc:
        if (batch_len > 0) {
          double mean = 0.0;
          std::array<double, kHaltonBatches> means{};
          for (std::size_t b = 0; b < kHaltonBatches; ++b) {
            means[b] = batch[b][k] / static_cast<double>(batch_len);
            mean += means[b];
          }
          mean /= static_cast<double>(kHaltonBatches);
          double ss = 0.0;
          for (double m : means) ss += (m - mean) * (m - mean);
          const double nb = static_cast<double>(kHaltonBatches);
          out[k].std_error = std::sqrt(ss / (nb - 1.0) / nb);
        }
        break;
    }
  }
  return out;
}

}  // namespace msecomb
