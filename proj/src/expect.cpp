#include "msecomb/expect.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "msecomb/parallel.hpp"

namespace msecomb {
namespace {

constexpr int kMaxHermiteNodes = 200;
constexpr std::size_t kPseudoChunk = 1u << 16;

template <std::size_t N>
double horner(const double (&c)[N], double x) {
  double acc = c[0];
  for (std::size_t i = 1; i < N; ++i) acc = acc * x + c[i];
  return acc;
}

// Wichura (1988), AS 241 PPND16. Coefficients highest degree first.
constexpr double kCentralNum[] = {2.5090809287301226727e3, 3.3430575583588128105e4,
                                  6.7265770927008700853e4, 4.5921953931549871457e4,
                                  1.3731693765509461125e4, 1.9715909503065514427e3,
                                  1.3314166789178437745e2, 3.3871328727963666080e0};
constexpr double kCentralDen[] = {5.2264952788528545610e3, 2.8729085735721942674e4,
                                  3.9307895800092710610e4, 2.1213794301586595867e4,
                                  5.3941960214247511077e3, 6.8718700749205790830e2,
                                  4.2313330701600911252e1, 1.0};
constexpr double kNearNum[] = {7.74545014278341407640e-4, 2.27238449892691845833e-2,
                               2.41780725177450611770e-1, 1.27045825245236838258e0,
                               3.64784832476320460504e0,  5.76949722146069140550e0,
                               4.63033784615654529590e0,  1.42343711074968357734e0};
constexpr double kNearDen[] = {1.05075007164441684324e-9, 5.47593808499534494600e-4,
                               1.51986665636164571966e-2, 1.48103976427480074590e-1,
                               6.89767334985100004550e-1, 1.67638483018380384940e0,
                               2.05319162663775882187e0,  1.0};
constexpr double kFarNum[] = {2.01033439929228813265e-7, 2.71155556874348757815e-5,
                              1.24266094738807843860e-3, 2.65321895265761230930e-2,
                              2.96560571828504891230e-1, 1.78482653991729133580e0,
                              5.46378491116411436990e0,  6.65790464350110377720e0};
constexpr double kFarDen[] = {2.04426310338993978564e-15, 1.42151175831644588870e-7,
                              1.84631831751005468180e-5,  7.86869131145613259100e-4,
                              1.48753612908506148525e-2,  1.36929880922735805310e-1,
                              5.99832206555887937690e-1,  1.0};

// Uniform in (0, 1) from the top 53 bits.
double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Standard SplitMix64 stream started at splitmix64(seed); element i depends
// only on (seed, i), so chunked generation is worker-count independent.
std::vector<double> pseudo_offsets(std::size_t n, std::uint64_t seed) {
  std::vector<double> z(n);
  const std::uint64_t base = splitmix64(seed);
  parallel_for((n + kPseudoChunk - 1) / kPseudoChunk, [&](std::size_t c) {
    const std::size_t hi = std::min(n, (c + 1) * kPseudoChunk);
    for (std::size_t i = c * kPseudoChunk; i < hi; ++i) {
      z[i] = inv_norm_cdf(to_open_unit(splitmix64(base + i * 0x9E3779B97F4A7C15ull)));
    }
  });
  return z;
}

// First zeros of Airy's function Ai.
constexpr double kAiryZeros[] = {-2.338107410459767, -4.087949444130971, -5.520559828095551,
                                 -6.786708090071759};

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::gauss_hermite: return "gauss_hermite";
    case Method::halton_mc: return "halton_mc";
    case Method::pseudo_mc: return "pseudo_mc";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "gauss_hermite" || name == "gauss-hermite" || name == "gh") return Method::gauss_hermite;
  if (name == "halton_mc" || name == "halton-mc" || name == "halton") return Method::halton_mc;
  if (name == "pseudo_mc" || name == "pseudo-mc" || name == "pseudo") return Method::pseudo_mc;
  throw std::invalid_argument("unknown expectation method '" + name + "'");
}

void EngineConfig::validate() const {
  if (method == Method::gauss_hermite) {
    if (nodes < 2 || nodes > static_cast<std::size_t>(kMaxHermiteNodes)) {
      throw std::invalid_argument("gauss_hermite needs 2 <= nodes <= 200");
    }
  } else if (nodes < 1) {
    throw std::invalid_argument("Monte-Carlo engines need at least one draw");
  }
  if (method == Method::halton_mc) {
    if (halton_base < 2) throw std::invalid_argument("halton_base must be a prime >= 2");
    for (unsigned d = 2; d * d <= halton_base; ++d) {
      if (halton_base % d == 0) throw std::invalid_argument("halton_base must be prime");
    }
  }
}

HermiteRule gauss_hermite_rule(int n) {
  if (n < 1 || n > kMaxHermiteNodes) {
    throw std::invalid_argument("Gauss-Hermite rule needs 1 <= n <= 200");
  }
  const double pim4 = 1.0 / std::sqrt(std::sqrt(std::numbers::pi));
  HermiteRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  std::vector<double> x(n), w(n);

  // Newton on the orthonormal Hermite recurrence, largest root first.
  const double edge_scale = std::pow(2.0 * n + 1, -1.0 / 6.0) / std::numbers::sqrt2;
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1) - 1.85575 * std::pow(2.0 * n + 1, -0.16667);
    } else if (i < 4) {
      // Edge roots are spaced like the zeros of Airy's function.
      z = x[i - 1] - (kAiryZeros[i - 1] - kAiryZeros[i]) * edge_scale;
    } else {
      z = 2.0 * z - x[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double step = p1 / pp;
      z -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[i] = z;
    w[i] = 2.0 / (pp * pp);
  }
  for (int i = 0; i < m; ++i) {
    // x[i] holds the i-th largest root.
    rule.nodes[n - 1 - i] = x[i];
    rule.nodes[i] = -x[i];
    rule.weights[n - 1 - i] = w[i];
    rule.weights[i] = w[i];
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

double halton(std::uint64_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0;
  const double inv = 1.0 / base;
  while (index > 0) {
    f *= inv;
    result += f * static_cast<double>(index % base);
    index /= base;
  }
  return result;
}

double inv_norm_cdf(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    std::ostringstream msg;
    msg << "inv_norm_cdf domain error: u = " << u << " not in (0, 1)";
    throw std::domain_error(msg.str());
  }
  const double q = u - 0.5;
  if (std::abs(q) < 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner(kCentralNum, r) / horner(kCentralDen, r);
  }
  double r = q < 0.0 ? u : 1.0 - u;
  r = std::sqrt(-std::log(r));
  double x;
  if (r < 5.0) {
    r -= 1.6;
    x = horner(kNearNum, r) / horner(kNearDen, r);
  } else {
    r -= 5.0;
    x = horner(kFarNum, r) / horner(kFarDen, r);
  }
  return q < 0.0 ? -x : x;
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

ExpectationEngine::ExpectationEngine(EngineConfig config) : config_(config) {
  config_.validate();
  const std::size_t n = config_.nodes;
  std::vector<double> z;
  std::vector<double> w;
  switch (config_.method) {
    case Method::gauss_hermite: {
      HermiteRule rule = gauss_hermite_rule(static_cast<int>(n));
      z.resize(n);
      w.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        z[i] = std::numbers::sqrt2 * rule.nodes[i];
        w[i] = rule.weights[i] / std::sqrt(std::numbers::pi);
      }
      break;
    }
    case Method::halton_mc: {
      z.resize(n);
      const std::uint64_t skip = config_.halton_skip;
      const unsigned base = config_.halton_base;
      parallel_for((n + kPseudoChunk - 1) / kPseudoChunk, [&](std::size_t c) {
        const std::size_t hi = std::min(n, (c + 1) * kPseudoChunk);
        for (std::size_t i = c * kPseudoChunk; i < hi; ++i) {
          z[i] = inv_norm_cdf(halton(skip + i + 1, base));
        }
      });
      w.assign(n, 1.0 / static_cast<double>(n));
      break;
    }
    case Method::pseudo_mc:
      z = pseudo_offsets(n, config_.seed);
      w.assign(n, 1.0 / static_cast<double>(n));
      break;
  }
  offsets_ = std::make_shared<const std::vector<double>>(std::move(z));
  weights_ = std::make_shared<const std::vector<double>>(std::move(w));
}

Estimate ExpectationEngine::expect_with_error(const std::function<double(double)>& f,
                                              double g) const {
  return integrate<1>([&](double x) { return std::array<double, 1>{f(x)}; }, g)[0];
}

double ExpectationEngine::expect(const std::function<double(double)>& f, double g) const {
  return expect_with_error(f, g).value;
}

void ExpectationEngine::throw_non_finite(double abscissa) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "non-finite integrand value at abscissa " << abscissa;
  throw IntegrationError(msg.str(), abscissa);
}

double expect_normal(const std::function<double(double)>& f, double g,
                     const ExpectationEngine& engine) {
  return engine.expect(f, g);
}

}  // namespace msecomb
