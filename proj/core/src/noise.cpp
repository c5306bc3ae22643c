#include "ana/noise.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ana/errors.hpp"
#include "ana/quantiser.hpp"
#include "ana/roots.hpp"

namespace ana {

namespace {

constexpr double kSqrt3 = std::numbers::sqrt3;
const double kSqrt6 = std::sqrt(6.0);

void require_positive_stddev(const NoiseParams& p, const char* what) {
  if (p.is_dirac()) throw DegenerateDistributionError(std::string(what) + ": undefined for a Dirac distribution");
}

/// CDF of the family standardised to mean 0, the given std, evaluated at u.
double centred_cdf(NoiseFamily family, double stddev, double u) {
  switch (family) {
    case NoiseFamily::uniform: {
      const double h = kSqrt3 * stddev;
      if (u <= -h) return 0.0;
      if (u >= h) return 1.0;
      return (u + h) / (2.0 * h);
    }
    case NoiseFamily::triangular: {
      const double r = u / (kSqrt6 * stddev);
      if (r <= -1.0) return 0.0;
      if (r >= 1.0) return 1.0;
      if (r < 0.0) return 0.5 * (1.0 + r) * (1.0 + r);
      return 1.0 - 0.5 * (1.0 - r) * (1.0 - r);
    }
    case NoiseFamily::normal:
      return 0.5 * std::erfc(-u / (stddev * std::numbers::sqrt2));
    case NoiseFamily::logistic: {
      const double z = u / logistic_scale(stddev);
      if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
      const double e = std::exp(z);
      return e / (1.0 + e);
    }
  }
  return 0.0;
}

}  // namespace

std::string_view to_string(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::uniform: return "uniform";
    case NoiseFamily::triangular: return "triangular";
    case NoiseFamily::normal: return "normal";
    case NoiseFamily::logistic: return "logistic";
  }
  return "unknown";
}

NoiseFamily parse_noise_family(std::string_view name) {
  if (name == "uniform") return NoiseFamily::uniform;
  if (name == "triangular") return NoiseFamily::triangular;
  if (name == "normal") return NoiseFamily::normal;
  if (name == "logistic") return NoiseFamily::logistic;
  throw ConfigError("unknown noise family '" + std::string(name) + "'");
}

bool has_compact_support(NoiseFamily family) {
  return family == NoiseFamily::uniform || family == NoiseFamily::triangular;
}

void NoiseParams::validate() const {
  std::vector<std::string> errors;
  if (!std::isfinite(mean)) errors.emplace_back("noise mean must be finite");
  if (!std::isfinite(stddev) || stddev < 0.0) errors.emplace_back("noise stddev must be finite and non-negative");
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

double logistic_scale(double stddev) { return stddev * kSqrt3 / std::numbers::pi; }

double pdf(NoiseFamily family, const NoiseParams& p, double x) {
  require_positive_stddev(p, "pdf");
  const double u = x - p.mean;
  const double beta = p.stddev;
  switch (family) {
    case NoiseFamily::uniform: {
      const double h = kSqrt3 * beta;
      return (u >= -h && u <= h) ? 1.0 / (2.0 * h) : 0.0;
    }
    case NoiseFamily::triangular: {
      const double a = kSqrt6 * beta;
      if (u < -a || u >= a) return 0.0;
      return (u < 0.0 ? u + a : a - u) / (6.0 * beta * beta);
    }
    case NoiseFamily::normal: {
      const double z = u / beta;
      return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * beta);
    }
    case NoiseFamily::logistic: {
      const double s = logistic_scale(beta);
      const double e = std::exp(-std::abs(u) / s);
      return e / (s * (1.0 + e) * (1.0 + e));
    }
  }
  return 0.0;
}

double cdf(NoiseFamily family, const NoiseParams& p, double x) {
  if (p.is_dirac()) return heaviside(p.mean, x);
  return centred_cdf(family, p.stddev, x - p.mean);
}

double ccdf(NoiseFamily family, const NoiseParams& p, double x) {
  if (p.is_dirac()) return 1 - heaviside(p.mean, x);
  return centred_cdf(family, p.stddev, p.mean - x);
}

double max_pdf(NoiseFamily family, const NoiseParams& p) { return pdf(family, p, p.mean); }

double support_half_width(NoiseFamily family, const NoiseParams& p) {
  switch (family) {
    case NoiseFamily::uniform: return kSqrt3 * p.stddev;
    case NoiseFamily::triangular: return kSqrt6 * p.stddev;
    case NoiseFamily::normal:
    case NoiseFamily::logistic: return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

double sample(NoiseFamily family, const NoiseParams& p, Rng& rng) {
  if (p.is_dirac()) return p.mean;
  const double beta = p.stddev;
  switch (family) {
    case NoiseFamily::uniform:
      return p.mean + kSqrt3 * beta * (2.0 * uniform01(rng) - 1.0);
    case NoiseFamily::triangular: {
      const double u = uniform01(rng);
      const double r = u < 0.5 ? std::sqrt(2.0 * u) - 1.0 : 1.0 - std::sqrt(2.0 * (1.0 - u));
      return p.mean + kSqrt6 * beta * r;
    }
    case NoiseFamily::normal: {
      // Box-Muller, one variate per call.
      const double u1 = 1.0 - uniform01(rng);
      const double u2 = uniform01(rng);
      return p.mean + beta * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    case NoiseFamily::logistic: {
      const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
      return p.mean + logistic_scale(beta) * std::log(u / (1.0 - u));
    }
  }
  return p.mean;
}

NoiseParams equivalent_params(NoiseFamily target, NoiseFamily compact, const NoiseParams& p) {
  if (!has_compact_support(compact) || has_compact_support(target)) {
    throw ConfigError("equivalent_params maps a compact family (uniform, triangular) to a non-compact one "
                      "(normal, logistic); got " + std::string(to_string(compact)) + " -> " +
                      std::string(to_string(target)));
  }
  p.validate();
  const double half_width = support_half_width(compact, p);
  if (target == NoiseFamily::logistic) {
    // 2F(h/s) − 1 = 0.95  ⇔  h/s = ln 39.
    const double scale = half_width / std::log(39.0);
    return {p.mean, scale * std::numbers::pi / kSqrt3};
  }
  // Φ(z) = 0.975 solved on the standard normal.
  const double z = bisect([](double v) { return 0.5 * std::erfc(-v / std::numbers::sqrt2) - 0.975; }, 0.0, 10.0,
                          1e-15);
  return {p.mean, half_width / z};
}

}  // namespace ana
