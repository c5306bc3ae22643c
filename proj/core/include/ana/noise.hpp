#pragma once

#include <string_view>

#include "ana/rng.hpp"

namespace ana {

/// Symmetric uni-modal noise families, all parametrised by mean and standard
/// deviation.
enum class NoiseFamily { uniform, triangular, normal, logistic };

std::string_view to_string(NoiseFamily family);
/// Throws ConfigError for an unknown name.
NoiseFamily parse_noise_family(std::string_view name);

/// True for families with bounded support (uniform, triangular).
bool has_compact_support(NoiseFamily family);

/// Mean α and standard deviation β. β = 0 is the Dirac's delta at α.
struct NoiseParams {
  double mean = 0.0;
  double stddev = 0.0;

  bool is_dirac() const noexcept { return stddev == 0.0; }
  /// Throws ConfigError for negative or non-finite values.
  void validate() const;

  friend bool operator==(const NoiseParams&, const NoiseParams&) = default;
};

/// Density at x. Throws DegenerateDistributionError when β = 0.
double pdf(NoiseFamily family, const NoiseParams& p, double x);

/// P(ν ≤ x). For β = 0 this is heaviside(α, x).
double cdf(NoiseFamily family, const NoiseParams& p, double x);

/// P(ν > x), computed without cancellation in the upper tail.
double ccdf(NoiseFamily family, const NoiseParams& p, double x);

/// Supremum of the density (its value at the mean). Requires β > 0.
double max_pdf(NoiseFamily family, const NoiseParams& p);

/// Half-width of the support; +∞ for normal and logistic.
double support_half_width(NoiseFamily family, const NoiseParams& p);

/// One draw ν ~ μ(α, β); always α when β = 0 (no engine state consumed).
double sample(NoiseFamily family, const NoiseParams& p, Rng& rng);

/// Logistic scale s for standard deviation β: s = β√3/π.
double logistic_scale(double stddev);

/// Parameters of the non-compact `target` family that has the same mean as
/// `compact` and places exactly 95% of its mass inside the compact support.
/// Throws ConfigError unless target ∈ {normal, logistic} and
/// compact ∈ {uniform, triangular}.
NoiseParams equivalent_params(NoiseFamily target, NoiseFamily compact,
                              const NoiseParams& p);

}  // namespace ana
