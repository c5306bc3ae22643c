#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ana/network.hpp"
#include "ana/noise.hpp"
#include "ana/regulariser.hpp"

namespace ana {

/// Maps the global regularisation parameter λ to a layer's own λ_ℓ:
///   λ_ℓ(λ) = min(1, λ/start)^exponent.
/// start = 1, exponent = 1 is the identity; a start below the smallest grid
/// value keeps the layer at λ_ℓ = 1 for the whole grid.
struct LambdaLaw {
  double start = 1.0;
  double exponent = 1.0;

  double at(double lambda) const;
};

/// A regularised Heaviside H⁺_0 whose noise follows
///   α(λ_ℓ) = c_α·λ_ℓ^{alpha_power},  β(λ_ℓ) = c_β·λ_ℓ^{beta_power}.
/// c_α may be negative (mean drifting below zero).
struct RegulariserLaw {
  NoiseFamily family = NoiseFamily::logistic;
  LambdaLaw lambda_law{};
  double c_alpha = 0.0;
  double alpha_power = 1.0;
  double c_beta = 1.0;
  double beta_power = 1.0;

  double layer_lambda(double lambda) const { return lambda_law.at(lambda); }
  NoiseParams params_at(double lambda) const;
  RegularisedActivation activation_at(double lambda) const;
};

/// r_ℓ(λ) = λ_ℓ(λ)^{p_ℓ}: each rate is a power of the layer's own λ_ℓ.
struct ConvergenceRate {
  std::vector<double> exponents;

  double at(const RegulariserLaw& law, std::size_t layer, double lambda) const;
};

/// 2^{-from}, ..., 2^{-to}.
std::vector<double> dyadic_grid(int from = 1, int to = 20);

/// x with expectation_forward(a, x) = y, by bisection to 1e−12 in x.
/// Throws UnsupportedFamilyError unless the family is normal or logistic with
/// β > 0, and DomainError unless y lies strictly between the extreme levels.
double invert_regulariser(const RegularisedActivation& a, double y);

enum class Condition {
  lambda_vanishes,      // λ_ℓ → 0
  pointwise,            // σ_λℓ → H⁺_0 pointwise
  strictly_increasing,  // σ_λℓ strictly increasing
  unit_range,           // 0 ≤ σ_λℓ ≤ 1
  h_i,                  // |σ⁻¹(ε r_ℓ)| → 0
  h_ii,                 // |σ⁻¹(1 − ε r_ℓ)| → 0
  h_iii,                // (1 − σ(0)) / r_ℓ → 0
  h_iv,                 // r_{ℓ−1} / |σ_ℓ⁻¹(1 − ε r_ℓ)| → 0, ℓ ≥ 2
};

std::string_view to_string(Condition c);

/// One condition evaluated along the grid for one layer (0-based).
struct ConditionTrend {
  Condition condition = Condition::h_i;
  std::size_t layer = 0;
  std::vector<double> values;
  bool eligible = true;
  bool pass = false;
  std::string note;
};

struct HypothesisReport {
  std::vector<double> grid;
  double epsilon = 1.0;
  double tolerance = 1e-2;
  std::vector<ConditionTrend> trends;

  const ConditionTrend* find(std::size_t layer, Condition c) const;
  /// True when every trend of condition c passes (vacuously true if none).
  bool passed(Condition c) const;
  /// True when every structural and rate condition passes.
  bool passed() const;
};

struct CheckOptions {
  double epsilon = 1.0;
  double tolerance = 1e-2;
};

/// A trend passes when it is non-increasing over the trailing half of the grid
/// and its last value is below `tolerance`.
bool trend_vanishes(std::span<const double> values, double tolerance);

/// Evaluates the structural and rate hypotheses of compositional convergence
/// along a strictly decreasing positive grid. Compact-support families are
/// reported as ineligible. Throws ConfigError for an empty or non-decreasing
/// grid, ShapeError when rates and laws disagree in length.
HypothesisReport check_hypotheses(std::span<const RegulariserLaw> laws, const ConvergenceRate& rates,
                                  std::span<const double> grid, const CheckOptions& options = {});

/// Exhaustive search over per-layer exponents drawn from `candidates`; returns
/// the first (lexicographic) assignment under which every condition passes.
std::optional<ConvergenceRate> search_rates(std::span<const RegulariserLaw> laws, std::span<const double> grid,
                                            const CheckOptions& options = {},
                                            std::span<const double> candidates = {});

struct RatioMeasurement {
  std::vector<double> grid;
  /// ‖x_{λ̂,ℓ} − x_ℓ‖ for every layer, indexed [grid][layer].
  std::vector<std::vector<double>> errors;
  /// errors / r_ℓ(λ) for the quantised layers, indexed [grid][quantised layer].
  std::vector<std::vector<double>> ratios;
};

/// Regularised (expectation) vs quantised features of one input along the
/// grid. The k-th quantised layer of `net` takes its noise from laws[k].
/// Throws ShapeError when counts disagree.
RatioMeasurement measure_ratio(const Network& net, const Vector& x0, std::span<const RegulariserLaw> laws,
                               const ConvergenceRate& rates, std::span<const double> grid);

}  // namespace ana
