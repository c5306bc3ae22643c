#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "ana/noise.hpp"

namespace ana {

/// Iterations [start, end] over which a layer's noise shrinks from its initial
/// parameters to the Dirac's delta.
struct AnnealingRange {
  std::int64_t start = 0;
  std::int64_t end = 1;

  /// Throws ConfigError unless 0 ≤ start < end (and end ≤ total when total ≥ 0).
  void validate(std::int64_t total_iterations = -1) const;

  friend bool operator==(const AnnealingRange&, const AnnealingRange&) = default;
};

/// clamp((end − t) / (end − start), 0, 1).
double lambda_at(const AnnealingRange& range, std::int64_t t);

/// Noise evolution of one quantised layer:
///   α(t) = c_α·λ(t)^{d_α}   (α = 0 when static_mean)
///   β(t) = c_β·λ(t)^{d_β}   (β = c_β when static_variance)
struct LayerScheduleSpec {
  AnnealingRange range{};
  double c_alpha = 0.0;
  double c_beta = 1.0;
  int d_alpha = 1;
  int d_beta = 1;
  bool static_mean = true;
  bool static_variance = false;

  void validate(std::int64_t total_iterations = -1) const;
  bool is_static() const noexcept { return static_mean && static_variance; }
};

NoiseParams params_at(const LayerScheduleSpec& spec, std::int64_t t);

enum class DecayInterval { same_start, same_end, partition, overlapped };
enum class DecayPowerLaw { homogeneous, progressive };

std::string_view to_string(DecayInterval interval);
std::string_view to_string(DecayPowerLaw law);
DecayInterval parse_decay_interval(std::string_view name);
DecayPowerLaw parse_decay_power_law(std::string_view name);

struct ScheduleStrategy {
  DecayInterval decay_interval = DecayInterval::partition;
  DecayPowerLaw decay_power_law = DecayPowerLaw::homogeneous;

  friend bool operator==(const ScheduleStrategy&, const ScheduleStrategy&) = default;
};

/// One spec per quantised layer, index 0 nearest the input. The floating-point
/// output layer has no entry.
using Schedule = std::vector<LayerScheduleSpec>;

/// Lays out annealing ranges over [0, t_anneal] for `layers` quantised layers
/// (slice = t_anneal/L, integer-floored at the boundaries):
///   same_start  [0, ℓ·slice]
///   same_end    [(L−ℓ)·slice, t_anneal]
///   partition   [(ℓ−1)·slice, ℓ·slice]
///   overlapped  [0, t_anneal]
/// Exponents: homogeneous copies the template's d_α, d_β; progressive uses
/// d = max(1, L − ℓ). Everything else is copied from `base`.
/// Throws ConfigError for layers < 2 or t_anneal < layers.
Schedule build_schedule(const ScheduleStrategy& strategy, std::size_t layers, std::int64_t t_anneal,
                        const LayerScheduleSpec& base);

}  // namespace ana
