#include "ana/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ana/errors.hpp"

namespace ana {

void AnnealingRange::validate(std::int64_t total_iterations) const {
  if (start < 0 || start >= end) {
    throw ConfigError("annealing range needs 0 <= start < end, got [" + std::to_string(start) + ", " +
                      std::to_string(end) + "]");
  }
  if (total_iterations >= 0 && end > total_iterations) {
    throw ConfigError("annealing range end " + std::to_string(end) + " exceeds total iterations " +
                      std::to_string(total_iterations));
  }
}

double lambda_at(const AnnealingRange& range, std::int64_t t) {
  range.validate();
  const double r = static_cast<double>(range.end - t) / static_cast<double>(range.end - range.start);
  return std::clamp(r, 0.0, 1.0);
}

void LayerScheduleSpec::validate(std::int64_t total_iterations) const {
  std::vector<std::string> errors;
  try {
    range.validate(total_iterations);
  } catch (const ConfigError& e) {
    errors.emplace_back(e.what());
  }
  if (!(c_beta > 0.0) || !std::isfinite(c_beta)) errors.emplace_back("c_beta must be positive");
  if (!(c_alpha >= 0.0) || !std::isfinite(c_alpha)) errors.emplace_back("c_alpha must be non-negative");
  if (static_mean && c_alpha != 0.0) errors.emplace_back("static_mean requires c_alpha = 0");
  if (d_alpha < 1 || d_beta < 1) errors.emplace_back("decay exponents must be integers >= 1");
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

NoiseParams params_at(const LayerScheduleSpec& spec, std::int64_t t) {
  if (spec.is_static()) return {0.0, spec.c_beta};
  const double lambda = lambda_at(spec.range, t);
  NoiseParams p;
  p.mean = spec.static_mean ? 0.0 : spec.c_alpha * std::pow(lambda, spec.d_alpha);
  p.stddev = spec.static_variance ? spec.c_beta : spec.c_beta * std::pow(lambda, spec.d_beta);
  return p;
}

std::string_view to_string(DecayInterval interval) {
  switch (interval) {
    case DecayInterval::same_start: return "same_start";
    case DecayInterval::same_end: return "same_end";
    case DecayInterval::partition: return "partition";
    case DecayInterval::overlapped: return "overlapped";
  }
  return "unknown";
}

std::string_view to_string(DecayPowerLaw law) {
  return law == DecayPowerLaw::homogeneous ? "homogeneous" : "progressive";
}

DecayInterval parse_decay_interval(std::string_view name) {
  if (name == "same_start") return DecayInterval::same_start;
  if (name == "same_end") return DecayInterval::same_end;
  if (name == "partition") return DecayInterval::partition;
  if (name == "overlapped") return DecayInterval::overlapped;
  throw ConfigError("unknown decay interval '" + std::string(name) + "'");
}

DecayPowerLaw parse_decay_power_law(std::string_view name) {
  if (name == "homogeneous") return DecayPowerLaw::homogeneous;
  if (name == "progressive") return DecayPowerLaw::progressive;
  throw ConfigError("unknown decay power law '" + std::string(name) + "'");
}

Schedule build_schedule(const ScheduleStrategy& strategy, std::size_t layers, std::int64_t t_anneal,
                        const LayerScheduleSpec& base) {
  if (layers < 2) throw ConfigError("a schedule needs at least two quantised layers");
  const auto count = static_cast<std::int64_t>(layers);
  if (t_anneal < count) throw ConfigError("annealing horizon must be at least one iteration per layer");

  auto boundary = [&](std::int64_t k) { return k * t_anneal / count; };

  Schedule out;
  out.reserve(layers);
  for (std::int64_t l = 1; l <= count; ++l) {
    LayerScheduleSpec spec = base;
    switch (strategy.decay_interval) {
      case DecayInterval::same_start: spec.range = {0, boundary(l)}; break;
      case DecayInterval::same_end: spec.range = {boundary(count - l), t_anneal}; break;
      case DecayInterval::partition: spec.range = {boundary(l - 1), boundary(l)}; break;
      case DecayInterval::overlapped: spec.range = {0, t_anneal}; break;
    }
    if (strategy.decay_power_law == DecayPowerLaw::progressive) {
      const int d = static_cast<int>(std::max<std::int64_t>(1, count - l));
      spec.d_alpha = d;
      spec.d_beta = d;
    }
    out.push_back(spec);
  }
  return out;
}

}  // namespace ana
