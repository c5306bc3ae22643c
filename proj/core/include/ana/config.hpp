#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ana/convergence.hpp"
#include "ana/dataset.hpp"
#include "ana/network.hpp"
#include "ana/noise.hpp"
#include "ana/quantiser.hpp"
#include "ana/schedule.hpp"
#include "ana/trainer.hpp"

namespace ana {

enum class QuantiserKind { heaviside, binary, ternary, linear };

/// Quantiser description as written in a config file.
///   heaviside: levels {0, 1}, threshold `offset`·quantum
///   binary:    levels {−quantum, quantum}
///   ternary:   levels {−quantum, 0, quantum}
///   linear:    B-bit linear quantiser with offset z and quantum ε
struct QuantiserConfig {
  QuantiserKind kind = QuantiserKind::ternary;
  double quantum = 1.0;
  std::int64_t offset = 0;
  int bits = 2;

  Quantiser build() const;
};

struct NetworkConfig {
  std::vector<std::size_t> hidden{16, 16, 16};
  QuantiserConfig feature{};
  /// nullopt: weights stay real.
  std::optional<QuantiserConfig> weight = QuantiserConfig{};
};

struct NoiseConfig {
  /// One family for every quantised layer, or one per layer.
  std::vector<NoiseFamily> families{NoiseFamily::uniform};
  /// When set, c_alpha and c_beta describe this compact family and are
  /// converted to the 95%-equivalent parameters of `families`.
  std::optional<NoiseFamily> equivalent_to{};
  double c_alpha = 0.0;
  double c_beta = 1.0;
  bool static_mean = true;
  bool static_variance = false;

  NoiseFamily family_for(std::size_t layer) const;
};

struct ScheduleConfig {
  ScheduleStrategy strategy{};
  /// Fraction of the training iterations over which annealing takes place.
  double anneal_fraction = 0.7;
  int d_alpha = 1;
  int d_beta = 1;
};

enum class RegcurvePreset { none, clipped_relu, hard_sigmoid };

struct RegcurveConfig {
  RegcurvePreset preset = RegcurvePreset::none;
  QuantiserConfig quantiser{QuantiserKind::heaviside};
  NoiseFamily family = NoiseFamily::uniform;
  double alpha = 0.0;
  double beta = 1.0;
  double x_min = -2.0;
  double x_max = 2.0;
  double step = 1e-2;

  /// Activation after applying the preset, if any.
  RegularisedActivation activation() const;
  /// x_min, x_min + step, ... up to x_max (inclusive within half a step).
  std::vector<double> grid() const;
};

/// How layer λ_ℓ follows the global λ in `check`.
enum class LambdaLawKind { synchronized, input_first, same_end };

struct CheckConfig {
  NoiseFamily family = NoiseFamily::logistic;
  std::size_t layers = 3;
  double c_alpha = -1.0;
  double alpha_power = 0.5;
  double c_beta = 1.0;
  double beta_power = 1.0;
  LambdaLawKind law = LambdaLawKind::synchronized;
  /// Global λ at which the last layer starts annealing under `same_end`.
  double lambda_min = 0x1.0p-20;
  double epsilon = 1.0;
  double tolerance = 1e-2;
  int grid_from = 1;
  int grid_to = 20;
  /// Empty: search {1/4, 1/2, 1, 2} for every layer.
  std::vector<double> rates{};
  /// Random Heaviside network used for the measured error ratios.
  std::size_t width = 4;
  std::size_t inputs = 2;

  std::vector<RegulariserLaw> laws() const;
};

struct SweepConfig {
  std::vector<DecayInterval> decay_intervals{DecayInterval::same_start, DecayInterval::same_end,
                                             DecayInterval::partition, DecayInterval::overlapped};
  std::vector<DecayPowerLaw> decay_power_laws{DecayPowerLaw::homogeneous};
  std::vector<ForwardStrategy> strategies{ForwardStrategy::mode};
  std::size_t seeds = 5;
  bool include_static_baseline = true;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  NetworkConfig network{};
  NoiseConfig noise{};
  ScheduleConfig schedule{};
  TrainConfig training{};
  DatasetSpec dataset{};
  std::filesystem::path output = "out";
  RegcurveConfig regcurve{};
  CheckConfig check{};
  SweepConfig sweep{};

  /// Non-fatal remarks collected while parsing.
  std::vector<std::string> warnings{};

  /// Replaces the experiment seed; the dataset follows unless its seed was
  /// set explicitly.
  void override_seed(std::uint64_t value);
  /// Throws ConfigError listing every violation.
  void validate() const;

 private:
  friend ExperimentConfig parse_config_text(const std::string& text);
  bool dataset_seed_explicit_ = false;
};

/// Parses sectioned key = value text. Unknown sections or keys, malformed
/// values and invariant violations are all reported together in one
/// ConfigError.
ExperimentConfig parse_config_text(const std::string& text);
/// Throws ConfigError if the file cannot be read.
ExperimentConfig parse_config(const std::filesystem::path& path);

/// Schedule template for the noise section.
LayerScheduleSpec schedule_template(const ExperimentConfig& config);

/// Quantised MLP described by the config, with per-layer noise families.
Network build_network(const ExperimentConfig& config, std::size_t inputs, std::size_t outputs);

/// Per-layer schedule of the training run; static noise when both
/// static_mean and static_variance are set.
Schedule build_training_schedule(const ExperimentConfig& config, const ScheduleStrategy& strategy,
                                 std::int64_t total_iterations);

}  // namespace ana
