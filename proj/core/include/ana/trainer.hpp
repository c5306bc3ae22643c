#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ana/errors.hpp"
#include "ana/network.hpp"
#include "ana/schedule.hpp"

namespace ana {

/// Features stored one sample per column, with integer class labels.
struct Dataset {
  Matrix features;  // dims × N
  std::vector<int> labels;
  std::size_t classes = 2;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dims() const noexcept { return static_cast<std::size_t>(features.rows()); }
  /// Throws ShapeError on inconsistent sizes or out-of-range labels.
  void validate() const;
};

enum class OptimiserKind { sgd, adam };

struct OptimiserConfig {
  OptimiserKind kind = OptimiserKind::adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct LearningRateDrop {
  std::int64_t epoch = 0;  // first epoch (1-based) using the dropped rate
  double factor = 0.1;
};

struct TrainConfig {
  std::int64_t epochs = 1;
  std::size_t batch_size = 1;
  double learning_rate = 1e-3;
  std::optional<LearningRateDrop> lr_drop{};
  OptimiserConfig optimiser{};
  std::uint64_t seed = 0;
  ForwardStrategy strategy = ForwardStrategy::mode;
  /// Skip backpropagation upstream of the deepest annealed quantiser.
  bool stop_backward_at_annealed = false;
  /// Iterations already completed when resuming: schedule lookups use
  /// t = start_iteration + 1, ... while the optimiser step count restarts at 1.
  std::int64_t start_iteration = 0;

  /// Throws ConfigError listing every violation.
  void validate() const;
  /// Iterations for a training set of n samples: epochs · ⌈n / batch⌉.
  std::int64_t total_iterations(std::size_t n) const;
};

/// Rejects configurations the training loop cannot honour, notably the
/// expectation strategy combined with static variance.
void validate_training_setup(const Network& net, const Schedule& schedule, const TrainConfig& config);

struct EpochRecord {
  std::int64_t epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy_regularised = 0.0;
  double val_accuracy_quantised = 0.0;
  std::vector<NoiseParams> noise;  // per quantised layer, at the epoch's last iteration
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
};

/// Thrown when the loss stops being finite; carries the log up to the failure.
class TrainingAborted : public NumericError {
 public:
  TrainingAborted(const std::string& message, TrainLog partial)
      : NumericError(message), partial_(std::move(partial)) {}
  const TrainLog& partial_log() const noexcept { return partial_; }

 private:
  TrainLog partial_;
};

struct CrossEntropy {
  double loss = 0.0;
  Vector gradient;  // softmax(logits) − one_hot(label)
};

/// Softmax cross-entropy with log-sum-exp stabilisation. Throws DomainError
/// for an out-of-range label.
CrossEntropy cross_entropy(const Vector& logits, std::size_t label);

/// θ ← θ − η·g.
void sgd_step(std::span<double> params, std::span<const double> grads, double learning_rate);

/// Adam with bias-corrected moments, one state slot per parameter.
class Adam {
 public:
  explicit Adam(OptimiserConfig config = {}) : config_(config) {}
  /// `slot` identifies the parameter tensor; `t` is the 1-based step count.
  void step(std::size_t slot, std::span<double> params, std::span<const double> grads, double learning_rate,
            std::int64_t t);

 private:
  struct Moments {
    std::vector<double> m;
    std::vector<double> v;
  };
  OptimiserConfig config_;
  std::vector<Moments> state_;
};

/// Looks up the schedule for the quantised layer with index `quantised_index`
/// at iteration t and installs it in that layer (feature and weight noise).
/// Returns nullopt, changing nothing, for layers without a schedule entry.
std::optional<NoiseParams> set_noise(Network& net, const Schedule& schedule, std::size_t quantised_index,
                                     std::int64_t t);

struct TrainResult {
  Network network;
  TrainLog log;
};

/// Runs the annealing training loop: for t = 1..T, install scheduled noise in
/// every layer, forward with the configured strategy, backpropagate the mean
/// minibatch cross-entropy, update. Weights are initialised from the seed.
/// Throws TrainingAborted on a non-finite loss.
TrainResult train(Network net, const Schedule& schedule, const Dataset& train_set, const Dataset& validation,
                  const TrainConfig& config);

/// Same loop without re-initialising the weights of `net`.
TrainResult train_from(Network net, const Schedule& schedule, const Dataset& train_set, const Dataset& validation,
                       const TrainConfig& config);

/// Fraction of correctly classified samples.
double accuracy(const Network& net, const Dataset& data, ForwardMode mode, std::span<Rng> rngs = {});

}  // namespace ana
