#include "ana/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ana {

namespace {

// Stream ids derived from the master seed.
constexpr std::uint64_t kShuffleStream = 0;
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kSamplingStreamBase = 0x100;
constexpr std::uint64_t kEvalStreamBase = 0x200;

std::vector<Rng> layer_streams(std::uint64_t seed, std::uint64_t base, std::size_t depth) {
  std::vector<Rng> rngs;
  rngs.reserve(depth);
  for (std::size_t i = 0; i < depth; ++i) rngs.push_back(make_stream(seed, base + i));
  return rngs;
}

std::size_t argmax(const Matrix& logits, Eigen::Index col) {
  Eigen::Index best = 0;
  logits.col(col).maxCoeff(&best);
  return static_cast<std::size_t>(best);
}

}  // namespace

void Dataset::validate() const {
  if (static_cast<std::size_t>(features.cols()) != labels.size())
    throw ShapeError("dataset has " + std::to_string(features.cols()) + " samples but " +
                     std::to_string(labels.size()) + " labels");
  for (int y : labels)
    if (y < 0 || static_cast<std::size_t>(y) >= classes) throw ShapeError("dataset label out of range");
}

void TrainConfig::validate() const {
  std::vector<std::string> errors;
  if (epochs < 1) errors.emplace_back("epochs must be >= 1");
  if (batch_size < 1) errors.emplace_back("batch_size must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) errors.emplace_back("learning_rate must be finite and >= 0");
  if (lr_drop && (lr_drop->epoch < 1 || !(lr_drop->factor > 0.0)))
    errors.emplace_back("lr_drop needs epoch >= 1 and a positive factor");
  if (start_iteration < 0) errors.emplace_back("start_iteration must be >= 0");
  if (optimiser.kind == OptimiserKind::adam) {
    if (!(optimiser.beta1 >= 0.0 && optimiser.beta1 < 1.0)) errors.emplace_back("adam beta1 must be in [0, 1)");
    if (!(optimiser.beta2 >= 0.0 && optimiser.beta2 < 1.0)) errors.emplace_back("adam beta2 must be in [0, 1)");
    if (!(optimiser.epsilon > 0.0)) errors.emplace_back("adam epsilon must be positive");
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

std::int64_t TrainConfig::total_iterations(std::size_t n) const {
  const auto batches = static_cast<std::int64_t>((n + batch_size - 1) / batch_size);
  return epochs * batches;
}

void validate_training_setup(const Network& net, const Schedule& schedule, const TrainConfig& config) {
  config.validate();
  std::vector<std::string> errors;
  if (schedule.size() > net.quantised_layers().size())
    errors.emplace_back("schedule has more entries than the network has quantised layers");
  for (const auto& spec : schedule) {
    try {
      spec.validate();
    } catch (const ConfigError& e) {
      errors.emplace_back(e.what());
    }
    if (spec.static_variance && config.strategy == ForwardStrategy::expectation) {
      errors.emplace_back(
          "static variance cannot be combined with the expectation strategy: removing the noise at deployment "
          "changes the function the network learnt");
    }
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

CrossEntropy cross_entropy(const Vector& logits, std::size_t label) {
  if (label >= static_cast<std::size_t>(logits.size())) throw DomainError("cross_entropy: label out of range");
  const double top = logits.maxCoeff();
  const Vector shifted = logits.array() - top;
  const Vector e = shifted.array().exp();
  const double sum = e.sum();
  CrossEntropy out;
  out.loss = std::log(sum) - shifted(static_cast<Eigen::Index>(label));
  out.gradient = e / sum;
  out.gradient(static_cast<Eigen::Index>(label)) -= 1.0;
  return out;
}

void sgd_step(std::span<double> params, std::span<const double> grads, double learning_rate) {
  if (params.size() != grads.size()) throw ShapeError("sgd_step: size mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= learning_rate * grads[i];
}

void Adam::step(std::size_t slot, std::span<double> params, std::span<const double> grads, double learning_rate,
                std::int64_t t) {
  if (params.size() != grads.size()) throw ShapeError("adam step: size mismatch");
  if (t < 1) throw DomainError("adam step count starts at 1");
  if (slot >= state_.size()) state_.resize(slot + 1);
  auto& s = state_[slot];
  if (s.m.size() != params.size()) {
    s.m.assign(params.size(), 0.0);
    s.v.assign(params.size(), 0.0);
  }
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    s.m[i] = b1 * s.m[i] + (1.0 - b1) * grads[i];
    s.v[i] = b2 * s.v[i] + (1.0 - b2) * grads[i] * grads[i];
    const double m_hat = s.m[i] / c1;
    const double v_hat = s.v[i] / c2;
    params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
  }
}

std::optional<NoiseParams> set_noise(Network& net, const Schedule& schedule, std::size_t quantised_index,
                                     std::int64_t t) {
  if (quantised_index >= schedule.size()) return std::nullopt;
  const auto layers = net.quantised_layers();
  if (quantised_index >= layers.size()) return std::nullopt;
  const NoiseParams p = params_at(schedule[quantised_index], t);
  net.layer(layers[quantised_index]).noise = p;
  return p;
}

double accuracy(const Network& net, const Dataset& data, ForwardMode mode, std::span<Rng> rngs) {
  if (data.size() == 0) return 0.0;
  const auto features = net.evaluate(data.features, mode, rngs);
  const Matrix& logits = features.back();
  std::size_t correct = 0;
  for (Eigen::Index c = 0; c < logits.cols(); ++c)
    if (argmax(logits, c) == static_cast<std::size_t>(data.labels[static_cast<std::size_t>(c)])) ++correct;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

TrainResult train(Network net, const Schedule& schedule, const Dataset& train_set, const Dataset& validation,
                  const TrainConfig& config) {
  Rng init = make_stream(config.seed, kInitStream);
  net.init_uniform(init);
  return train_from(std::move(net), schedule, train_set, validation, config);
}

TrainResult train_from(Network net, const Schedule& schedule, const Dataset& train_set, const Dataset& validation,
                       const TrainConfig& config) {
  validate_training_setup(net, schedule, config);
  train_set.validate();
  validation.validate();
  if (train_set.size() == 0) throw ConfigError("training set is empty");
  if (train_set.dims() != net.input_size() || (validation.size() > 0 && validation.dims() != net.input_size()))
    throw ShapeError("dataset dimension does not match the network input");
  if (train_set.classes > net.output_size()) throw ShapeError("network has fewer outputs than classes");

  const std::size_t n = train_set.size();
  const std::size_t quantised = net.quantised_layers().size();
  Rng shuffle = make_stream(config.seed, kShuffleStream);
  auto sampling = layer_streams(config.seed, kSamplingStreamBase, net.depth());
  auto eval_rngs = layer_streams(config.seed, kEvalStreamBase, net.depth());
  const ForwardMode mode = ForwardMode::regularised(config.strategy);
  Adam adam(config.optimiser);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainLog log;
  std::int64_t step = 0;
  std::int64_t t = config.start_iteration;
  for (std::int64_t epoch = 1; epoch <= config.epochs; ++epoch) {
    double lr = config.learning_rate;
    if (config.lr_drop && epoch >= config.lr_drop->epoch) lr *= config.lr_drop->factor;

    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(shuffle, i)]);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t begin = 0; begin < n; begin += config.batch_size) {
      const std::size_t end = std::min(n, begin + config.batch_size);
      const auto batch = static_cast<Eigen::Index>(end - begin);
      ++step;
      ++t;
      for (std::size_t k = 0; k < quantised; ++k) set_noise(net, schedule, k, t);

      Matrix x(static_cast<Eigen::Index>(train_set.dims()), batch);
      for (Eigen::Index j = 0; j < batch; ++j) x.col(j) = train_set.features.col(static_cast<Eigen::Index>(order[begin + static_cast<std::size_t>(j)]));

      const Matrix* forward_out = nullptr;
      try {
        forward_out = &net.forward(x, mode, sampling).back();
      } catch (const NumericError& e) {
        throw TrainingAborted(std::string(e.what()) + " at iteration " + std::to_string(t), log);
      }
      const Matrix& logits = *forward_out;
      Matrix grad(logits.rows(), batch);
      for (Eigen::Index j = 0; j < batch; ++j) {
        const auto label = static_cast<std::size_t>(train_set.labels[order[begin + static_cast<std::size_t>(j)]]);
        auto ce = cross_entropy(logits.col(j), label);
        if (!std::isfinite(ce.loss)) {
          throw TrainingAborted("non-finite loss at iteration " + std::to_string(t), log);
        }
        loss_sum += ce.loss;
        if (argmax(logits, j) == label) ++correct;
        grad.col(j) = ce.gradient / static_cast<double>(batch);
      }

      const Gradients g = net.backward(grad, config.stop_backward_at_annealed);
      for (std::size_t i = 0; i < net.depth(); ++i) {
        auto& layer = net.layer(i);
        std::span<double> w(layer.weight.data(), static_cast<std::size_t>(layer.weight.size()));
        std::span<const double> gw(g.weight[i].data(), static_cast<std::size_t>(g.weight[i].size()));
        std::span<double> b(layer.bias.data(), static_cast<std::size_t>(layer.bias.size()));
        std::span<const double> gb(g.bias[i].data(), static_cast<std::size_t>(g.bias[i].size()));
        if (config.optimiser.kind == OptimiserKind::sgd) {
          sgd_step(w, gw, lr);
          sgd_step(b, gb, lr);
        } else {
          adam.step(2 * i, w, gw, lr, step);
          adam.step(2 * i + 1, b, gb, lr, step);
        }
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(n);
    rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(n);
    rec.val_accuracy_regularised = accuracy(net, validation, mode, eval_rngs);
    rec.val_accuracy_quantised = accuracy(net, validation, ForwardMode::quantised_map());
    for (auto idx : net.quantised_layers()) rec.noise.push_back(net.layer(idx).noise);
    log.epochs.push_back(std::move(rec));
  }
  net.clear_cache();
  return {std::move(net), std::move(log)};
}

}  // namespace ana
