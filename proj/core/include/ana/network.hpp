#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ana/noise.hpp"
#include "ana/quantiser.hpp"
#include "ana/regulariser.hpp"
#include "ana/rng.hpp"

namespace ana {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Quantiser plus noise family; the layer supplies the current NoiseParams.
struct ActivationSpec {
  Quantiser quantiser = Quantiser::ternary();
  NoiseFamily family = NoiseFamily::uniform;

  friend bool operator==(const ActivationSpec&, const ActivationSpec&) = default;
};

enum class LayerKind { dense, conv2d };

/// Input is C×H×W flattened channel-major; output is O×H'×W' likewise.
struct ConvGeometry {
  std::size_t in_channels = 1;
  std::size_t height = 1;
  std::size_t width = 1;
  std::size_t out_channels = 1;
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;

  std::size_t out_height() const { return (height + 2 * padding - kernel) / stride + 1; }
  std::size_t out_width() const { return (width + 2 * padding - kernel) / stride + 1; }
  std::size_t patch_size() const { return in_channels * kernel * kernel; }
  std::size_t positions() const { return out_height() * out_width(); }

  friend bool operator==(const ConvGeometry&, const ConvGeometry&) = default;
};

/// Patch matrix (C·k·k) × (H'·W') of one flattened input image.
Matrix im2col(const ConvGeometry& g, std::span<const double> image);
/// Adjoint of im2col: scatters-adds patch gradients back into an image.
void col2im(const ConvGeometry& g, const Matrix& cols, std::span<double> image);

/// Affine map s = W·x + b followed by an element-wise activation. Weights are
/// latent reals; when `weight_quantiser` is set they pass through it (sharing
/// the layer's noise) before use. Biases stay real.
struct Layer {
  LayerKind kind = LayerKind::dense;
  std::size_t in_size = 0;
  std::size_t out_size = 0;
  Matrix weight;  // dense: out × in; conv: out_channels × patch_size
  Vector bias;    // dense: out; conv: out_channels
  std::optional<ActivationSpec> activation;  // nullopt = identity
  std::optional<ActivationSpec> weight_quantiser;
  NoiseParams noise{};
  ConvGeometry conv{};

  static Layer dense(std::size_t in, std::size_t out);
  static Layer conv2d(const ConvGeometry& geometry);

  bool is_quantised() const noexcept { return activation.has_value(); }
  /// Feature activation for the given strategy, using the layer's noise.
  RegularisedActivation feature_activation(ForwardStrategy strategy) const;
  RegularisedActivation weight_activation(ForwardStrategy strategy) const;
};

/// quantised: every quantiser applied exactly (noise ignored).
/// regularised: every quantiser evaluated with its layer's noise under `strategy`.
struct ForwardMode {
  bool quantised = false;
  ForwardStrategy strategy = ForwardStrategy::expectation;

  static ForwardMode quantised_map() { return {true, ForwardStrategy::mode}; }
  static ForwardMode regularised(ForwardStrategy s) { return {false, s}; }
};

struct Gradients {
  std::vector<Matrix> weight;
  std::vector<Vector> bias;
};

/// Effective weights used by the affine map under `mode`.
Matrix effective_weight(const Layer& layer, ForwardMode mode, Rng* rng);

/// s = W_eff·x + b for a batch (one column per sample). Throws ShapeError.
Matrix affine(const Layer& layer, const Matrix& x, ForwardMode mode = ForwardMode::quantised_map(),
              Rng* rng = nullptr);

/// Feedforward composition of layers. The last layer must be the identity.
class Network {
 public:
  /// Throws ShapeError on inconsistent sizes, ConfigError if fewer than two
  /// layers or the last layer is quantised.
  explicit Network(std::vector<Layer> layers);

  std::size_t depth() const noexcept { return layers_.size(); }
  std::size_t input_size() const { return layers_.front().in_size; }
  std::size_t output_size() const { return layers_.back().out_size; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  Layer& layer(std::size_t i) { return layers_.at(i); }
  const Layer& layer(std::size_t i) const { return layers_.at(i); }

  /// Indices of layers with a quantised activation, input first.
  std::vector<std::size_t> quantised_layers() const;

  /// Latent weights ~ U[−1/√fan_in, 1/√fan_in]; biases zero.
  void init_uniform(Rng& rng);

  /// Features x_1..x_L for a batch x0 (input_size × B). Caches the pass for
  /// backward(). `rngs` holds one generator per layer and is required only for
  /// the random strategy. Throws ShapeError, NumericError on NaN.
  const std::vector<Matrix>& forward(const Matrix& x0, ForwardMode mode, std::span<Rng> rngs = {});

  /// Same as forward() without touching the cache.
  std::vector<Matrix> evaluate(const Matrix& x0, ForwardMode mode, std::span<Rng> rngs = {}) const;

  /// Gradients of the latent parameters given dLoss/dx_L for the cached batch.
  /// Every activation uses the expectation derivative of its current noise,
  /// whatever the forward strategy was. With `stop_at_annealed`, propagation
  /// halts at the deepest layer whose activation noise is a Dirac; that layer
  /// and everything upstream receive zero gradients without being computed.
  /// Throws StateError before any forward().
  Gradients backward(const Matrix& output_grad, bool stop_at_annealed = false) const;

  bool has_cache() const noexcept { return cache_.valid; }
  void clear_cache() noexcept { cache_ = {}; }

 private:
  struct Cache {
    bool valid = false;
    std::vector<Matrix> inputs;       // x_{ℓ−1}
    std::vector<Matrix> pre;          // s_ℓ
    std::vector<Matrix> eff_weights;  // W_eff
    std::vector<Matrix> features;     // x_ℓ
  };

  std::vector<Matrix> run(const Matrix& x0, ForwardMode mode, std::span<Rng> rngs, Cache* cache) const;

  std::vector<Layer> layers_;
  Cache cache_;
};

/// Multi-layer perceptron description used by the harness and tests.
struct MlpSpec {
  std::size_t inputs = 2;
  std::vector<std::size_t> hidden{};
  std::size_t outputs = 2;
  ActivationSpec feature{};
  std::optional<ActivationSpec> weights{};
};

Network make_mlp(const MlpSpec& spec);

/// Flat little-endian float64 tensors after a textual header describing layer
/// sizes and quantisers. Layout: see params_io.cpp.
void save_params(const Network& net, const std::filesystem::path& path);
/// Loads latent parameters into `net`; the header must describe the same
/// architecture (ShapeError otherwise).
void load_params(Network& net, const std::filesystem::path& path);

}  // namespace ana
