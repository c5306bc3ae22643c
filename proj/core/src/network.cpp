#include "ana/network.hpp"

#include <cmath>
#include <string>

#include "ana/errors.hpp"

namespace ana {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Rng* layer_rng(std::span<Rng> rngs, std::size_t i) { return rngs.empty() ? nullptr : &rngs[i]; }

template <class F>
Matrix map_elements(const Matrix& m, F&& f) {
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) out(r, c) = f(m(r, c));
  return out;
}

void check_input(const Layer& layer, const Matrix& x) {
  if (static_cast<std::size_t>(x.rows()) != layer.in_size) {
    throw ShapeError("layer expects " + std::to_string(layer.in_size) + " inputs, got " +
                     std::to_string(x.rows()));
  }
}

Matrix apply_affine(const Layer& layer, const Matrix& w, const Matrix& x) {
  check_input(layer, x);
  if (layer.kind == LayerKind::dense) {
    Matrix s = w * x;
    s.colwise() += layer.bias;
    return s;
  }
  const auto& g = layer.conv;
  const auto positions = static_cast<Eigen::Index>(g.positions());
  Matrix s(static_cast<Eigen::Index>(layer.out_size), x.cols());
  for (Eigen::Index b = 0; b < x.cols(); ++b) {
    const Matrix cols = im2col(g, std::span<const double>(x.col(b).data(), layer.in_size));
    Matrix out = w * cols;
    out.colwise() += layer.bias;
    Eigen::Map<RowMajor>(s.col(b).data(), w.rows(), positions) = out;
  }
  return s;
}

}  // namespace

Matrix im2col(const ConvGeometry& g, std::span<const double> image) {
  if (image.size() != g.in_channels * g.height * g.width) throw ShapeError("im2col: image size mismatch");
  const std::size_t oh = g.out_height();
  const std::size_t ow = g.out_width();
  Matrix cols = Matrix::Zero(static_cast<Eigen::Index>(g.patch_size()), static_cast<Eigen::Index>(oh * ow));
  for (std::size_t c = 0; c < g.in_channels; ++c) {
    for (std::size_t ki = 0; ki < g.kernel; ++ki) {
      for (std::size_t kj = 0; kj < g.kernel; ++kj) {
        const auto row = static_cast<Eigen::Index>((c * g.kernel + ki) * g.kernel + kj);
        for (std::size_t y = 0; y < oh; ++y) {
          const auto iy = static_cast<std::ptrdiff_t>(y * g.stride + ki) - static_cast<std::ptrdiff_t>(g.padding);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.height)) continue;
          for (std::size_t x = 0; x < ow; ++x) {
            const auto ix = static_cast<std::ptrdiff_t>(x * g.stride + kj) - static_cast<std::ptrdiff_t>(g.padding);
            if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(g.width)) continue;
            cols(row, static_cast<Eigen::Index>(y * ow + x)) =
                image[(c * g.height + static_cast<std::size_t>(iy)) * g.width + static_cast<std::size_t>(ix)];
          }
        }
      }
    }
  }
  return cols;
}

void col2im(const ConvGeometry& g, const Matrix& cols, std::span<double> image) {
  if (image.size() != g.in_channels * g.height * g.width) throw ShapeError("col2im: image size mismatch");
  const std::size_t oh = g.out_height();
  const std::size_t ow = g.out_width();
  for (std::size_t c = 0; c < g.in_channels; ++c) {
    for (std::size_t ki = 0; ki < g.kernel; ++ki) {
      for (std::size_t kj = 0; kj < g.kernel; ++kj) {
        const auto row = static_cast<Eigen::Index>((c * g.kernel + ki) * g.kernel + kj);
        for (std::size_t y = 0; y < oh; ++y) {
          const auto iy = static_cast<std::ptrdiff_t>(y * g.stride + ki) - static_cast<std::ptrdiff_t>(g.padding);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.height)) continue;
          for (std::size_t x = 0; x < ow; ++x) {
            const auto ix = static_cast<std::ptrdiff_t>(x * g.stride + kj) - static_cast<std::ptrdiff_t>(g.padding);
            if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(g.width)) continue;
            image[(c * g.height + static_cast<std::size_t>(iy)) * g.width + static_cast<std::size_t>(ix)] +=
                cols(row, static_cast<Eigen::Index>(y * ow + x));
          }
        }
      }
    }
  }
}

Layer Layer::dense(std::size_t in, std::size_t out) {
  if (in == 0 || out == 0) throw ShapeError("dense layer sizes must be positive");
  Layer l;
  l.kind = LayerKind::dense;
  l.in_size = in;
  l.out_size = out;
  l.weight = Matrix::Zero(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in));
  l.bias = Vector::Zero(static_cast<Eigen::Index>(out));
  return l;
}

Layer Layer::conv2d(const ConvGeometry& g) {
  if (g.in_channels == 0 || g.out_channels == 0 || g.kernel == 0 || g.stride == 0 ||
      g.height + 2 * g.padding < g.kernel || g.width + 2 * g.padding < g.kernel) {
    throw ShapeError("invalid convolution geometry");
  }
  Layer l;
  l.kind = LayerKind::conv2d;
  l.conv = g;
  l.in_size = g.in_channels * g.height * g.width;
  l.out_size = g.out_channels * g.positions();
  l.weight = Matrix::Zero(static_cast<Eigen::Index>(g.out_channels), static_cast<Eigen::Index>(g.patch_size()));
  l.bias = Vector::Zero(static_cast<Eigen::Index>(g.out_channels));
  return l;
}

RegularisedActivation Layer::feature_activation(ForwardStrategy strategy) const {
  if (!activation) throw StateError("identity layer has no feature activation");
  return {activation->quantiser, activation->family, noise, strategy};
}

RegularisedActivation Layer::weight_activation(ForwardStrategy strategy) const {
  if (!weight_quantiser) throw StateError("layer has no weight quantiser");
  return {weight_quantiser->quantiser, weight_quantiser->family, noise, strategy};
}

Matrix effective_weight(const Layer& layer, ForwardMode mode, Rng* rng) {
  if (!layer.weight_quantiser) return layer.weight;
  if (mode.quantised) {
    const auto& q = layer.weight_quantiser->quantiser;
    return map_elements(layer.weight, [&](double w) { return quantise(q, w); });
  }
  const auto act = layer.weight_activation(mode.strategy);
  return map_elements(layer.weight, [&](double w) { return ana::forward(act, w, rng); });
}

Matrix affine(const Layer& layer, const Matrix& x, ForwardMode mode, Rng* rng) {
  return apply_affine(layer, effective_weight(layer, mode, rng), x);
}

Network::Network(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.size() < 2) throw ConfigError("a network needs at least two layers");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    const auto w_rows = static_cast<std::size_t>(l.weight.rows());
    const auto w_cols = static_cast<std::size_t>(l.weight.cols());
    const bool dense_ok = l.kind == LayerKind::dense && w_rows == l.out_size && w_cols == l.in_size &&
                          static_cast<std::size_t>(l.bias.size()) == l.out_size;
    const bool conv_ok = l.kind == LayerKind::conv2d && w_rows == l.conv.out_channels &&
                         w_cols == l.conv.patch_size() &&
                         static_cast<std::size_t>(l.bias.size()) == l.conv.out_channels;
    if (!dense_ok && !conv_ok) throw ShapeError("layer " + std::to_string(i) + ": parameter shapes are inconsistent");
    if (i > 0 && layers_[i - 1].out_size != l.in_size) {
      throw ShapeError("layer " + std::to_string(i) + " expects " + std::to_string(l.in_size) +
                       " inputs but layer " + std::to_string(i - 1) + " produces " +
                       std::to_string(layers_[i - 1].out_size));
    }
  }
  if (layers_.back().activation) throw ConfigError("the output layer must use the identity activation");
}

std::vector<std::size_t> Network::quantised_layers() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < layers_.size(); ++i)
    if (layers_[i].is_quantised()) out.push_back(i);
  return out;
}

void Network::init_uniform(Rng& rng) {
  for (auto& l : layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.weight.cols()));
    for (Eigen::Index c = 0; c < l.weight.cols(); ++c)
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r) l.weight(r, c) = bound * (2.0 * uniform01(rng) - 1.0);
    l.bias.setZero();
  }
  cache_ = {};
}

std::vector<Matrix> Network::run(const Matrix& x0, ForwardMode mode, std::span<Rng> rngs, Cache* cache) const {
  if (!rngs.empty() && rngs.size() != layers_.size()) throw ShapeError("need one generator per layer");
  if (!mode.quantised && mode.strategy == ForwardStrategy::random && rngs.empty())
    throw StateError("random forward strategy needs one generator per layer");
  if (static_cast<std::size_t>(x0.rows()) != input_size())
    throw ShapeError("network expects " + std::to_string(input_size()) + " inputs, got " + std::to_string(x0.rows()));

  std::vector<Matrix> features;
  features.reserve(layers_.size());
  if (cache != nullptr) {
    *cache = {};
    cache->inputs.reserve(layers_.size());
  }
  const Matrix* x = &x0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    Rng* rng = layer_rng(rngs, i);
    Matrix w = effective_weight(l, mode, rng);
    Matrix s = apply_affine(l, w, *x);
    Matrix out;
    if (!l.activation) {
      out = s;
    } else if (mode.quantised) {
      const auto& q = l.activation->quantiser;
      out = map_elements(s, [&](double v) { return quantise(q, v); });
    } else {
      const auto act = l.feature_activation(mode.strategy);
      out = map_elements(s, [&](double v) { return ana::forward(act, v, rng); });
    }
    if (cache != nullptr) {
      cache->inputs.push_back(*x);
      cache->pre.push_back(std::move(s));
      cache->eff_weights.push_back(std::move(w));
    }
    features.push_back(std::move(out));
    x = &features.back();
  }
  if (!features.back().allFinite()) throw NumericError("network output is not finite");
  if (cache != nullptr) {
    cache->features = features;
    cache->valid = true;
  }
  return features;
}

const std::vector<Matrix>& Network::forward(const Matrix& x0, ForwardMode mode, std::span<Rng> rngs) {
  run(x0, mode, rngs, &cache_);
  return cache_.features;
}

std::vector<Matrix> Network::evaluate(const Matrix& x0, ForwardMode mode, std::span<Rng> rngs) const {
  return run(x0, mode, rngs, nullptr);
}

Gradients Network::backward(const Matrix& output_grad, bool stop_at_annealed) const {
  if (!cache_.valid) throw StateError("backward called before forward");
  const auto batch = cache_.inputs.front().cols();
  if (static_cast<std::size_t>(output_grad.rows()) != output_size() || output_grad.cols() != batch)
    throw ShapeError("output gradient shape does not match the cached forward pass");

  Gradients grads;
  grads.weight.reserve(layers_.size());
  grads.bias.reserve(layers_.size());
  for (const auto& l : layers_) {
    grads.weight.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
    grads.bias.push_back(Vector::Zero(l.bias.size()));
  }

  Matrix dx = output_grad;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const auto& l = layers_[i];
    Matrix ds;
    if (l.activation) {
      if (stop_at_annealed && l.noise.is_dirac()) break;
      const auto act = l.feature_activation(ForwardStrategy::expectation);
      ds = dx.cwiseProduct(map_elements(cache_.pre[i], [&](double v) { return ana::backward(act, v); }));
    } else {
      ds = std::move(dx);
    }
    const Matrix& x_in = cache_.inputs[i];
    const Matrix& w = cache_.eff_weights[i];
    Matrix dw;
    Matrix dx_in;
    if (l.kind == LayerKind::dense) {
      dw = ds * x_in.transpose();
      grads.bias[i] = ds.rowwise().sum();
      if (i > 0) dx_in = w.transpose() * ds;
    } else {
      const auto& g = l.conv;
      const auto positions = static_cast<Eigen::Index>(g.positions());
      dw = Matrix::Zero(w.rows(), w.cols());
      if (i > 0) dx_in = Matrix::Zero(static_cast<Eigen::Index>(l.in_size), batch);
      for (Eigen::Index b = 0; b < batch; ++b) {
        const Matrix ds_b = Eigen::Map<const RowMajor>(ds.col(b).data(), w.rows(), positions);
        const Matrix cols = im2col(g, std::span<const double>(x_in.col(b).data(), l.in_size));
        dw.noalias() += ds_b * cols.transpose();
        grads.bias[i] += ds_b.rowwise().sum();
        if (i > 0) col2im(g, w.transpose() * ds_b, std::span<double>(dx_in.col(b).data(), l.in_size));
      }
    }
    if (l.weight_quantiser) {
      const auto wact = l.weight_activation(ForwardStrategy::expectation);
      dw = dw.cwiseProduct(map_elements(l.weight, [&](double v) { return ana::backward(wact, v); }));
    }
    grads.weight[i] = std::move(dw);
    dx = std::move(dx_in);
  }
  return grads;
}

Network make_mlp(const MlpSpec& spec) {
  std::vector<std::size_t> sizes{spec.inputs};
  sizes.insert(sizes.end(), spec.hidden.begin(), spec.hidden.end());
  sizes.push_back(spec.outputs);
  std::vector<Layer> layers;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    Layer l = Layer::dense(sizes[i], sizes[i + 1]);
    if (i + 2 < sizes.size()) {
      l.activation = spec.feature;
      l.weight_quantiser = spec.weights;
    }
    layers.push_back(std::move(l));
  }
  return Network(std::move(layers));
}

}  // namespace ana
