#include "tabgen/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tabgen/error.hpp"

namespace tabgen::nn {

double activate(Activation act, double x) {
  switch (act) {
    case Activation::ReLU:
      return x > 0.0 ? x : 0.0;
    case Activation::Sigmoid:
      return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    case Activation::Tanh:
      return std::tanh(x);
    case Activation::Linear:
      return x;
  }
  return x;
}

std::string_view to_string(Activation act) {
  switch (act) {
    case Activation::ReLU:
      return "relu";
    case Activation::Sigmoid:
      return "sigmoid";
    case Activation::Tanh:
      return "tanh";
    case Activation::Linear:
      return "linear";
  }
  return "linear";
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::ReLU;
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "tanh") return Activation::Tanh;
  if (name == "linear") return Activation::Linear;
  throw Error("unknown activation '" + std::string(name) + "'");
}

BatchNorm::BatchNorm(std::size_t features)
    : gamma(features, 1.0),
      beta(features, 0.0),
      running_mean(features, 0.0),
      running_var(features, 1.0) {}

std::vector<std::span<double>> ParameterGradients::blocks() {
  std::vector<std::span<double>> out;
  for (auto& g : layers) {
    out.emplace_back(g.weights.data());
    out.emplace_back(g.bias);
    if (!g.gamma.empty()) {
      out.emplace_back(g.gamma);
      out.emplace_back(g.beta);
    }
  }
  return out;
}

std::vector<std::span<const double>> ParameterGradients::blocks() const {
  std::vector<std::span<const double>> out;
  for (const auto& g : layers) {
    out.emplace_back(g.weights.data());
    out.emplace_back(g.bias);
    if (!g.gamma.empty()) {
      out.emplace_back(g.gamma);
      out.emplace_back(g.beta);
    }
  }
  return out;
}

ParameterGradients& ParameterGradients::operator+=(const ParameterGradients& other) {
  auto dst = blocks();
  auto src = other.blocks();
  if (dst.size() != src.size()) throw DimensionError("gradient layout mismatch");
  for (std::size_t b = 0; b < dst.size(); ++b) {
    if (dst[b].size() != src[b].size()) throw DimensionError("gradient layout mismatch");
    for (std::size_t i = 0; i < dst[b].size(); ++i) dst[b][i] += src[b][i];
  }
  return *this;
}

ParameterGradients& ParameterGradients::operator*=(double factor) {
  for (auto block : blocks()) {
    for (double& v : block) v *= factor;
  }
  return *this;
}

DenseNetwork::DenseNetwork(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& l = layers_[k];
    if (l.bias.size() != l.outputs()) {
      throw DimensionError("layer " + std::to_string(k) + ": bias length " +
                               std::to_string(l.bias.size()) + " != outputs " +
                               std::to_string(l.outputs()),
                           k);
    }
    if (l.norm && l.norm->gamma.size() != l.outputs()) {
      throw DimensionError("layer " + std::to_string(k) + ": batch norm width mismatch", k);
    }
    if (l.dropout < 0.0 || l.dropout >= 1.0) {
      throw DimensionError("layer " + std::to_string(k) + ": dropout outside [0,1)", k);
    }
    if (k > 0 && layers_[k - 1].outputs() != l.inputs()) {
      throw DimensionError("layer " + std::to_string(k) + " expects " +
                               std::to_string(l.inputs()) + " inputs but layer " +
                               std::to_string(k - 1) + " produces " +
                               std::to_string(layers_[k - 1].outputs()),
                           k);
    }
  }
}

DenseNetwork DenseNetwork::glorot(std::size_t inputs, std::span<const LayerSpec> specs,
                                  Rng& rng) {
  std::vector<DenseLayer> layers;
  std::size_t fan_in = inputs;
  for (const auto& spec : specs) {
    DenseLayer layer;
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + spec.units));
    layer.weights = Matrix(spec.units, fan_in);
    for (double& w : layer.weights.data()) w = rng.uniform(-limit, limit);
    layer.bias.assign(spec.units, 0.0);
    layer.activation = spec.activation;
    if (spec.batch_norm) layer.norm.emplace(spec.units);
    layer.dropout = spec.dropout;
    layers.push_back(std::move(layer));
    fan_in = spec.units;
  }
  return DenseNetwork(std::move(layers));
}

std::size_t DenseNetwork::inputs() const {
  return layers_.empty() ? 0 : layers_.front().inputs();
}

std::size_t DenseNetwork::outputs() const {
  return layers_.empty() ? 0 : layers_.back().outputs();
}

namespace {

// out = x * W^T + b
Matrix affine(const Matrix& x, const DenseLayer& layer) {
  const std::size_t n = x.rows();
  const std::size_t in = layer.inputs();
  const std::size_t out_dim = layer.outputs();
  Matrix out(n, out_dim);
  const double* w = layer.weights.data().data();
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x.row(i).data();
    double* oi = out.row(i).data();
    for (std::size_t o = 0; o < out_dim; ++o) {
      const double* wo = w + o * in;
      double acc = 0.0;
      for (std::size_t k = 0; k < in; ++k) acc += wo[k] * xi[k];
      oi[o] = acc + layer.bias[o];
    }
  }
  return out;
}

template <bool Train, typename Layers>
Matrix run_layers(Layers& layers, const Matrix& x, Tape::Record* records, Rng* rng) {
  Matrix current = x;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    auto& layer = layers[k];
    if (current.cols() != layer.inputs()) {
      throw DimensionError("layer " + std::to_string(k) + " expects " +
                               std::to_string(layer.inputs()) + " inputs, got " +
                               std::to_string(current.cols()),
                           k);
    }
    Matrix z = affine(current, layer);
    const std::size_t n = z.rows();
    const std::size_t width = z.cols();

    Matrix xhat;
    Vector inv_std;
    if (layer.norm) {
      auto& bn = *layer.norm;
      Vector mean(width, 0.0);
      Vector var(width, 0.0);
      if constexpr (Train) {
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < width; ++j) mean[j] += z(i, j);
        }
        for (double& m : mean) m /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < width; ++j) {
            const double d = z(i, j) - mean[j];
            var[j] += d * d;
          }
        }
        for (double& v : var) v /= static_cast<double>(n);
        const double unbias = n > 1 ? static_cast<double>(n) / static_cast<double>(n - 1) : 1.0;
        for (std::size_t j = 0; j < width; ++j) {
          bn.running_mean[j] = (1.0 - bn.momentum) * bn.running_mean[j] + bn.momentum * mean[j];
          bn.running_var[j] =
              (1.0 - bn.momentum) * bn.running_var[j] + bn.momentum * var[j] * unbias;
        }
      } else {
        mean = bn.running_mean;
        var = bn.running_var;
      }
      inv_std.resize(width);
      for (std::size_t j = 0; j < width; ++j) inv_std[j] = 1.0 / std::sqrt(var[j] + bn.epsilon);
      xhat = Matrix(n, width);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < width; ++j) {
          xhat(i, j) = (z(i, j) - mean[j]) * inv_std[j];
          z(i, j) = bn.gamma[j] * xhat(i, j) + bn.beta[j];
        }
      }
    }

    for (double& v : z.data()) v = activate(layer.activation, v);

    Matrix mask;
    Matrix output;
    if constexpr (Train) {
      if (layer.dropout > 0.0) {
        const double keep = 1.0 - layer.dropout;
        mask = Matrix(n, width);
        output = z;
        auto m = mask.data();
        auto o = output.data();
        for (std::size_t i = 0; i < m.size(); ++i) {
          m[i] = rng->bernoulli(keep) ? 1.0 / keep : 0.0;
          o[i] *= m[i];
        }
      }
    }
    if (output.empty()) output = z;

    if (records != nullptr) {
      auto& rec = records[k];
      rec.input = std::move(current);
      rec.normalized = std::move(xhat);
      rec.inv_std = std::move(inv_std);
      rec.activated = std::move(z);
      rec.dropout_mask = std::move(mask);
    }
    current = std::move(output);
  }
  return current;
}

}  // namespace

Matrix DenseNetwork::forward(const Matrix& x) const {
  return run_layers<false>(layers_, x, nullptr, nullptr);
}

Vector DenseNetwork::forward(std::span<const double> x) const {
  Matrix out = forward(Matrix::row_vector(x));
  return Vector(out.data().begin(), out.data().end());
}

Matrix DenseNetwork::forward(const Matrix& x, Tape& tape) const {
  tape.records_.assign(layers_.size(), {});
  tape.batch_size_ = x.rows();
  tape.training_ = false;
  return run_layers<false>(layers_, x, tape.records_.data(), nullptr);
}

Matrix DenseNetwork::forward_train(const Matrix& x, Tape& tape, Rng& rng) {
  tape.records_.assign(layers_.size(), {});
  tape.batch_size_ = x.rows();
  tape.training_ = true;
  return run_layers<true>(layers_, x, tape.records_.data(), &rng);
}

BackwardResult DenseNetwork::backward(const Tape& tape, const Matrix& upstream) const {
  if (tape.empty() || tape.records_.size() != layers_.size()) {
    throw Error("backward called without a recorded forward pass");
  }
  if (upstream.rows() != tape.batch_size_ || upstream.cols() != outputs()) {
    throw DimensionError("upstream gradient shape does not match network output");
  }

  BackwardResult result;
  result.parameters.layers.resize(layers_.size());
  Matrix grad = upstream;

  for (std::size_t k = layers_.size(); k-- > 0;) {
    const auto& layer = layers_[k];
    const auto& rec = tape.records_[k];
    const std::size_t n = grad.rows();
    const std::size_t width = layer.outputs();
    const std::size_t in = layer.inputs();

    if (!rec.dropout_mask.empty()) {
      auto g = grad.data();
      auto m = rec.dropout_mask.data();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] *= m[i];
    }

    {
      auto g = grad.data();
      auto a = rec.activated.data();
      switch (layer.activation) {
        case Activation::ReLU:
          for (std::size_t i = 0; i < g.size(); ++i) {
            if (a[i] <= 0.0) g[i] = 0.0;
          }
          break;
        case Activation::Sigmoid:
          for (std::size_t i = 0; i < g.size(); ++i) g[i] *= a[i] * (1.0 - a[i]);
          break;
        case Activation::Tanh:
          for (std::size_t i = 0; i < g.size(); ++i) g[i] *= 1.0 - a[i] * a[i];
          break;
        case Activation::Linear:
          break;
      }
    }

    auto& lg = result.parameters.layers[k];
    if (layer.norm) {
      const auto& bn = *layer.norm;
      lg.gamma.assign(width, 0.0);
      lg.beta.assign(width, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < width; ++j) {
          lg.gamma[j] += grad(i, j) * rec.normalized(i, j);
          lg.beta[j] += grad(i, j);
        }
      }
      // grad now becomes d/dxhat, then d/dz.
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < width; ++j) grad(i, j) *= bn.gamma[j];
      }
      if (tape.training_) {
        Vector sum(width, 0.0);
        Vector sum_xhat(width, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < width; ++j) {
            sum[j] += grad(i, j);
            sum_xhat[j] += grad(i, j) * rec.normalized(i, j);
          }
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < width; ++j) {
            grad(i, j) = rec.inv_std[j] * inv_n *
                         (static_cast<double>(n) * grad(i, j) - sum[j] -
                          rec.normalized(i, j) * sum_xhat[j]);
          }
        }
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < width; ++j) grad(i, j) *= rec.inv_std[j];
        }
      }
    }

    lg.weights = Matrix(width, in);
    lg.bias.assign(width, 0.0);
    double* dw = lg.weights.data().data();
    for (std::size_t i = 0; i < n; ++i) {
      const double* gi = grad.row(i).data();
      const double* xi = rec.input.row(i).data();
      for (std::size_t o = 0; o < width; ++o) {
        const double go = gi[o];
        lg.bias[o] += go;
        if (go == 0.0) continue;
        double* dwo = dw + o * in;
        for (std::size_t c = 0; c < in; ++c) dwo[c] += go * xi[c];
      }
    }

    Matrix next(n, in);
    const double* w = layer.weights.data().data();
    for (std::size_t i = 0; i < n; ++i) {
      const double* gi = grad.row(i).data();
      double* ni = next.row(i).data();
      for (std::size_t o = 0; o < width; ++o) {
        const double go = gi[o];
        if (go == 0.0) continue;
        const double* wo = w + o * in;
        for (std::size_t c = 0; c < in; ++c) ni[c] += go * wo[c];
      }
    }

    for (auto block : {std::span<const double>(lg.weights.data()), std::span<const double>(lg.bias)}) {
      for (double v : block) {
        if (!std::isfinite(v)) {
          throw NumericalError("non-finite gradient in layer " + std::to_string(k));
        }
      }
    }
    grad = std::move(next);
  }
  result.input = std::move(grad);
  return result;
}

std::vector<std::span<double>> DenseNetwork::parameter_blocks() {
  std::vector<std::span<double>> out;
  for (auto& l : layers_) {
    out.emplace_back(l.weights.data());
    out.emplace_back(l.bias);
    if (l.norm) {
      out.emplace_back(l.norm->gamma);
      out.emplace_back(l.norm->beta);
    }
  }
  return out;
}

std::vector<std::span<const double>> DenseNetwork::parameter_blocks() const {
  std::vector<std::span<const double>> out;
  for (const auto& l : layers_) {
    out.emplace_back(l.weights.data());
    out.emplace_back(l.bias);
    if (l.norm) {
      out.emplace_back(l.norm->gamma);
      out.emplace_back(l.norm->beta);
    }
  }
  return out;
}

std::size_t DenseNetwork::parameter_count() const {
  std::size_t total = 0;
  for (auto b : parameter_blocks()) total += b.size();
  return total;
}

}  // namespace tabgen::nn
