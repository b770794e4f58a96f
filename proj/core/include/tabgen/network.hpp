#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tabgen/matrix.hpp"
#include "tabgen/random.hpp"

namespace tabgen::nn {

enum class Activation { ReLU, Sigmoid, Tanh, Linear };

double activate(Activation act, double x);
std::string_view to_string(Activation act);
Activation parse_activation(std::string_view name);

/// Per-feature batch normalisation applied between the affine map and the
/// activation. Running statistics are used outside of training.
struct BatchNorm {
  explicit BatchNorm(std::size_t features = 0);

  Vector gamma;
  Vector beta;
  Vector running_mean;
  Vector running_var;
  double momentum = 0.1;
  double epsilon = 1e-5;
};

/// y = dropout(act(norm(W x + b))). Weights are stored out x in.
struct DenseLayer {
  Matrix weights;
  Vector bias;
  Activation activation = Activation::Linear;
  std::optional<BatchNorm> norm;
  double dropout = 0.0;

  std::size_t inputs() const { return weights.cols(); }
  std::size_t outputs() const { return weights.rows(); }
};

struct LayerSpec {
  std::size_t units = 0;
  Activation activation = Activation::Linear;
  bool batch_norm = false;
  double dropout = 0.0;
};

struct LayerGradient {
  Matrix weights;
  Vector bias;
  Vector gamma;
  Vector beta;
};

/// Gradients for every parameter of one network, laid out like the network.
struct ParameterGradients {
  std::vector<LayerGradient> layers;

  /// Flat views in the same order as DenseNetwork::parameter_blocks().
  std::vector<std::span<double>> blocks();
  std::vector<std::span<const double>> blocks() const;

  ParameterGradients& operator+=(const ParameterGradients& other);
  ParameterGradients& operator*=(double factor);
};

/// Intermediate values of one recorded forward pass.
class Tape {
 public:
  bool empty() const { return records_.empty(); }
  std::size_t batch_size() const { return batch_size_; }
  bool training() const { return training_; }

  struct Record {
    Matrix input;
    Matrix normalized;  // xhat, only with batch norm
    Vector inv_std;     // only with batch norm
    Matrix activated;   // activation output before dropout
    Matrix dropout_mask;
  };

 private:
  friend class DenseNetwork;

  std::vector<Record> records_;
  std::size_t batch_size_ = 0;
  bool training_ = false;
};

struct BackwardResult {
  ParameterGradients parameters;
  Matrix input;  // d(loss)/d(network input)
};

/// Stack of dense layers. Forward passes are const; a Tape owned by the caller
/// records what backward() needs, so one network may be evaluated from many
/// threads as long as each uses its own Tape.
class DenseNetwork {
 public:
  DenseNetwork() = default;
  explicit DenseNetwork(std::vector<DenseLayer> layers);

  /// Glorot-uniform weights, zero biases, unit gamma.
  static DenseNetwork glorot(std::size_t inputs, std::span<const LayerSpec> specs,
                             Rng& rng);

  std::size_t inputs() const;
  std::size_t outputs() const;
  std::size_t depth() const { return layers_.size(); }

  const std::vector<DenseLayer>& layers() const { return layers_; }
  DenseLayer& layer(std::size_t i) { return layers_.at(i); }
  const DenseLayer& layer(std::size_t i) const { return layers_.at(i); }

  /// Inference: running batch-norm statistics, no dropout.
  Matrix forward(const Matrix& x) const;
  Vector forward(std::span<const double> x) const;
  /// Inference pass that also records the tape for backward().
  Matrix forward(const Matrix& x, Tape& tape) const;
  /// Training pass: batch statistics, dropout masks drawn from `rng`, running
  /// statistics updated.
  Matrix forward_train(const Matrix& x, Tape& tape, Rng& rng);

  /// Reverse pass for the recorded forward. `upstream` is d(loss)/d(output)
  /// with the same shape as the recorded output.
  BackwardResult backward(const Tape& tape, const Matrix& upstream) const;

  std::vector<std::span<double>> parameter_blocks();
  std::vector<std::span<const double>> parameter_blocks() const;
  std::size_t parameter_count() const;

 private:
  std::vector<DenseLayer> layers_;
};

}  // namespace tabgen::nn
