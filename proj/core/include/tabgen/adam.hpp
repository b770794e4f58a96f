#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tabgen/network.hpp"

namespace tabgen::nn {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamOptions options;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step_count = 0;
};

AdamState make_adam_state(std::size_t parameter_count, AdamOptions options = {});

/// One bias-corrected Adam step over a parameter set given as blocks. Block
/// sizes must match between `params` and `grads`; their total must match the
/// moment arrays in `state`.
void adam_update(std::span<const std::span<double>> params,
                 std::span<const std::span<const double>> grads, AdamState& state);

/// Convenience optimiser bound to one network's parameter layout.
class Adam {
 public:
  Adam() = default;
  Adam(const DenseNetwork& net, AdamOptions options = {});

  void step(DenseNetwork& net, const ParameterGradients& grads);

  const AdamState& state() const { return state_; }

 private:
  AdamState state_;
};

}  // namespace tabgen::nn
