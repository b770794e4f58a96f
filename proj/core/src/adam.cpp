#include "tabgen/adam.hpp"

#include <cmath>

#include "tabgen/error.hpp"

namespace tabgen::nn {

AdamState make_adam_state(std::size_t parameter_count, AdamOptions options) {
  AdamState state;
  state.options = options;
  state.first_moment.assign(parameter_count, 0.0);
  state.second_moment.assign(parameter_count, 0.0);
  return state;
}

void adam_update(std::span<const std::span<double>> params,
                 std::span<const std::span<const double>> grads, AdamState& state) {
  if (params.size() != grads.size()) throw DimensionError("adam: block count mismatch");
  std::size_t total = 0;
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].size() != grads[b].size()) {
      throw DimensionError("adam: block " + std::to_string(b) + " size mismatch");
    }
    total += params[b].size();
  }
  if (total != state.first_moment.size() || total != state.second_moment.size()) {
    throw DimensionError("adam: state holds " + std::to_string(state.first_moment.size()) +
                         " moments for " + std::to_string(total) + " parameters");
  }

  const auto& opt = state.options;
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double correct1 = 1.0 - std::pow(opt.beta1, t);
  const double correct2 = 1.0 - std::pow(opt.beta2, t);

  std::size_t offset = 0;
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto p = params[b];
    auto g = grads[b];
    for (std::size_t i = 0; i < p.size(); ++i, ++offset) {
      double& m = state.first_moment[offset];
      double& v = state.second_moment[offset];
      m = opt.beta1 * m + (1.0 - opt.beta1) * g[i];
      v = opt.beta2 * v + (1.0 - opt.beta2) * g[i] * g[i];
      const double m_hat = m / correct1;
      const double v_hat = v / correct2;
      p[i] -= opt.learning_rate * m_hat / (std::sqrt(v_hat) + opt.epsilon);
    }
  }
}

Adam::Adam(const DenseNetwork& net, AdamOptions options)
    : state_(make_adam_state(net.parameter_count(), options)) {}

void Adam::step(DenseNetwork& net, const ParameterGradients& grads) {
  auto p = net.parameter_blocks();
  auto g = grads.blocks();
  adam_update(p, g, state_);
}

}  // namespace tabgen::nn
