#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tabgen/network.hpp"
#include "tabgen/random.hpp"

namespace tabgen::testing {

struct GradCheckResult {
  std::size_t checked = 0;
  std::size_t failures = 0;
  double worst_relative = 0.0;
  std::string first_failure;

  bool ok() const { return failures == 0; }
};

/// Central finite differences of `loss` against `analytic`, entry by entry.
/// An entry passes when |a - n| <= rel * max(|a|, |n|) or |a - n| <= abs_floor.
inline GradCheckResult check_gradients(const std::vector<std::span<double>>& params,
                                       const std::vector<std::span<const double>>& analytic,
                                       const std::function<double()>& loss, double step = 1e-5,
                                       double rel = 1e-4, double abs_floor = 1e-8) {
  GradCheckResult r;
  for (std::size_t b = 0; b < params.size(); ++b) {
    for (std::size_t i = 0; i < params[b].size(); ++i) {
      double& p = params[b][i];
      const double saved = p;
      p = saved + step;
      const double up = loss();
      p = saved - step;
      const double down = loss();
      p = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[b][i];
      const double diff = std::abs(a - numeric);
      const double scale = std::max(std::abs(a), std::abs(numeric));
      const double relative = scale > 0.0 ? diff / scale : 0.0;
      ++r.checked;
      if (diff > abs_floor) r.worst_relative = std::max(r.worst_relative, relative);
      if (diff > abs_floor && diff > rel * scale) {
        if (r.failures == 0) {
          r.first_failure = "block " + std::to_string(b) + " entry " + std::to_string(i) +
                            ": analytic " + std::to_string(a) + " numeric " + std::to_string(numeric);
        }
        ++r.failures;
      }
    }
  }
  return r;
}

inline GradCheckResult& operator+=(GradCheckResult& a, const GradCheckResult& b) {
  if (a.failures == 0 && b.failures > 0) a.first_failure = b.first_failure;
  a.checked += b.checked;
  a.failures += b.failures;
  a.worst_relative = std::max(a.worst_relative, b.worst_relative);
  return a;
}

/// Glorot init leaves biases at zero, so a row whose previous ReLU layer is
/// entirely dead sits exactly on the next layer's kink, where central
/// differences average the one-sided slopes. Small random biases move every
/// pre-activation off the kink.
inline void jitter_biases(nn::DenseNetwork& net, Rng& rng, double scale = 0.1) {
  for (std::size_t k = 0; k < net.depth(); ++k) {
    for (double& b : net.layer(k).bias) b = scale * rng.normal();
  }
}

}  // namespace tabgen::testing
