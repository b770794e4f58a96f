#pragma once

#include <array>
#include <span>

#include "tabgen/dataset.hpp"
#include "tabgen/matrix.hpp"

namespace tabgen::data {

/// Per-column z-score transform with population standard deviation.
class Standardizer {
 public:
  Standardizer() = default;
  /// Throws if any std is not strictly positive.
  Standardizer(std::array<double, kSampleDim> means, std::array<double, kSampleDim> stds);

  /// Requires at least two samples; a constant column raises an error naming it.
  static Standardizer fit(std::span<const Sample> samples);

  std::array<double, kSampleDim> standardize(const Sample& s) const;
  Sample destandardize(std::span<const double> z) const;

  nn::Matrix standardize(std::span<const Sample> samples) const;
  std::vector<Sample> destandardize(const nn::Matrix& z) const;

  double standardize_component(std::size_t column, double raw) const;
  double destandardize_component(std::size_t column, double z) const;

  const std::array<double, kSampleDim>& means() const { return means_; }
  const std::array<double, kSampleDim>& stds() const { return stds_; }

 private:
  std::array<double, kSampleDim> means_{};
  std::array<double, kSampleDim> stds_{1, 1, 1, 1, 1, 1, 1, 1, 1};
};

}  // namespace tabgen::data
