#include "tabgen/standardizer.hpp"

#include <cmath>
#include <string>

#include "tabgen/error.hpp"

namespace tabgen::data {

Standardizer::Standardizer(std::array<double, kSampleDim> means,
                           std::array<double, kSampleDim> stds)
    : means_(means), stds_(stds) {
  for (std::size_t c = 0; c < kSampleDim; ++c) {
    if (!(stds_[c] > 0.0) || !std::isfinite(stds_[c]) || !std::isfinite(means_[c])) {
      throw Error("standardizer column " + std::string(kColumnNames[c]) +
                  " has invalid statistics");
    }
  }
}

Standardizer Standardizer::fit(std::span<const Sample> samples) {
  if (samples.size() < 2) throw Error("standardizer needs at least two samples");
  const double n = static_cast<double>(samples.size());
  std::array<double, kSampleDim> mean{};
  for (const auto& s : samples) {
    const auto a = s.to_array();
    for (std::size_t c = 0; c < kSampleDim; ++c) mean[c] += a[c];
  }
  for (double& m : mean) m /= n;

  std::array<double, kSampleDim> var{};
  for (const auto& s : samples) {
    const auto a = s.to_array();
    for (std::size_t c = 0; c < kSampleDim; ++c) {
      const double d = a[c] - mean[c];
      var[c] += d * d;
    }
  }
  std::array<double, kSampleDim> sd{};
  for (std::size_t c = 0; c < kSampleDim; ++c) {
    sd[c] = std::sqrt(var[c] / n);
    if (!(sd[c] > 0.0)) {
      throw Error("column " + std::string(kColumnNames[c]) + " is constant");
    }
  }
  return Standardizer(mean, sd);
}

double Standardizer::standardize_component(std::size_t column, double raw) const {
  return (raw - means_.at(column)) / stds_.at(column);
}

double Standardizer::destandardize_component(std::size_t column, double z) const {
  return z * stds_.at(column) + means_.at(column);
}

std::array<double, kSampleDim> Standardizer::standardize(const Sample& s) const {
  auto a = s.to_array();
  for (std::size_t c = 0; c < kSampleDim; ++c) a[c] = standardize_component(c, a[c]);
  return a;
}

Sample Standardizer::destandardize(std::span<const double> z) const {
  if (z.size() != kSampleDim) throw DimensionError("destandardize expects 9 components");
  std::array<double, kSampleDim> a{};
  for (std::size_t c = 0; c < kSampleDim; ++c) a[c] = destandardize_component(c, z[c]);
  return Sample::from_array(a);
}

nn::Matrix Standardizer::standardize(std::span<const Sample> samples) const {
  nn::Matrix m(samples.size(), kSampleDim);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto a = standardize(samples[i]);
    std::copy(a.begin(), a.end(), m.row(i).begin());
  }
  return m;
}

std::vector<Sample> Standardizer::destandardize(const nn::Matrix& z) const {
  std::vector<Sample> out;
  out.reserve(z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) out.push_back(destandardize(z.row(i)));
  return out;
}

}  // namespace tabgen::data
