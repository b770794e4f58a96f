#include "tabgen/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "tabgen/error.hpp"
#include "tabgen/random.hpp"

namespace tabgen::data {

PmpVector PmpVector::from_array(std::span<const double> v) {
  if (v.size() != kNumInputs) throw DimensionError("PMP vector needs 5 components");
  return {v[0], v[1], v[2], v[3], v[4]};
}

VoidFractionVector VoidFractionVector::from_array(std::span<const double> v) {
  if (v.size() != kNumOutputs) throw DimensionError("void fraction vector needs 4 components");
  return {v[0], v[1], v[2], v[3]};
}

std::array<double, kSampleDim> Sample::to_array() const {
  return {inputs.p1008,   inputs.p1012,   inputs.p1022,   inputs.p1028,  inputs.p1029,
          outputs.voidf1, outputs.voidf2, outputs.voidf3, outputs.voidf4};
}

Sample Sample::from_array(std::span<const double> v) {
  if (v.size() != kSampleDim) {
    throw DimensionError("sample needs 9 components, got " + std::to_string(v.size()));
  }
  return {PmpVector::from_array(v.first(kNumInputs)),
          VoidFractionVector::from_array(v.subspan(kNumInputs))};
}

namespace {

double logistic(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace

VoidFractionVector oracle_evaluate(const PmpVector& pmp) {
  for (double v : pmp.to_array()) {
    if (!std::isfinite(v)) throw NumericalError("oracle input is not finite");
  }
  const double onset = 0.15 + 0.04 * pmp.p1012 + 0.02 * pmp.p1008;
  const double steepness = 6.0 + 0.8 * pmp.p1022;
  const double ceiling = 0.85 / (1.0 + 0.06 * (pmp.p1028 + pmp.p1029));
  const double inlet = ceiling * logistic(-steepness * onset);

  std::array<double, kNumOutputs> out{};
  for (std::size_t j = 0; j < kNumOutputs; ++j) {
    const double v = ceiling * logistic(steepness * (kAxialPositions[j] - onset)) - inlet;
    out[j] = std::clamp(v, 0.0, 1.0);
  }
  return VoidFractionVector::from_array(out);
}

std::vector<Sample> make_training_set(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw UsageError("training set size must be at least 1");
  Rng rng(seed);
  std::vector<Sample> samples;
  samples.reserve(n);
  while (samples.size() < n) {
    std::array<double, kNumInputs> p{};
    for (double& v : p) v = rng.uniform(kDomainLow, kDomainHigh);
    // uniform_real_distribution is half-open; the domain is open.
    if (std::any_of(p.begin(), p.end(), [](double v) { return v <= kDomainLow; })) continue;
    const auto pmp = PmpVector::from_array(p);
    samples.push_back({pmp, oracle_evaluate(pmp)});
  }
  return samples;
}

bool in_domain(const PmpVector& pmp) {
  const auto p = pmp.to_array();
  return std::all_of(p.begin(), p.end(),
                     [](double v) { return v > kDomainLow && v < kDomainHigh; });
}

FilterResult in_domain_filter(std::span<const Sample> samples) {
  FilterResult result;
  for (const auto& s : samples) {
    if (in_domain(s.inputs)) {
      result.kept.push_back(s);
    } else {
      ++result.rejected_count;
    }
  }
  return result;
}

nn::Matrix to_matrix(std::span<const Sample> samples) {
  nn::Matrix m(samples.size(), kSampleDim);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto a = samples[i].to_array();
    std::copy(a.begin(), a.end(), m.row(i).begin());
  }
  return m;
}

std::vector<Sample> from_matrix(const nn::Matrix& m) {
  std::vector<Sample> out;
  out.reserve(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(Sample::from_array(m.row(i)));
  return out;
}

}  // namespace tabgen::data
