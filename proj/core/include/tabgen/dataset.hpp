#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tabgen/matrix.hpp"

namespace tabgen::data {

inline constexpr std::size_t kNumInputs = 5;
inline constexpr std::size_t kNumOutputs = 4;
inline constexpr std::size_t kSampleDim = kNumInputs + kNumOutputs;

/// Lower and upper bounds of the open training domain for every PMP.
inline constexpr double kDomainLow = 0.0;
inline constexpr double kDomainHigh = 5.0;

/// Canonical column names, inputs first.
inline constexpr std::array<std::string_view, kSampleDim> kColumnNames = {
    "P1008", "P1012", "P1022", "P1028", "P1029", "VoidF1", "VoidF2", "VoidF3", "VoidF4"};

/// Version tag of the analytic void-fraction oracle. Reports produced under
/// different tags are not comparable.
inline constexpr std::string_view kOracleVersion = "logistic-axial-v1";

/// Multiplicative factors on the five simulator closure models.
struct PmpVector {
  double p1008 = 1.0;
  double p1012 = 1.0;
  double p1022 = 1.0;
  double p1028 = 1.0;
  double p1029 = 1.0;

  std::array<double, kNumInputs> to_array() const { return {p1008, p1012, p1022, p1028, p1029}; }
  static PmpVector from_array(std::span<const double> v);

  friend bool operator==(const PmpVector&, const PmpVector&) = default;
};

/// Void fractions at four axial stations, bottom to top.
struct VoidFractionVector {
  double voidf1 = 0.0;
  double voidf2 = 0.0;
  double voidf3 = 0.0;
  double voidf4 = 0.0;

  std::array<double, kNumOutputs> to_array() const { return {voidf1, voidf2, voidf3, voidf4}; }
  static VoidFractionVector from_array(std::span<const double> v);

  friend bool operator==(const VoidFractionVector&, const VoidFractionVector&) = default;
};

struct Sample {
  PmpVector inputs;
  VoidFractionVector outputs;

  std::array<double, kSampleDim> to_array() const;
  static Sample from_array(std::span<const double> v);

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Axial measurement positions used by the oracle (normalised height).
inline constexpr std::array<double, kNumOutputs> kAxialPositions = {0.20, 0.47, 0.73, 1.00};

/// Deterministic stand-in for the thermal-hydraulics simulator.
///
/// Void onset height z0 = 0.15 + 0.04 P1012 + 0.02 P1008, profile steepness
/// k = 6 + 0.8 P1022 and ceiling vmax = 0.85 / (1 + 0.06 (P1028 + P1029)).
/// Each station reads vmax * (sigmoid(k (z - z0)) - sigmoid(-k z0)), clamped
/// to [0, 1]; the offset pins the inlet to zero void. The profile is
/// nondecreasing in z for any positive inputs.
///
/// Throws NumericalError on non-finite input. The domain is not enforced.
VoidFractionVector oracle_evaluate(const PmpVector& pmp);

/// Oracle-labelled training set with PMPs drawn i.i.d. uniform on (0, 5)^5.
std::vector<Sample> make_training_set(std::size_t n, std::uint64_t seed);

/// True iff every PMP lies strictly inside (0, 5).
bool in_domain(const PmpVector& pmp);

struct FilterResult {
  std::vector<Sample> kept;
  std::size_t rejected_count = 0;
};

/// Keeps samples whose PMPs are all in the open training domain. Void
/// fractions are not inspected.
FilterResult in_domain_filter(std::span<const Sample> samples);

nn::Matrix to_matrix(std::span<const Sample> samples);
std::vector<Sample> from_matrix(const nn::Matrix& m);

}  // namespace tabgen::data
