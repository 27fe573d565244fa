#pragma once

// Open-world cardinality estimators over the frequency-of-frequencies
// statistic.

#include "crowdest/stream.hpp"

#include <optional>
#include <string_view>

namespace crowdest {

enum class EstimatorKind { uniform_mle, chao84, chao92 };

[[nodiscard]] std::string_view to_string(EstimatorKind kind);
/// Accepts "uniform", "uniform_mle", "chao84", "chao92". Throws DomainError otherwise.
[[nodiscard]] EstimatorKind parse_estimator_kind(std::string_view name);

struct CardinalityEstimate {
  /// Estimated number of classes. +inf when the sample carries no duplicates
  /// and the estimator has no finite answer.
  double value = 0.0;
  EstimatorKind kind = EstimatorKind::chao92;
  std::optional<double> coverage;    // Good-Turing sample coverage
  std::optional<double> cv_squared;  // squared coefficient of variation
  /// Set when the value rests on a clamped coverage or a divergent solve.
  bool low_confidence = false;

  [[nodiscard]] bool finite() const;
};

/// Uniform-population maximum-likelihood estimate: the N with
/// c = N (1 - exp(-n / N)). Returns +inf (flagged) when c = n.
/// Throws DomainError when n = 0, c = 0 or c > n.
[[nodiscard]] CardinalityEstimate estimate_uniform_mle(const FrequencyStatistics& fstat);

/// c + f1^2 / (2 f2); with no doubletons falls back to c + f1 (f1 - 1) / 2.
[[nodiscard]] CardinalityEstimate estimate_chao84(const FrequencyStatistics& fstat);

/// Good-Turing coverage 1 - f1/n, clamped below at 1/(2n).
[[nodiscard]] double sample_coverage(const FrequencyStatistics& fstat);

/// Squared coefficient of variation estimate, floored at 0. Needs n >= 2.
[[nodiscard]] double cv_squared(const FrequencyStatistics& fstat);

/// c/C + n (1 - C) / C * cv^2, with C the sample coverage.
[[nodiscard]] CardinalityEstimate estimate_chao92(const FrequencyStatistics& fstat);

[[nodiscard]] CardinalityEstimate estimate(EstimatorKind kind, const FrequencyStatistics& fstat);

/// Observed distinct answers over the estimate; 0 for a divergent estimate.
[[nodiscard]] double completeness(const FrequencyStatistics& fstat, const CardinalityEstimate& est);

}  // namespace crowdest
