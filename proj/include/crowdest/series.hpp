#pragma once

// Estimates evaluated on growing prefixes of a stream, for plotting and replay.

#include "crowdest/estimators.hpp"
#include "crowdest/heuristics.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace crowdest {

struct SeriesOptions {
  std::size_t step = 50;
  std::vector<EstimatorKind> estimators = {EstimatorKind::uniform_mle, EstimatorKind::chao84,
                                           EstimatorKind::chao92};
  /// When set, every prefix is bias-corrected before estimation.
  std::optional<HeuristicConfig> heuristic;
};

struct SeriesRow {
  std::size_t hits = 0;
  std::size_t unique = 0;
  /// f1-ratio of the (uncorrected) prefix.
  double f1_ratio = 0.0;
  /// One entry per requested estimator, in SeriesOptions order; empty when
  /// the estimator rejected the prefix. +inf marks a divergent estimate.
  std::vector<std::optional<double>> estimates;
  /// Chao92 diagnostics on the (possibly corrected) prefix, when defined.
  std::optional<double> coverage;
  std::optional<double> cv_squared;
};

struct EstimateSeries {
  std::vector<EstimatorKind> estimators;
  std::vector<SeriesRow> rows;
};

/// Evaluates one prefix. Heuristic resamples are averaged per estimator.
[[nodiscard]] SeriesRow evaluate_prefix(const AnswerStream& prefix_stream, const SeriesOptions& options);

/// Rows at step, 2*step, ... and finally at n (a partial last step still
/// yields a row at n).
/// on_row, when given, is called as each row is produced.
[[nodiscard]] EstimateSeries estimate_series(
    const AnswerStream& stream, const SeriesOptions& options,
    const std::function<void(const SeriesRow&)>& on_row = {});

}  // namespace crowdest
