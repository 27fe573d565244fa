#include "crowdest/series.hpp"

#include "crowdest/error.hpp"

#include <algorithm>

namespace crowdest {

SeriesRow evaluate_prefix(const AnswerStream& prefix_stream, const SeriesOptions& options) {
  SeriesRow row;
  row.hits = prefix_stream.size();
  const FrequencyStatistics raw = compute_fstat(prefix_stream);
  row.unique = raw.c;
  row.f1_ratio = f1_ratio(raw);

  std::vector<FrequencyStatistics> samples;
  if (options.heuristic) {
    for (const auto& s : heuristic_resamples(prefix_stream, *options.heuristic)) {
      samples.push_back(compute_fstat(s));
    }
  } else {
    samples.push_back(raw);
  }

  row.estimates.reserve(options.estimators.size());
  for (EstimatorKind kind : options.estimators) {
    double sum = 0.0;
    bool ok = true;
    for (const auto& fstat : samples) {
      try {
        sum += estimate(kind, fstat).value;
      } catch (const DomainError&) {
        ok = false;
        break;
      }
    }
    row.estimates.push_back(ok ? std::optional<double>(sum / static_cast<double>(samples.size()))
                               : std::nullopt);
  }

  if (samples.front().n >= 2) {
    double coverage = 0.0;
    double gamma2 = 0.0;
    for (const auto& fstat : samples) {
      coverage += sample_coverage(fstat);
      gamma2 += cv_squared(fstat);
    }
    row.coverage = coverage / static_cast<double>(samples.size());
    row.cv_squared = gamma2 / static_cast<double>(samples.size());
  }
  return row;
}

EstimateSeries estimate_series(const AnswerStream& stream, const SeriesOptions& options,
                               const std::function<void(const SeriesRow&)>& on_row) {
  if (options.step < 1) throw DomainError("step must be >= 1");
  if (options.heuristic) options.heuristic->validate();
  EstimateSeries series;
  series.estimators = options.estimators;
  const std::size_t n = stream.size();
  for (std::size_t k = options.step; k < n + options.step; k += options.step) {
    series.rows.push_back(evaluate_prefix(prefix(stream, std::min(k, n)), options));
    if (on_row) on_row(series.rows.back());
  }
  return series;
}

}  // namespace crowdest
