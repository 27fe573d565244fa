#include "crowdest/estimators.hpp"

#include "crowdest/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace crowdest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_sample(const FrequencyStatistics& fstat) {
  if (fstat.n == 0) throw DomainError("no samples");
  if (fstat.c == 0) throw DomainError("no distinct answers");
  if (fstat.c > fstat.n) {
    throw DomainError(fmt::format("distinct count {} exceeds sample size {}", fstat.c, fstat.n));
  }
}

// N (1 - e^{-n/N}) - c, written with expm1 so large N keeps its precision.
double occupancy_gap(double big_n, double n, double c) {
  return -big_n * std::expm1(-n / big_n) - c;
}

}  // namespace

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::uniform_mle: return "uniform";
    case EstimatorKind::chao84: return "chao84";
    case EstimatorKind::chao92: return "chao92";
  }
  return "unknown";
}

EstimatorKind parse_estimator_kind(std::string_view name) {
  if (name == "uniform" || name == "uniform_mle") return EstimatorKind::uniform_mle;
  if (name == "chao84") return EstimatorKind::chao84;
  if (name == "chao92") return EstimatorKind::chao92;
  throw DomainError(fmt::format("unknown estimator '{}'", name));
}

bool CardinalityEstimate::finite() const { return std::isfinite(value); }

CardinalityEstimate estimate_uniform_mle(const FrequencyStatistics& fstat) {
  require_sample(fstat);
  CardinalityEstimate est;
  est.kind = EstimatorKind::uniform_mle;
  if (fstat.c == fstat.n) {
    // Insufficient duplication: the occupancy equation has no finite root.
    est.value = kInf;
    est.low_confidence = true;
    return est;
  }
  const double n = static_cast<double>(fstat.n);
  const double c = static_cast<double>(fstat.c);

  // The gap is increasing in N, non-positive at N = c and tends to n - c > 0.
  double lo = c;
  if (occupancy_gap(lo, n, c) >= 0.0) {
    est.value = lo;
    return est;
  }
  double hi = std::max(10.0 * n, 2.0 * c);
  while (occupancy_gap(hi, n, c) < 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (occupancy_gap(mid, n, c) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  est.value = std::abs(occupancy_gap(lo, n, c)) <= std::abs(occupancy_gap(hi, n, c)) ? lo : hi;
  return est;
}

CardinalityEstimate estimate_chao84(const FrequencyStatistics& fstat) {
  require_sample(fstat);
  const double c = static_cast<double>(fstat.c);
  const double f1 = static_cast<double>(fstat.singletons());
  const double f2 = static_cast<double>(fstat.doubletons());
  CardinalityEstimate est;
  est.kind = EstimatorKind::chao84;
  est.value = f2 > 0.0 ? c + f1 * f1 / (2.0 * f2) : c + f1 * (f1 - 1.0) / 2.0;
  return est;
}

double sample_coverage(const FrequencyStatistics& fstat) {
  if (fstat.n == 0) throw DomainError("no samples");
  const double n = static_cast<double>(fstat.n);
  const double coverage = 1.0 - static_cast<double>(fstat.singletons()) / n;
  return std::max(coverage, 1.0 / (2.0 * n));
}

double cv_squared(const FrequencyStatistics& fstat) {
  if (fstat.n < 2) throw DomainError("needs two samples");
  const double n = static_cast<double>(fstat.n);
  const double c = static_cast<double>(fstat.c);
  double pair_sum = 0.0;
  for (auto [j, fj] : fstat.f) {
    const double jd = static_cast<double>(j);
    pair_sum += jd * (jd - 1.0) * static_cast<double>(fj);
  }
  const double raw = (c / sample_coverage(fstat)) * pair_sum / (n * (n - 1.0)) - 1.0;
  return std::max(raw, 0.0);
}

CardinalityEstimate estimate_chao92(const FrequencyStatistics& fstat) {
  require_sample(fstat);
  if (fstat.n < 2) throw DomainError("needs two samples");
  const double n = static_cast<double>(fstat.n);
  const double c = static_cast<double>(fstat.c);
  const double coverage = sample_coverage(fstat);
  const double gamma2 = cv_squared(fstat);

  CardinalityEstimate est;
  est.kind = EstimatorKind::chao92;
  est.coverage = coverage;
  est.cv_squared = gamma2;
  est.low_confidence = fstat.singletons() == fstat.n;
  est.value = c / coverage;
  if (gamma2 > 0.0) est.value += n * (1.0 - coverage) / coverage * gamma2;
  return est;
}

CardinalityEstimate estimate(EstimatorKind kind, const FrequencyStatistics& fstat) {
  switch (kind) {
    case EstimatorKind::uniform_mle: return estimate_uniform_mle(fstat);
    case EstimatorKind::chao84: return estimate_chao84(fstat);
    case EstimatorKind::chao92: return estimate_chao92(fstat);
  }
  throw DomainError("unknown estimator");
}

double completeness(const FrequencyStatistics& fstat, const CardinalityEstimate& est) {
  if (!est.finite()) return 0.0;
  if (est.value <= 0.0) return 0.0;
  return std::min(1.0, static_cast<double>(fstat.c) / est.value);
}

}  // namespace crowdest
