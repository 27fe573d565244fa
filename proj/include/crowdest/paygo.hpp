#pragma once

// Pay-as-you-go: how many new distinct answers would m more HITs bring?
// Two predictors: the coverage-based Shen formula and extrapolation of a
// spline fitted to the permutation-averaged accumulation curve.

#include "crowdest/heuristics.hpp"
#include "crowdest/spline.hpp"
#include "crowdest/stream.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace crowdest {

enum class PaygoMethod { shen, spline };

[[nodiscard]] std::string_view to_string(PaygoMethod method);

struct PaygoPrediction {
  std::size_t m = 0;
  double expected_new_uniques = 0.0;
  PaygoMethod method = PaygoMethod::shen;
};

struct CurvePoint {
  double hits = 0.0;
  double unique = 0.0;
};

/// Accumulation curve with possibly fractional values (a permutation mean).
struct MeanCurve {
  std::vector<CurvePoint> points;
  std::size_t permutations = 0;
  std::uint64_t seed = 0;
};

[[nodiscard]] MeanCurve to_mean_curve(const SACurve& curve);

struct SplineModel {
  std::vector<CurvePoint> knots;
  CubicSpline curve;
  std::size_t permutations = 0;
  std::uint64_t seed = 0;

  [[nodiscard]] double operator()(double hits) const { return curve(hits); }
};

/// w [1 - (1 - (1 - C) / w)^m]; 0 when w <= 0. The per-draw discovery
/// probability (1 - C) / w is clamped to [0, 1].
[[nodiscard]] double shen_formula(double unseen, double coverage, std::size_t m);

/// Shen prediction with w = Chao92 - c and C the sample coverage.
[[nodiscard]] PaygoPrediction shen_predict(const FrequencyStatistics& fstat, std::size_t m);

/// Pointwise mean of the accumulation curves of `permutations` random
/// reorderings. Permutation p is drawn from derive_seed(seed, p). With
/// include_observed the first curve is the stream's own order.
[[nodiscard]] MeanCurve mean_sac(const AnswerStream& stream, std::size_t permutations,
                                 std::uint64_t seed, bool include_observed = false);

/// Knot spacing used by spline_fit for an n-point curve: max(1, floor(n/25)).
[[nodiscard]] std::size_t knot_stride(std::size_t n);

/// Interpolating cubic spline through every knot_stride-th point (and always
/// the last one), made monotone where the data is. Needs >= 4 points.
[[nodiscard]] SplineModel spline_fit(const MeanCurve& curve);

/// eval(n + m) - eval(n), extending the end segment and clamping the result
/// to [0, end_slope * m]. n must be the last knot abscissa.
[[nodiscard]] PaygoPrediction spline_predict(const SplineModel& model, std::size_t n, std::size_t m);

struct PaygoOptions {
  std::vector<std::size_t> m_values = {10, 20, 50, 100, 200};
  std::size_t permutations = 100;
  std::uint64_t seed = 0;
  /// Opt-in bias correction applied before both predictors.
  std::optional<HeuristicConfig> heuristic;
};

/// Both methods for every m, ordered by m then method (shen first).
[[nodiscard]] std::vector<PaygoPrediction> paygo_predict(const AnswerStream& stream,
                                                         const PaygoOptions& options);

}  // namespace crowdest
