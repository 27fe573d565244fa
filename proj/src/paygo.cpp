#include "crowdest/paygo.hpp"

#include "crowdest/error.hpp"
#include "crowdest/estimators.hpp"
#include "crowdest/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace crowdest {

std::string_view to_string(PaygoMethod method) {
  return method == PaygoMethod::shen ? "shen" : "spline";
}

MeanCurve to_mean_curve(const SACurve& curve) {
  MeanCurve out;
  out.permutations = 1;
  out.points.reserve(curve.points.size());
  for (const auto& p : curve.points) {
    out.points.push_back({static_cast<double>(p.hits), static_cast<double>(p.unique)});
  }
  return out;
}

double shen_formula(double unseen, double coverage, std::size_t m) {
  if (!(unseen > 0.0) || m == 0) return 0.0;
  if (std::isinf(unseen)) return static_cast<double>(m) * std::clamp(1.0 - coverage, 0.0, 1.0);
  const double discovery = std::clamp((1.0 - coverage) / unseen, 0.0, 1.0);
  if (discovery >= 1.0) return unseen;
  // 1 - (1 - q)^m without cancellation for small q.
  const double missed = std::exp(static_cast<double>(m) * std::log1p(-discovery));
  return unseen * (1.0 - missed);
}

PaygoPrediction shen_predict(const FrequencyStatistics& fstat, std::size_t m) {
  const CardinalityEstimate chao = estimate_chao92(fstat);
  const double unseen = chao.value - static_cast<double>(fstat.c);
  const double coverage = sample_coverage(fstat);
  return {m, shen_formula(unseen, coverage, m), PaygoMethod::shen};
}

MeanCurve mean_sac(const AnswerStream& stream, std::size_t permutations, std::uint64_t seed,
                   bool include_observed) {
  if (permutations < 1) throw DomainError("mean_sac needs at least one permutation");
  const auto ids = answer_ids(stream);
  const std::size_t n = ids.size();
  std::size_t distinct = 0;
  for (std::size_t id : ids) distinct = std::max(distinct, id + 1);

  std::vector<double> totals(n, 0.0);
  std::vector<std::size_t> order(ids);
  std::vector<char> seen(distinct);
  for (std::size_t p = 0; p < permutations; ++p) {
    order = ids;
    if (!(include_observed && p == 0)) {
      Rng rng(derive_seed(seed, p));
      rng.shuffle(order);
    }
    std::fill(seen.begin(), seen.end(), 0);
    std::size_t unique = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (!seen[order[k]]) {
        seen[order[k]] = 1;
        ++unique;
      }
      totals[k] += static_cast<double>(unique);
    }
  }

  MeanCurve curve;
  curve.permutations = permutations;
  curve.seed = seed;
  curve.points.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    curve.points.push_back({static_cast<double>(k + 1), totals[k] / static_cast<double>(permutations)});
  }
  return curve;
}

std::size_t knot_stride(std::size_t n) { return std::max<std::size_t>(1, n / 25); }

SplineModel spline_fit(const MeanCurve& curve) {
  const std::size_t n = curve.points.size();
  if (n < 4) throw DomainError(fmt::format("spline fit needs >= 4 points, got {}", n));
  const std::size_t stride = knot_stride(n);

  SplineModel model;
  model.permutations = curve.permutations;
  model.seed = curve.seed;
  // Every stride-th point from the first, plus the last point.
  for (std::size_t i = 0; i < n; i += stride) model.knots.push_back(curve.points[i]);
  if (model.knots.back().hits != curve.points.back().hits) model.knots.push_back(curve.points.back());

  std::vector<double> xs;
  std::vector<double> ys;
  bool non_decreasing = true;
  for (const auto& k : model.knots) {
    if (!ys.empty() && k.unique < ys.back()) non_decreasing = false;
    xs.push_back(k.hits);
    ys.push_back(k.unique);
  }
  model.curve = CubicSpline::interpolate(xs, ys);
  if (non_decreasing) model.curve.enforce_monotone();
  return model;
}

PaygoPrediction spline_predict(const SplineModel& model, std::size_t n, std::size_t m) {
  const double end = model.knots.back().hits;
  if (static_cast<double>(n) != end) {
    throw DomainError(fmt::format("spline_predict: n = {} but the model ends at {}", n, end));
  }
  PaygoPrediction out{m, 0.0, PaygoMethod::spline};
  if (m == 0) return out;

  const CubicSpline& s = model.curve;
  const double end_slope = std::max(s.derivative(end), 0.0);
  if (end_slope == 0.0) return out;

  // The extended end cubic may turn over; hold its value from the first
  // stationary point on so the prediction stays non-decreasing in m.
  const auto& seg = s.segments().back();
  const double x0 = s.knots()[s.knots().size() - 2];
  const double t_end = end - x0;
  double t_stop = std::numeric_limits<double>::infinity();
  // slope(t) = b + 2c t + 3d t^2; find the smallest root beyond t_end.
  const double qa = 3.0 * seg.d;
  const double qb = 2.0 * seg.c;
  const double qc = seg.b;
  if (qa != 0.0) {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      for (double t : {(-qb - root) / (2.0 * qa), (-qb + root) / (2.0 * qa)}) {
        if (t > t_end && t < t_stop) t_stop = t;
      }
    }
  } else if (qb != 0.0) {
    const double t = -qc / qb;
    if (t > t_end) t_stop = t;
  }

  const double target = std::min(end + static_cast<double>(m), x0 + t_stop);
  const double gain = s(target) - s(end);
  out.expected_new_uniques = std::clamp(gain, 0.0, end_slope * static_cast<double>(m));
  return out;
}

std::vector<PaygoPrediction> paygo_predict(const AnswerStream& stream, const PaygoOptions& options) {
  const AnswerStream sample = options.heuristic ? apply_heuristic(stream, *options.heuristic) : stream;
  const FrequencyStatistics fstat = compute_fstat(sample);
  const SplineModel model = spline_fit(mean_sac(sample, options.permutations, options.seed));

  std::vector<PaygoPrediction> out;
  out.reserve(2 * options.m_values.size());
  for (std::size_t m : options.m_values) {
    out.push_back(shen_predict(fstat, m));
    out.push_back(spline_predict(model, sample.size(), m));
  }
  return out;
}

}  // namespace crowdest
