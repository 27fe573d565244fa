#pragma once

// Piecewise-cubic interpolant in Hermite form, fitted as a not-a-knot cubic
// spline and optionally repaired to be monotone (Fritsch-Carlson limiter).

#include <span>
#include <vector>

namespace crowdest {

class CubicSpline {
 public:
  /// Coefficients of y = a + b t + c t^2 + d t^3 with t = x - x_i.
  struct Segment {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
  };

  CubicSpline() = default;

  /// Not-a-knot interpolating spline. Needs >= 2 strictly increasing abscissae;
  /// 2 knots give a line, 3 a parabola. Throws DomainError otherwise.
  static CubicSpline interpolate(std::span<const double> xs, std::span<const double> ys);

  /// Clamps knot derivatives so every segment over non-decreasing data is
  /// itself non-decreasing. Segments that are already monotone are untouched.
  void enforce_monotone();

  /// Evaluates the interpolant; beyond either end the end segment's cubic is extended.
  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] double derivative(double x) const;

  [[nodiscard]] const std::vector<double>& knots() const noexcept { return xs_; }
  [[nodiscard]] const std::vector<Segment>& segments() const noexcept { return segments_; }

  /// True if the derivative is >= -tol everywhere on [x_i, x_{i+1}].
  [[nodiscard]] bool segment_non_decreasing(std::size_t i, double tol = 0.0) const;

 private:
  [[nodiscard]] std::size_t locate(double x) const;
  void rebuild_segment(std::size_t i, double d0, double d1);

  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<Segment> segments_;
};

}  // namespace crowdest
