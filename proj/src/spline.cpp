#include "crowdest/spline.hpp"

#include "crowdest/error.hpp"

#include <algorithm>
#include <cmath>

namespace crowdest {

namespace {

// Dense Gaussian elimination with partial pivoting; systems here are small.
std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0.0) throw DomainError("singular spline system");
    std::swap(a[col], a[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r][col] / a[col][col];
      if (factor == 0.0) continue;
      for (std::size_t k = col; k < n; ++k) a[r][k] -= factor * a[col][k];
      rhs[r] -= factor * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace

CubicSpline CubicSpline::interpolate(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DomainError("spline abscissae and ordinates differ in length");
  if (xs.size() < 2) throw DomainError("spline needs at least two knots");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw DomainError("spline knots must strictly increase");
  }

  const std::size_t k = xs.size();
  std::vector<double> h(k - 1);
  for (std::size_t i = 0; i + 1 < k; ++i) h[i] = xs[i + 1] - xs[i];

  // Unknowns: second derivatives M_0..M_{k-1} at the knots.
  std::vector<double> m(k, 0.0);
  if (k >= 3) {
    std::vector<std::vector<double>> a(k, std::vector<double>(k, 0.0));
    std::vector<double> rhs(k, 0.0);
    for (std::size_t i = 1; i + 1 < k; ++i) {
      a[i][i - 1] = h[i - 1];
      a[i][i] = 2.0 * (h[i - 1] + h[i]);
      a[i][i + 1] = h[i];
      rhs[i] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
    }
    if (k == 3) {
      // Single parabola: constant second derivative.
      a[0][0] = 1.0;
      a[0][1] = -1.0;
      a[2][1] = 1.0;
      a[2][2] = -1.0;
    } else {
      // Not-a-knot: third derivative continuous across the second and
      // second-to-last knots.
      a[0][0] = h[1];
      a[0][1] = -(h[0] + h[1]);
      a[0][2] = h[0];
      a[k - 1][k - 3] = h[k - 2];
      a[k - 1][k - 2] = -(h[k - 3] + h[k - 2]);
      a[k - 1][k - 1] = h[k - 3];
    }
    m = solve(std::move(a), std::move(rhs));
  }

  CubicSpline s;
  s.xs_.assign(xs.begin(), xs.end());
  s.ys_.assign(ys.begin(), ys.end());
  s.segments_.resize(k - 1);
  for (std::size_t i = 0; i + 1 < k; ++i) {
    Segment& seg = s.segments_[i];
    seg.a = ys[i];
    seg.b = (ys[i + 1] - ys[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0;
    seg.c = m[i] / 2.0;
    seg.d = (m[i + 1] - m[i]) / (6.0 * h[i]);
  }
  return s;
}

void CubicSpline::rebuild_segment(std::size_t i, double d0, double d1) {
  const double h = xs_[i + 1] - xs_[i];
  const double delta = (ys_[i + 1] - ys_[i]) / h;
  Segment& seg = segments_[i];
  seg.a = ys_[i];
  seg.b = d0;
  seg.c = (3.0 * delta - 2.0 * d0 - d1) / h;
  seg.d = (d0 + d1 - 2.0 * delta) / (h * h);
}

bool CubicSpline::segment_non_decreasing(std::size_t i, double tol) const {
  const Segment& seg = segments_[i];
  const double h = xs_[i + 1] - xs_[i];
  auto slope = [&](double t) { return seg.b + 2.0 * seg.c * t + 3.0 * seg.d * t * t; };
  double lowest = std::min(slope(0.0), slope(h));
  if (seg.d != 0.0) {
    const double vertex = -seg.c / (3.0 * seg.d);
    if (vertex > 0.0 && vertex < h) lowest = std::min(lowest, slope(vertex));
  }
  return lowest >= -tol;
}

void CubicSpline::enforce_monotone() {
  const std::size_t k = xs_.size();
  if (k < 2) return;
  std::vector<double> d(k);
  for (std::size_t i = 0; i + 1 < k; ++i) d[i] = segments_[i].b;
  {
    const Segment& last = segments_.back();
    const double h = xs_[k - 1] - xs_[k - 2];
    d[k - 1] = last.b + 2.0 * last.c * h + 3.0 * last.d * h * h;
  }

  // Each pass only shrinks derivatives toward the Fritsch-Carlson region, so
  // the loop terminates; the cap is a guard against round-off cycling.
  for (int pass = 0; pass < 64; ++pass) {
    bool changed = false;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      if (segment_non_decreasing(i, 1e-12)) continue;
      const double delta = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
      if (delta <= 0.0) {
        d[i] = 0.0;
        d[i + 1] = 0.0;
      } else {
        double alpha = std::max(d[i] / delta, 0.0);
        double beta = std::max(d[i + 1] / delta, 0.0);
        const double norm = std::hypot(alpha, beta);
        if (norm > 3.0) {
          alpha *= 3.0 / norm;
          beta *= 3.0 / norm;
        }
        d[i] = alpha * delta;
        d[i + 1] = beta * delta;
      }
      if (i > 0) rebuild_segment(i - 1, d[i - 1], d[i]);
      rebuild_segment(i, d[i], d[i + 1]);
      if (i + 2 < k) rebuild_segment(i + 1, d[i + 1], d[i + 2]);
      changed = true;
    }
    if (!changed) break;
  }
}

std::size_t CubicSpline::locate(double x) const {
  if (x <= xs_.front()) return 0;
  if (x >= xs_.back()) return segments_.size() - 1;
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  return static_cast<std::size_t>(it - xs_.begin()) - 1;
}

double CubicSpline::operator()(double x) const {
  const std::size_t i = locate(x);
  const Segment& seg = segments_[i];
  const double t = x - xs_[i];
  return seg.a + t * (seg.b + t * (seg.c + t * seg.d));
}

double CubicSpline::derivative(double x) const {
  const std::size_t i = locate(x);
  const Segment& seg = segments_[i];
  const double t = x - xs_[i];
  return seg.b + t * (2.0 * seg.c + 3.0 * t * seg.d);
}

}  // namespace crowdest
