#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "extended.hpp"

namespace weakot {

// Convex piecewise-linear function on [xs.front(), xs.back()], +inf outside.
struct PiecewiseLinear {
  std::vector<double> xs, ys;
  std::vector<std::size_t> source;  // index of the input point behind each vertex

  double operator()(double x) const {
    if (x < xs.front() || x > xs.back()) return kInf;
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.end()) return ys.back();
    const std::size_t i = static_cast<std::size_t>(it - xs.begin());
    if (i == 0) return ys.front();
    const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + t * (ys[i] - ys[i - 1]);
  }
};

namespace detail {
inline double cross(double ox, double oy, double ax, double ay, double bx, double by) {
  return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}
} // namespace detail

// Lower convex hull of the graph points by the monotone-chain scan; collinear points are dropped.
inline PiecewiseLinear convex_envelope_1d(const std::vector<double>& xs, const std::vector<double>& values) {
  if (xs.empty()) throw std::domain_error("convex_envelope_1d: no points");
  if (xs.size() != values.size()) throw std::domain_error("convex_envelope_1d: size mismatch");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw std::domain_error("convex_envelope_1d: xs must be strictly increasing");
  PiecewiseLinear f;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    while (f.xs.size() >= 2 &&
           detail::cross(f.xs[f.xs.size() - 2], f.ys[f.ys.size() - 2], f.xs.back(), f.ys.back(), xs[i], values[i]) <= 0.0) {
      f.xs.pop_back();
      f.ys.pop_back();
      f.source.pop_back();
    }
    f.xs.push_back(xs[i]);
    f.ys.push_back(values[i]);
    f.source.push_back(i);
  }
  return f;
}

struct Point2 {
  double a, b;
  std::size_t id;
};

// Convex hull (counter-clockwise, no collinear points). Fewer than three distinct points are returned as is.
inline std::vector<Point2> convex_hull_2d(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2& p, const Point2& q) { return p.a < q.a || (p.a == q.a && p.b < q.b); });
  pts.erase(std::unique(pts.begin(), pts.end(), [](const Point2& p, const Point2& q) { return p.a == q.a && p.b == q.b; }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && detail::cross(h[k - 2].a, h[k - 2].b, h[k - 1].a, h[k - 1].b, pts[i].a, pts[i].b) <= 0.0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && detail::cross(h[k - 2].a, h[k - 2].b, h[k - 1].a, h[k - 1].b, pts[i - 1].a, pts[i - 1].b) <= 0.0) --k;
    h[k++] = pts[i - 1];
  }
  h.resize(k - 1);
  return h;
}

} // namespace weakot
