#pragma once

#include "bbc/common.hpp"

#include <algorithm>
#include <vector>

namespace bbc {

/// z-component of (a - o) x (b - o).
template <typename Scalar>
Scalar cross(const Point2<Scalar>& o, const Point2<Scalar>& a, const Point2<Scalar>& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

/// Convex hull by Andrew's monotone chain.
///
/// Points are sorted lexicographically by (x, y); the hull is returned
/// counterclockwise starting from the lexicographically smallest point.
/// Collinear points on an edge are dropped, as are exact duplicates.
/// `tolerance` is the cross-product magnitude treated as collinear; it
/// absorbs rounding in points that are images of exact lattice vectors.
template <typename Scalar>
std::vector<Point2<Scalar>> convex_hull(std::vector<Point2<Scalar>> pts, Scalar tolerance = Scalar(0)) {
  std::sort(pts.begin(), pts.end(), [](const Point2<Scalar>& a, const Point2<Scalar>& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(), [](const Point2<Scalar>& a, const Point2<Scalar>& b) {
              return a.x() == b.x() && a.y() == b.y();
            }),
            pts.end());
  if (pts.size() < 3) return pts;

  std::vector<Point2<Scalar>> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= tolerance) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= tolerance) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

/// True when `p` lies inside the counterclockwise convex polygon `poly`, or
/// outside by at most `margin` (Euclidean distance to the violated edge line).
template <typename Scalar>
bool contains(const std::vector<Point2<Scalar>>& poly, const Point2<Scalar>& p, Scalar margin) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    const Scalar len = (b - a).norm();
    if (cross(a, b, p) / len < -margin) return false;
  }
  return true;
}

}  // namespace bbc
