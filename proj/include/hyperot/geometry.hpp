#pragma once

#include <cmath>

namespace hyperot {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Twice the signed area of (p1, p2, p3); positive for counterclockwise order.
inline double signed_area2(const Point2& p1, const Point2& p2, const Point2& p3) {
  return (p2.x - p1.x) * (p3.y - p1.y) - (p3.x - p1.x) * (p2.y - p1.y);
}

/// Absolute shoelace area. Degenerate triples give 0.
inline double triangle_area(const Point2& p1, const Point2& p2, const Point2& p3) {
  return 0.5 * std::abs(signed_area2(p1, p2, p3));
}

inline double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace hyperot
