#pragma once

#include <cmath>

namespace gdopsel {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// 2-D point/vector, metres.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend bool operator==(Point2 a, Point2 b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(Point2 a, Point2 b) { return !(a == b); }
};

inline double norm(Point2 p) { return std::hypot(p.x, p.y); }

/// Euclidean distance.
inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Largest per-axis gap; the deployment spacing rule is expressed in it.
inline double chebyshev_distance(Point2 a, Point2 b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

/// Angle of the vector from `from` to `to`, radians in (-pi, pi].
inline double azimuth(Point2 from, Point2 to) { return std::atan2(to.y - from.y, to.x - from.x); }

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, kTwoPi);
  if (a <= 0.0) a += kTwoPi;
  return a - kPi;
}

/// Axis-aligned rectangle, inclusive bounds.
struct Rect {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  Point2 center() const { return {0.5 * (min_x + max_x), 0.5 * (min_y + max_y)}; }
  bool contains(Point2 p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
};

}  // namespace gdopsel
