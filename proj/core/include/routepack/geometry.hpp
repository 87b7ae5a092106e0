#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace routepack {

/// Screen-space point or vector in pixels. The y axis points down.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;
};

using Polyline = std::vector<Vec2>;

inline constexpr double kPi = 3.14159265358979323846;

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(b - a); }
Vec2 normalized(Vec2 a);

// Visual counter-clockwise quarter turn on a y-down screen: east maps to
// north. This is the "left" side of travel as seen on the rendered map.
constexpr Vec2 left_normal(Vec2 dir) { return {dir.y, -dir.x}; }

/// Direction angle in degrees measured counter-clockwise as seen on screen.
double screen_angle_deg(Vec2 v);

/// Wraps an angle in degrees into (-180, 180].
double normalize_angle_deg(double deg);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
double point_polyline_distance(Vec2 p, std::span<const Vec2> line);

double polyline_length(std::span<const Vec2> line);

/// Cumulative arc length at each vertex; front() is 0.
std::vector<double> arc_lengths(std::span<const Vec2> line);

/// Point at arc length `s`, clamped to the polyline.
Vec2 point_at(std::span<const Vec2> line, std::span<const double> cumulative, double s);

/// Unit tangent of the segment containing arc length `s`.
Vec2 tangent_at(std::span<const Vec2> line, std::span<const double> cumulative, double s);

/// Douglas-Peucker simplification; endpoints are always kept.
Polyline simplify(std::span<const Vec2> line, double tolerance);

/// Drops consecutive points closer than `eps`.
Polyline dedupe(std::span<const Vec2> line, double eps = 1e-9);

/// Symmetric Hausdorff distance estimated by sampling both curves every `step` px.
double hausdorff_distance(std::span<const Vec2> a, std::span<const Vec2> b, double step = 0.05);

/// Minimum distance between any two points of two polylines.
double polyline_distance(std::span<const Vec2> a, std::span<const Vec2> b);

/// Orientation of c relative to the directed line a->b: +1 left-turn in math
/// coordinates, -1 right, 0 collinear within `eps` scaled by segment length.
int orientation(Vec2 a, Vec2 b, Vec2 c, double eps = 1e-12);

bool segments_intersect(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1, Vec2* where = nullptr);

}  // namespace routepack
