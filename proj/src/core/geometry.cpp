#include "uqod/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uqod::geometry {

double cross(const Point2D& o, const Point2D& a, const Point2D& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

ConvexPolygon convex_hull(std::span<const Point2D> points) {
  if (points.empty()) {
    throw std::invalid_argument("no points");
  }
  std::vector<Point2D> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.size() < 3) {
    return ConvexPolygon{sorted};
  }

  std::vector<Point2D> hull(2 * sorted.size());
  std::size_t k = 0;
  for (const auto& p : sorted) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (auto it = sorted.rbegin() + 1; it != sorted.rend(); ++it) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0.0) --k;
    hull[k++] = *it;
  }
  // The last point equals the first.
  hull.resize(k - 1);
  return ConvexPolygon{std::move(hull)};
}

double polygon_area(const ConvexPolygon& polygon) {
  const auto& v = polygon.vertices;
  if (v.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::fabs(twice) * 0.5;
}

bool contains(const ConvexPolygon& polygon, const Point2D& p, double tolerance) {
  const auto& v = polygon.vertices;
  if (v.empty()) return false;
  if (v.size() == 1) {
    return std::hypot(p.x - v[0].x, p.y - v[0].y) <= tolerance;
  }
  if (v.size() == 2) {
    const double len = std::hypot(v[1].x - v[0].x, v[1].y - v[0].y);
    if (std::fabs(cross(v[0], v[1], p)) > tolerance * std::max(len, 1.0)) return false;
    const double t = ((p.x - v[0].x) * (v[1].x - v[0].x) + (p.y - v[0].y) * (v[1].y - v[0].y)) /
                     (len * len);
    return t >= -tolerance && t <= 1.0 + tolerance;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (cross(a, b, p) < -tolerance * std::max(len, 1.0)) return false;
  }
  return true;
}

double intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace uqod::geometry
