#pragma once

#include <span>
#include <vector>

#include "uqod/types.hpp"

namespace uqod::geometry {

struct Point2D {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2D&) const = default;
  auto operator<=>(const Point2D&) const = default;
};

/// Counter-clockwise, strictly convex vertex list. One vertex marks a point
/// hull and two vertices a segment hull; both have zero area.
struct ConvexPolygon {
  std::vector<Point2D> vertices;

  bool degenerate() const { return vertices.size() < 3; }
  bool operator==(const ConvexPolygon&) const = default;
};

/// Twice the signed area of triangle (o, a, b); positive for a left turn.
double cross(const Point2D& o, const Point2D& a, const Point2D& b);

/// Andrew's monotone chain. Collinear boundary points are dropped and the
/// first vertex is the lexicographically smallest point.
/// Throws std::invalid_argument("no points") on empty input.
ConvexPolygon convex_hull(std::span<const Point2D> points);

/// Shoelace area; degenerate polygons yield 0.
double polygon_area(const ConvexPolygon& polygon);

/// True when p lies inside or on the boundary of the polygon, with an
/// absolute tolerance on the edge test.
bool contains(const ConvexPolygon& polygon, const Point2D& p, double tolerance = 1e-9);

double intersection_area(const BoundingBox& a, const BoundingBox& b);

/// Intersection over union of two axis-aligned boxes, in [0, 1].
double iou(const BoundingBox& a, const BoundingBox& b);

}  // namespace uqod::geometry
