#pragma once

#include <vector>

#include "orisurf/types.hpp"

namespace orisurf {

/// Planar polygon as an ordered vertex list. Convex routines expect
/// counter-clockwise order.
using Polygon = std::vector<Vec2>;

double signed_area(const Polygon& poly);
inline double area(const Polygon& poly) { return std::abs(signed_area(poly)); }
Vec2 centroid(const Polygon& poly);

/// Reverses `poly` in place if it is clockwise.
void make_ccw(Polygon& poly);

/// Keeps the part of `poly` where dot(normal, p) + offset >= 0.
Polygon clip_half_plane(const Polygon& poly, const Vec2& normal, double offset);

/// Intersection of `subject` with the convex CCW polygon `clip`.
Polygon clip_convex(const Polygon& subject, const Polygon& clip);

/// Convex hull (CCW, no collinear points) of a point set.
Polygon convex_hull(std::vector<Vec2> points);

/// Axis-aligned square of side `side` centered at `center`, CCW.
Polygon square(const Vec2& center, double side);

} // namespace orisurf
