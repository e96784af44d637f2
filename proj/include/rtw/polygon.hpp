#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rtw/raster.hpp"

namespace rtw::poly {

// Shoelace area; positive for the vertex order used throughout the engine
// (x right, y down, visually clockwise).
double signed_area(std::span<const Point2> poly);
double area(std::span<const Point2> poly);

// Even-odd test; points on an edge may fall either way.
bool contains(std::span<const Point2> poly, Point2 p);
double distance_to_segment(Point2 p, Point2 a, Point2 b);
double distance_to_boundary(std::span<const Point2> poly, Point2 p);
// Inside, or within `tol` of the boundary.
bool contains_with_tolerance(std::span<const Point2> poly, Point2 p,
                             double tol);

bool is_convex(std::span<const Point2> poly);

// Andrew's monotone chain; output has positive signed area, no collinear
// points.
Polygon convex_hull(std::span<const Point2> points);

// Offsets every edge of a convex polygon outward by `pad` (mitred corners).
Polygon pad_convex(std::span<const Point2> convex, double pad);

// Sutherland-Hodgman clip of a convex or simple polygon against
// [x0,x1]x[y0,y1].
Polygon clip_to_rect(std::span<const Point2> poly, double x0, double y0,
                     double x1, double y1);

// Drops repeated and collinear consecutive vertices.
Polygon simplify(std::span<const Point2> poly, double eps = 1e-9);

// Calls fn(x, y) for every pixel whose center (x+0.5, y+0.5) lies inside
// the polygon, limited to [0,width)x[0,height).
void for_each_pixel_inside(std::span<const Point2> poly, std::uint32_t width,
                           std::uint32_t height,
                           const std::function<void(std::uint32_t,
                                                    std::uint32_t)>& fn);

}  // namespace rtw::poly
