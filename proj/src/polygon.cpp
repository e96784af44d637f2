#include "rtw/polygon.hpp"

#include <algorithm>
#include <cmath>

namespace rtw::poly {

double signed_area(std::span<const Point2> poly) {
  double a = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = poly[i];
    const Point2& q = poly[(i + 1) % n];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

double area(std::span<const Point2> poly) { return std::abs(signed_area(poly)); }

bool contains(std::span<const Point2> poly, Point2 p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

double distance_to_segment(Point2 p, Point2 a, Point2 b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  }
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

double distance_to_boundary(std::span<const Point2> poly, Point2 p) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best, distance_to_segment(p, poly[i], poly[(i + 1) % n]));
  }
  return best;
}

bool contains_with_tolerance(std::span<const Point2> poly, Point2 p,
                             double tol) {
  return contains(poly, p) || distance_to_boundary(poly, p) <= tol;
}

namespace {

double cross(Point2 o, Point2 a, Point2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

bool is_convex(std::span<const Point2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = cross(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]);
    if (std::abs(c) < 1e-12) continue;
    const int s = c > 0 ? 1 : -1;
    if (sign == 0) {
      sign = s;
    } else if (s != sign) {
      return false;
    }
  }
  return sign != 0;
}

Polygon convex_hull(std::span<const Point2> points) {
  Polygon pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  Polygon hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

Polygon pad_convex(std::span<const Point2> convex, double pad) {
  const std::size_t n = convex.size();
  if (n < 3) return Polygon(convex.begin(), convex.end());
  const double orient = signed_area(convex) >= 0 ? 1.0 : -1.0;
  // Outward normal of edge i -> i+1 for positive orientation is (dy, -dx).
  struct Line {
    Point2 p;
    Point2 d;
  };
  std::vector<Line> lines(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = convex[i];
    const Point2 b = convex[(i + 1) % n];
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len = std::hypot(dx, dy);
    const Point2 normal{orient * dy / len, -orient * dx / len};
    lines[i] = {{a.x + pad * normal.x, a.y + pad * normal.y}, {dx, dy}};
  }
  Polygon out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Line& l0 = lines[(i + n - 1) % n];
    const Line& l1 = lines[i];
    const double denom = l0.d.x * l1.d.y - l0.d.y * l1.d.x;
    if (std::abs(denom) < 1e-12) {
      out[i] = l1.p;
      continue;
    }
    const double t = ((l1.p.x - l0.p.x) * l1.d.y - (l1.p.y - l0.p.y) * l1.d.x) /
                     denom;
    out[i] = {l0.p.x + t * l0.d.x, l0.p.y + t * l0.d.y};
  }
  return out;
}

Polygon clip_to_rect(std::span<const Point2> poly, double x0, double y0,
                     double x1, double y1) {
  Polygon cur(poly.begin(), poly.end());
  auto clip = [&cur](auto inside, auto intersect) {
    Polygon out;
    const std::size_t n = cur.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 a = cur[i];
      const Point2 b = cur[(i + 1) % n];
      const bool ia = inside(a);
      const bool ib = inside(b);
      if (ia) out.push_back(a);
      if (ia != ib) out.push_back(intersect(a, b));
    }
    cur = std::move(out);
  };
  auto at_x = [](double x) {
    return [x](Point2 a, Point2 b) {
      const double t = (x - a.x) / (b.x - a.x);
      return Point2{x, a.y + t * (b.y - a.y)};
    };
  };
  auto at_y = [](double y) {
    return [y](Point2 a, Point2 b) {
      const double t = (y - a.y) / (b.y - a.y);
      return Point2{a.x + t * (b.x - a.x), y};
    };
  };
  clip([x0](Point2 p) { return p.x >= x0; }, at_x(x0));
  clip([x1](Point2 p) { return p.x <= x1; }, at_x(x1));
  clip([y0](Point2 p) { return p.y >= y0; }, at_y(y0));
  clip([y1](Point2 p) { return p.y <= y1; }, at_y(y1));
  return simplify(cur);
}

Polygon simplify(std::span<const Point2> poly, double eps) {
  Polygon out;
  for (const auto& p : poly) {
    if (!out.empty() && std::abs(out.back().x - p.x) <= eps &&
        std::abs(out.back().y - p.y) <= eps) {
      continue;
    }
    out.push_back(p);
  }
  while (out.size() > 1 && std::abs(out.front().x - out.back().x) <= eps &&
         std::abs(out.front().y - out.back().y) <= eps) {
    out.pop_back();
  }
  bool changed = true;
  while (changed && out.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < out.size() && out.size() > 3; ++i) {
      const Point2& prev = out[(i + out.size() - 1) % out.size()];
      const Point2& next = out[(i + 1) % out.size()];
      const Point2& cur = out[i];
      const double len = std::hypot(next.x - prev.x, next.y - prev.y);
      const double c = cross(prev, cur, next);
      // Collinear and lying between its neighbours.
      const double dot =
          (cur.x - prev.x) * (next.x - cur.x) + (cur.y - prev.y) * (next.y - cur.y);
      if (std::abs(c) <= eps * std::max(1.0, len) && dot >= 0.0) {
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        --i;
      }
    }
  }
  return out;
}

void for_each_pixel_inside(
    std::span<const Point2> poly, std::uint32_t width, std::uint32_t height,
    const std::function<void(std::uint32_t, std::uint32_t)>& fn) {
  if (poly.size() < 3) return;
  double ymin = poly[0].y, ymax = poly[0].y;
  for (const auto& p : poly) {
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const long y_lo = std::max(0L, static_cast<long>(std::floor(ymin - 0.5)));
  const long y_hi = std::min(static_cast<long>(height) - 1,
                             static_cast<long>(std::ceil(ymax - 0.5)));
  std::vector<double> xs;
  const std::size_t n = poly.size();
  for (long y = y_lo; y <= y_hi; ++y) {
    const double cy = y + 0.5;
    xs.clear();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Point2& a = poly[i];
      const Point2& b = poly[j];
      if ((a.y > cy) != (b.y > cy)) {
        xs.push_back(a.x + (cy - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // Pixel centers strictly left of the crossing are outside; matches
      // contains() which toggles when p.x < crossing.
      const long x_first = std::max(0L, static_cast<long>(std::ceil(xs[k] - 0.5)));
      const long x_last = std::min(static_cast<long>(width) - 1,
                                   static_cast<long>(std::ceil(xs[k + 1] - 0.5)) - 1);
      for (long x = x_first; x <= x_last; ++x) {
        fn(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y));
      }
    }
  }
}

}  // namespace rtw::poly
