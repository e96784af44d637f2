#include "rtw/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rtw/error.hpp"
#include "rtw/polygon.hpp"

namespace rtw::geom {

void PlaneFitConfig::validate() const {
  if (!(focal_assumption > 0.0) || ransac_iters < 1 || !(inlier_tol > 0.0) ||
      max_points < 3) {
    throw Error(Errc::BadConfig, "plane fit parameters out of range");
  }
}

Intrinsics Intrinsics::for_image(std::uint32_t width, std::uint32_t height,
                                 double focal_assumption) {
  return {focal_assumption * std::max(width, height), width / 2.0, height / 2.0};
}

Eigen::Vector3d Intrinsics::ray(double x, double y) const {
  return {(x - cx) / f, (y - cy) / f, 1.0};
}

Point2 Intrinsics::project(const Eigen::Vector3d& X) const {
  return {f * X.x() / X.z() + cx, f * X.y() / X.z() + cy};
}

Plane fit_plane_tls(std::span<const Eigen::Vector3d> points) {
  if (points.size() < 3) {
    throw Error(Errc::DegenerateRegion, "plane fit needs at least 3 points");
  }
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d d = p - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const auto& ev = eig.eigenvalues();  // ascending
  if (!(ev(1) > 1e-12 * std::max(ev(2), std::numeric_limits<double>::min()))) {
    throw Error(Errc::DegenerateRegion, "points are collinear");
  }
  Plane plane;
  plane.normal = eig.eigenvectors().col(0).normalized();
  if (plane.normal.z() < 0.0) plane.normal = -plane.normal;
  plane.offset = plane.normal.dot(mean);
  plane.inlier_fraction = 1.0;
  return plane;
}

Plane fit_plane(const Raster& depth, const region::Region& region,
                const PlaneFitConfig& cfg, Rng& rng) {
  cfg.validate();
  if (depth.channels() != 1) {
    throw Error(Errc::WrongChannelCount, "depth must have 1 channel");
  }
  if (depth.width() != region.image_width || depth.height() != region.image_height) {
    throw Error(Errc::DegenerateRegion, "region and depth sizes differ");
  }
  if (region.area() < 3) {
    throw Error(Errc::DegenerateRegion,
                "region has " + std::to_string(region.area()) + " pixels");
  }
  const auto K = Intrinsics::for_image(depth.width(), depth.height(),
                                       cfg.focal_assumption);
  const std::size_t n_all = region.area();
  const std::size_t stride = (n_all + cfg.max_points - 1) / cfg.max_points;
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(n_all / stride + 1);
  double zmin = std::numeric_limits<double>::infinity();
  double zmax = -zmin, zsum = 0.0;
  for (std::size_t i = 0; i < n_all; i += stride) {
    const std::uint32_t idx = region.pixels[i];
    const std::uint32_t x = idx % region.image_width;
    const std::uint32_t y = idx / region.image_width;
    const double d = depth.at(x, y);
    pts.push_back(d * K.ray(x + 0.5, y + 0.5));
    zmin = std::min(zmin, d);
    zmax = std::max(zmax, d);
    zsum += d;
  }
  const double zmean = zsum / static_cast<double>(pts.size());
  const double tol =
      cfg.inlier_tol * std::max(zmax - zmin, 0.05 * std::abs(zmean));

  auto count_inliers = [&](const Eigen::Vector3d& n, double c,
                           std::vector<std::uint8_t>* mark) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const bool in = std::abs(n.dot(pts[i]) - c) <= tol;
      if (mark) (*mark)[i] = in;
      count += in;
    }
    return count;
  };

  std::size_t best = 0;
  Eigen::Vector3d best_n(0, 0, 1);
  double best_c = zmean;
  const auto last = static_cast<std::int64_t>(pts.size() - 1);
  for (int it = 0; it < cfg.ransac_iters; ++it) {
    const auto a = rng.uniform_int(0, last);
    const auto b = rng.uniform_int(0, last);
    const auto c = rng.uniform_int(0, last);
    if (a == b || b == c || a == c) continue;
    Eigen::Vector3d n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    const double len = n.norm();
    if (!(len > 1e-15)) continue;
    n /= len;
    const double off = n.dot(pts[a]);
    const std::size_t count = count_inliers(n, off, nullptr);
    if (count > best) {
      best = count;
      best_n = n;
      best_c = off;
    }
  }

  std::vector<std::uint8_t> mark(pts.size(), 1);
  if (best >= 3) count_inliers(best_n, best_c, &mark);
  std::vector<Eigen::Vector3d> inliers;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (mark[i]) inliers.push_back(pts[i]);
  }
  if (inliers.size() < 3) inliers = pts;
  Plane plane = fit_plane_tls(inliers);
  plane.inlier_fraction = static_cast<double>(
                              count_inliers(plane.normal, plane.offset, nullptr)) /
                          static_cast<double>(pts.size());
  return plane;
}

Homography::Homography(const Eigen::Matrix3d& m) : h_(m) {
  if (!(std::abs(h_(2, 2)) > 1e-12)) {
    throw Error(Errc::NumericallySingular, "homography has h33 = 0");
  }
  h_ /= h_(2, 2);
  if (!(std::abs(h_.determinant()) > 1e-9) || !h_.allFinite()) {
    throw Error(Errc::NumericallySingular, "homography is singular");
  }
}

Point2 Homography::apply(Point2 p) const {
  const double w = h_(2, 0) * p.x + h_(2, 1) * p.y + h_(2, 2);
  return {(h_(0, 0) * p.x + h_(0, 1) * p.y + h_(0, 2)) / w,
          (h_(1, 0) * p.x + h_(1, 1) * p.y + h_(1, 2)) / w};
}

Polygon Homography::apply(std::span<const Point2> poly) const {
  Polygon out;
  out.reserve(poly.size());
  for (const auto& p : poly) out.push_back(apply(p));
  return out;
}

Homography Homography::inverse() const { return Homography(h_.inverse()); }

Homography Homography::after(const Homography& first) const {
  return Homography(h_ * first.h_);
}

Homography Homography::translation(double tx, double ty) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 2) = tx;
  m(1, 2) = ty;
  return Homography(m);
}

namespace {

// Similarity moving the centroid to the origin with mean distance sqrt(2).
Eigen::Matrix3d normalizer(const std::array<Point2, 4>& pts) {
  double mx = 0, my = 0;
  for (const auto& p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= 4;
  my /= 4;
  double dist = 0;
  for (const auto& p : pts) dist += std::hypot(p.x - mx, p.y - my);
  dist /= 4;
  if (!(dist > 0.0)) {
    throw Error(Errc::NumericallySingular, "coincident correspondences");
  }
  const double s = std::sqrt(2.0) / dist;
  Eigen::Matrix3d t;
  t << s, 0, -s * mx, 0, s, -s * my, 0, 0, 1;
  return t;
}

}  // namespace

Homography homography_from_points(const std::array<Point2, 4>& src,
                                  const std::array<Point2, 4>& dst) {
  const Eigen::Matrix3d ts = normalizer(src);
  const Eigen::Matrix3d td = normalizer(dst);
  Eigen::Matrix<double, 9, 9> a = Eigen::Matrix<double, 9, 9>::Zero();
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector3d p = ts * Eigen::Vector3d(src[i].x, src[i].y, 1.0);
    const Eigen::Vector3d q = td * Eigen::Vector3d(dst[i].x, dst[i].y, 1.0);
    const double x = p.x() / p.z(), y = p.y() / p.z();
    const double u = q.x() / q.z(), v = q.y() / q.z();
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 9, 9>> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(7) > 1e-12 * sv(0))) {
    throw Error(Errc::NumericallySingular, "correspondences are degenerate");
  }
  const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return Homography(td.inverse() * hn * ts);
}

Quad patch_quad(const Homography& h, double patch_w, double patch_h) {
  return {h.apply(Point2{0, 0}), h.apply(Point2{patch_w, 0}),
          h.apply(Point2{patch_w, patch_h}), h.apply(Point2{0, patch_h})};
}

Homography region_homography(const Plane& plane, const region::Region& region,
                             double patch_w, double patch_h,
                             double area_fraction, const PlacementConfig& cfg) {
  const Eigen::Vector3d n = plane.normal.normalized();
  if (!(std::abs(n.z()) >= cfg.min_normal_z)) {
    throw Error(Errc::NumericallySingular, "plane is nearly edge-on");
  }
  if (!(patch_w > 0.0) || !(patch_h > 0.0) || !(area_fraction > 0.0)) {
    throw Error(Errc::BadConfig, "patch size and area fraction must be > 0");
  }
  const auto K = Intrinsics::for_image(region.image_width, region.image_height,
                                       cfg.focal_assumption);
  const Eigen::Vector3d r = K.ray(region.centroid.x, region.centroid.y);
  const double denom = n.dot(r);
  if (!(std::abs(denom) > 1e-12) || !(plane.offset / denom > 0.0)) {
    throw Error(Errc::NumericallySingular, "region centroid ray misses the plane");
  }
  const Eigen::Vector3d p0 = r * (plane.offset / denom);
  Eigen::Vector3d u = Eigen::Vector3d::UnitX() - n.x() * n;
  if (!(u.norm() > 1e-9)) {
    throw Error(Errc::NumericallySingular, "image x axis is normal to the plane");
  }
  u.normalize();
  const Eigen::Vector3d v = n.cross(u);

  const std::array<Point2, 4> corners{Point2{0, 0}, Point2{patch_w, 0},
                                      Point2{patch_w, patch_h}, Point2{0, patch_h}};
  auto project = [&](double s, std::array<Point2, 4>& out) {
    for (int i = 0; i < 4; ++i) {
      const Eigen::Vector3d X = p0 + s * ((corners[i].x - patch_w / 2) * u +
                                          (corners[i].y - patch_h / 2) * v);
      if (!(X.z() > 1e-6 * p0.z())) return false;
      out[i] = K.project(X);
    }
    return true;
  };
  const double target = area_fraction * static_cast<double>(region.area());
  double s = p0.z() / K.f;
  std::array<Point2, 4> img{};
  for (int it = 0; it < 30; ++it) {
    if (!project(s, img)) {
      s *= 0.5;
      continue;
    }
    const double a = poly::area(img);
    if (!(a > 0.0)) {
      throw Error(Errc::NumericallySingular, "projected patch has no area");
    }
    const double step = std::sqrt(target / a);
    s *= step;
    if (std::abs(step - 1.0) < 1e-10) break;
  }
  if (!project(s, img)) {
    throw Error(Errc::NumericallySingular, "patch reaches behind the camera");
  }
  return homography_from_points(corners, img);
}

double region_coverage(const Quad& quad, const region::Region& region) {
  std::size_t total = 0, inside = 0;
  poly::for_each_pixel_inside(quad, region.image_width, region.image_height,
                              [&](std::uint32_t x, std::uint32_t y) {
                                ++total;
                                inside += region.contains(x, y);
                              });
  return total ? static_cast<double>(inside) / static_cast<double>(total) : 0.0;
}

bool fits(double patch_w, double patch_h, const region::Region& region,
          const Homography& h, double min_coverage) {
  const Quad q = patch_quad(h, patch_w, patch_h);
  for (const auto& p : q) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < 0.0 || p.y < 0.0 ||
        p.x > region.image_width || p.y > region.image_height) {
      return false;
    }
  }
  if (!poly::is_convex(q) || !(poly::signed_area(q) > 0.0)) return false;
  return region_coverage(q, region) >= min_coverage;
}

ImageLayout transform_layout(const render::GlyphLayout& g, const Homography& h) {
  const Homography full = h.after(Homography::translation(-g.origin.x, -g.origin.y));
  ImageLayout out;
  out.chars.reserve(g.chars.size());
  for (const auto& c : g.chars) out.chars.push_back(full.apply(c.quad));
  for (std::size_t w = 0; w < g.words.size(); ++w) {
    out.words.push_back(full.apply(g.word_polygon(w)));
  }
  for (std::size_t l = 0; l < g.lines.size(); ++l) {
    out.lines.push_back(full.apply(g.line_polygon(l)));
  }
  out.paragraph = full.apply(g.paragraph);
  return out;
}

WarpedPatch warp_patch(const render::TextPatch& patch, const Homography& h,
                       std::uint32_t width, std::uint32_t height) {
  WarpedPatch out{Raster(width, height, 3), Raster(width, height, 1), {},
                  transform_layout(patch.layout, h)};
  const double pw = patch.alpha.width();
  const double ph = patch.alpha.height();
  const Quad q = patch_quad(h, pw, ph);
  double x0 = q[0].x, x1 = q[0].x, y0 = q[0].y, y1 = q[0].y;
  for (const auto& p : q) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  auto clampi = [](double v, std::uint32_t hi) {
    return static_cast<std::uint32_t>(std::clamp(v, 0.0, static_cast<double>(hi)));
  };
  out.bbox = {clampi(std::floor(x0) - 1, width), clampi(std::floor(y0) - 1, height),
              clampi(std::ceil(x1) + 1, width), clampi(std::ceil(y1) + 1, height)};
  const Homography inv = h.inverse();
  const int iw = static_cast<int>(pw), ih = static_cast<int>(ph);
  for (std::uint32_t y = out.bbox.y0; y < out.bbox.y1; ++y) {
    for (std::uint32_t x = out.bbox.x0; x < out.bbox.x1; ++x) {
      const Point2 s = inv.apply(Point2{x + 0.5, y + 0.5});
      const double sx = s.x - 0.5, sy = s.y - 0.5;
      if (!(sx > -1.0 && sy > -1.0 && sx < pw && sy < ph)) continue;
      const int ix = static_cast<int>(std::floor(sx));
      const int iy = static_cast<int>(std::floor(sy));
      const double fx = sx - ix, fy = sy - iy;
      const double w[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
      const int tx[4] = {ix, ix + 1, ix, ix + 1};
      const int ty[4] = {iy, iy, iy + 1, iy + 1};
      double a = 0.0;
      double c[3] = {0, 0, 0};
      for (int k = 0; k < 4; ++k) {
        if (w[k] == 0.0) continue;
        const bool inside = tx[k] >= 0 && ty[k] >= 0 && tx[k] < iw && ty[k] < ih;
        const auto cx = static_cast<std::uint32_t>(std::clamp(tx[k], 0, iw - 1));
        const auto cy = static_cast<std::uint32_t>(std::clamp(ty[k], 0, ih - 1));
        if (inside) a += w[k] * patch.alpha.at(cx, cy);
        for (int ch = 0; ch < 3; ++ch) c[ch] += w[k] * patch.color.at(cx, cy, ch);
      }
      out.alpha.at(x, y) = static_cast<float>(a);
      for (int ch = 0; ch < 3; ++ch) out.color.at(x, y, ch) = static_cast<float>(c[ch]);
    }
  }
  return out;
}

}  // namespace rtw::geom
