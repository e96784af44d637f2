#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rtw/raster.hpp"
#include "rtw/region.hpp"
#include "rtw/rng.hpp"
#include "rtw/text_render.hpp"

namespace rtw::geom {

// Plane n.X = offset in camera coordinates (x right, y down, z forward).
struct Plane {
  Eigen::Vector3d normal{0.0, 0.0, 1.0};
  double offset = 0.0;
  double inlier_fraction = 0.0;
};

struct PlaneFitConfig {
  double focal_assumption = 1.2;  // focal = this * max(w, h)
  int ransac_iters = 200;
  double inlier_tol = 0.02;       // fraction of the region's depth range
  std::size_t max_points = 4096;  // larger regions are subsampled on a grid
  void validate() const;
};

struct Intrinsics {
  double f = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  static Intrinsics for_image(std::uint32_t width, std::uint32_t height,
                              double focal_assumption);
  // K^-1 (x, y, 1).
  Eigen::Vector3d ray(double x, double y) const;
  Point2 project(const Eigen::Vector3d& X) const;
};

// Back-projects region pixel centers with X = depth * K^-1 (x+0.5, y+0.5, 1),
// runs RANSAC over 3-point samples, then a total least squares refit on the
// inliers. Throws DegenerateRegion for fewer than 3 points or collinear
// points.
Plane fit_plane(const Raster& depth, const region::Region& region,
                const PlaneFitConfig& cfg, Rng& rng);

// Total least squares plane through the points; normal.z >= 0.
Plane fit_plane_tls(std::span<const Eigen::Vector3d> points);

class Homography {
 public:
  Homography() = default;
  explicit Homography(const Eigen::Matrix3d& m);  // normalizes m(2,2) to 1

  const Eigen::Matrix3d& matrix() const noexcept { return h_; }
  Point2 apply(Point2 p) const;
  Polygon apply(std::span<const Point2> poly) const;
  Homography inverse() const;
  // (*this) after `first`.
  Homography after(const Homography& first) const;

  static Homography translation(double tx, double ty);

 private:
  Eigen::Matrix3d h_ = Eigen::Matrix3d::Identity();
};

// Four-point DLT with Hartley normalization. Throws NumericallySingular when
// the correspondences do not determine an invertible map.
Homography homography_from_points(const std::array<Point2, 4>& src,
                                  const std::array<Point2, 4>& dst);

struct PlacementConfig {
  double focal_assumption = 1.2;
  double min_normal_z = 0.15;
};

// Homography from patch pixel coordinates ([0,w]x[0,h]) onto the image. The
// patch rectangle lies on the plane, centered on the region centroid's ray,
// with in-plane axes u (image x projected onto the plane) and v = n x u,
// scaled so the projected quad covers `area_fraction` of the region area.
// Throws NumericallySingular when |normal.z| < min_normal_z.
Homography region_homography(const Plane& plane, const region::Region& region,
                             double patch_w, double patch_h,
                             double area_fraction, const PlacementConfig& cfg);

Quad patch_quad(const Homography& h, double patch_w, double patch_h);

// Fraction of the quad's pixel centers that lie in the region; 0 when the
// quad covers no pixel center.
double region_coverage(const Quad& quad, const region::Region& region);

// The warped patch quad is convex, inside the image and at least
// `min_coverage` of it lies on region pixels.
bool fits(double patch_w, double patch_h, const region::Region& region,
          const Homography& h, double min_coverage = 0.98);

// Layout polygons in image coordinates.
struct ImageLayout {
  std::vector<Polygon> chars;
  std::vector<Polygon> words;
  std::vector<Polygon> lines;
  Polygon paragraph;
};

// Maps layout-space polygons through h after shifting by -origin.
ImageLayout transform_layout(const render::GlyphLayout& g, const Homography& h);

// Text patch resampled into image space. Rasters have the image size; only
// `bbox` can be non-zero in `alpha`.
struct WarpedPatch {
  Raster color;
  Raster alpha;
  region::PixelBox bbox;
  ImageLayout layout;
};

// Inverse-mapped bilinear resampling; alpha outside the patch is 0 and
// colour is edge-clamped.
WarpedPatch warp_patch(const render::TextPatch& patch, const Homography& h,
                       std::uint32_t width, std::uint32_t height);

}  // namespace rtw::geom
