#pragma once

#include <optional>

#include "rtw/raster.hpp"

namespace rtw::prefilter {

struct PrefilterPolicy {
  // Union area of existing-text boxes / image area above which the image is
  // dropped.
  double discard_coverage_threshold = 0.25;
  // Fixed sigma in pixels; when unset each box uses max(3, 0.04 * diagonal).
  std::optional<double> blur_sigma;
  bool face_blur = true;
  double feather_px = 2.0;

  void validate() const;
};

enum class Decision { Keep, Discard, BlurThenKeep };

const char* to_string(Decision d);

// Rasterized (pixel-center) union area of the existing-text boxes.
double text_union_area(const BoxList& boxes);

Decision decide_image(const BoxList& boxes, const PrefilterPolicy& policy,
                      double image_area);

double sigma_for(const Box& box, const PrefilterPolicy& policy);

// Separable Gaussian truncated at 3 sigma with weights renormalized over the
// taps that fall inside the image.
Raster gaussian_blur(const Raster& img, double sigma);

// Per-pixel blend weight of one box: 1 inside the quad, falling linearly to 0
// over `feather_px` outside it.
double box_weight(const Box& box, double feather_px, double px, double py);

// Blurs inside each existing-text box (and each face box when face_blur is
// set). Pixels with zero weight for every box are copied bit-exactly.
Raster blur_regions(const Raster& img, const BoxList& boxes,
                    const PrefilterPolicy& policy);

// Pixels touched by blur_regions for this box list.
std::vector<bool> blur_footprint(std::uint32_t width, std::uint32_t height,
                                 const BoxList& boxes,
                                 const PrefilterPolicy& policy);

}  // namespace rtw::prefilter
