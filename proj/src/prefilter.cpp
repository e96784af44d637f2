#include "rtw/prefilter.hpp"

#include <algorithm>
#include <cmath>

#include "rtw/error.hpp"
#include "rtw/polygon.hpp"

namespace rtw::prefilter {

void PrefilterPolicy::validate() const {
  if (!(discard_coverage_threshold > 0.0 && discard_coverage_threshold <= 1.0)) {
    throw Error(Errc::BadConfig,
                "prefilter.discard_coverage_threshold must be in (0,1]");
  }
  if (blur_sigma && !(*blur_sigma > 0.0)) {
    throw Error(Errc::BadConfig, "prefilter.blur_sigma must be > 0");
  }
  if (!(feather_px >= 0.0)) {
    throw Error(Errc::BadConfig, "prefilter.feather_px must be >= 0");
  }
}

const char* to_string(Decision d) {
  switch (d) {
    case Decision::Keep: return "Keep";
    case Decision::Discard: return "Discard";
    case Decision::BlurThenKeep: return "BlurThenKeep";
  }
  return "?";
}

double text_union_area(const BoxList& boxes) {
  double xmax = 0.0, ymax = 0.0;
  for (const auto& b : boxes) {
    if (b.kind != BoxKind::ExistingText) continue;
    for (const auto& p : b.quad) {
      xmax = std::max(xmax, p.x);
      ymax = std::max(ymax, p.y);
    }
  }
  const auto w = static_cast<std::uint32_t>(std::ceil(xmax));
  const auto h = static_cast<std::uint32_t>(std::ceil(ymax));
  if (w == 0 || h == 0) return 0.0;
  std::vector<std::uint8_t> covered(std::size_t{w} * h, 0);
  std::size_t count = 0;
  for (const auto& b : boxes) {
    if (b.kind != BoxKind::ExistingText) continue;
    poly::for_each_pixel_inside(b.quad, w, h, [&](std::uint32_t x, std::uint32_t y) {
      auto& c = covered[std::size_t{y} * w + x];
      if (!c) {
        c = 1;
        ++count;
      }
    });
  }
  return static_cast<double>(count);
}

Decision decide_image(const BoxList& boxes, const PrefilterPolicy& policy,
                      double image_area) {
  if (boxes.empty()) return Decision::Keep;
  const double coverage = text_union_area(boxes) / image_area;
  if (coverage > policy.discard_coverage_threshold) return Decision::Discard;
  const bool any_text = std::any_of(boxes.begin(), boxes.end(), [](const Box& b) {
    return b.kind == BoxKind::ExistingText;
  });
  if (!any_text && !policy.face_blur) return Decision::Keep;
  return Decision::BlurThenKeep;
}

double sigma_for(const Box& box, const PrefilterPolicy& policy) {
  if (policy.blur_sigma) return *policy.blur_sigma;
  double xmin = box.quad[0].x, xmax = xmin, ymin = box.quad[0].y, ymax = ymin;
  for (const auto& p : box.quad) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  return std::max(3.0, 0.04 * std::hypot(xmax - xmin, ymax - ymin));
}

namespace {

std::vector<double> gaussian_taps(double sigma, int& radius) {
  radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
  }
  return taps;
}

}  // namespace

Raster gaussian_blur(const Raster& img, double sigma) {
  int radius = 0;
  const auto taps = gaussian_taps(sigma, radius);
  const int w = static_cast<int>(img.width());
  const int h = static_cast<int>(img.height());
  const int ch = static_cast<int>(img.channels());
  std::vector<double> tmp(img.data().size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0, norm = 0.0;
        for (int k = std::max(-radius, -x); k <= std::min(radius, w - 1 - x); ++k) {
          const double t = taps[k + radius];
          acc += t * img.at(x + k, y, c);
          norm += t;
        }
        tmp[(std::size_t(y) * w + x) * ch + c] = acc / norm;
      }
    }
  }
  Raster out(img.width(), img.height(), img.channels());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0, norm = 0.0;
        for (int k = std::max(-radius, -y); k <= std::min(radius, h - 1 - y); ++k) {
          const double t = taps[k + radius];
          acc += t * tmp[(std::size_t(y + k) * w + x) * ch + c];
          norm += t;
        }
        out.at(x, y, c) = static_cast<float>(acc / norm);
      }
    }
  }
  return out;
}

double box_weight(const Box& box, double feather_px, double px, double py) {
  const Point2 p{px, py};
  if (poly::contains(box.quad, p)) return 1.0;
  if (feather_px <= 0.0) return 0.0;
  const double d = poly::distance_to_boundary(box.quad, p);
  return d >= feather_px ? 0.0 : 1.0 - d / feather_px;
}

namespace {

bool box_applies(const Box& b, const PrefilterPolicy& policy) {
  return b.kind == BoxKind::ExistingText || policy.face_blur;
}

struct PixelRect {
  std::uint32_t x0, y0, x1, y1;  // half-open
};

PixelRect footprint_rect(const Box& b, double feather, std::uint32_t w,
                         std::uint32_t h) {
  double xmin = b.quad[0].x, xmax = xmin, ymin = b.quad[0].y, ymax = ymin;
  for (const auto& p : b.quad) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  auto lo = [](double v, std::uint32_t limit) {
    return static_cast<std::uint32_t>(std::clamp(std::floor(v), 0.0, double(limit)));
  };
  auto hi = [](double v, std::uint32_t limit) {
    return static_cast<std::uint32_t>(std::clamp(std::ceil(v), 0.0, double(limit)));
  };
  return {lo(xmin - feather - 1, w), lo(ymin - feather - 1, h),
          hi(xmax + feather + 1, w), hi(ymax + feather + 1, h)};
}

}  // namespace

Raster blur_regions(const Raster& img, const BoxList& boxes,
                    const PrefilterPolicy& policy) {
  Raster out = img;
  for (const auto& box : boxes) {
    if (!box_applies(box, policy)) continue;
    const double sigma = sigma_for(box, policy);
    const auto r = footprint_rect(box, policy.feather_px, img.width(), img.height());
    if (r.x1 <= r.x0 || r.y1 <= r.y0) continue;
    // Blurring a crop that extends 3 sigma past the footprint gives the same
    // footprint values as blurring the whole image.
    const auto radius = static_cast<std::uint32_t>(std::ceil(3.0 * sigma));
    const std::uint32_t cx0 = r.x0 > radius ? r.x0 - radius : 0;
    const std::uint32_t cy0 = r.y0 > radius ? r.y0 - radius : 0;
    const std::uint32_t cx1 = std::min(img.width(), r.x1 + radius);
    const std::uint32_t cy1 = std::min(img.height(), r.y1 + radius);
    Raster crop(cx1 - cx0, cy1 - cy0, img.channels());
    for (std::uint32_t y = cy0; y < cy1; ++y) {
      for (std::uint32_t x = cx0; x < cx1; ++x) {
        for (std::uint32_t c = 0; c < img.channels(); ++c) {
          crop.at(x - cx0, y - cy0, c) = out.at(x, y, c);
        }
      }
    }
    const Raster blurred = gaussian_blur(crop, sigma);
    for (std::uint32_t y = r.y0; y < r.y1; ++y) {
      for (std::uint32_t x = r.x0; x < r.x1; ++x) {
        const double wgt = box_weight(box, policy.feather_px, x + 0.5, y + 0.5);
        if (wgt <= 0.0) continue;
        for (std::uint32_t c = 0; c < img.channels(); ++c) {
          const double v = wgt * blurred.at(x - cx0, y - cy0, c) +
                           (1.0 - wgt) * out.at(x, y, c);
          out.at(x, y, c) = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
      }
    }
  }
  return out;
}

std::vector<bool> blur_footprint(std::uint32_t width, std::uint32_t height,
                                 const BoxList& boxes,
                                 const PrefilterPolicy& policy) {
  std::vector<bool> mask(std::size_t{width} * height, false);
  for (const auto& box : boxes) {
    if (!box_applies(box, policy)) continue;
    const auto r = footprint_rect(box, policy.feather_px, width, height);
    for (std::uint32_t y = r.y0; y < r.y1; ++y) {
      for (std::uint32_t x = r.x0; x < r.x1; ++x) {
        if (box_weight(box, policy.feather_px, x + 0.5, y + 0.5) > 0.0) {
          mask[std::size_t{y} * width + x] = true;
        }
      }
    }
  }
  return mask;
}

}  // namespace rtw::prefilter
