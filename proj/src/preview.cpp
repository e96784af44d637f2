#include "rtw/preview.hpp"

#include <algorithm>
#include <cmath>

#include "rtw/error.hpp"
#include "rtw/polygon.hpp"

namespace rtw::preview {

std::array<float, 3> tint_for(int id) {
  static constexpr std::array<std::array<float, 3>, 6> palette{{
      {1.0f, 0.8f, 0.0f},
      {0.0f, 0.6f, 1.0f},
      {1.0f, 0.0f, 0.8f},
      {0.0f, 1.0f, 0.6f},
      {0.6f, 0.2f, 1.0f},
      {1.0f, 0.4f, 0.0f},
  }};
  return palette[static_cast<std::size_t>(id - 1) % palette.size()];
}

std::vector<std::uint8_t> outline_mask(std::span<const Point2> poly, double width,
                                       std::uint32_t w, std::uint32_t h) {
  std::vector<std::uint8_t> mask(std::size_t{w} * h, 0);
  if (poly.size() < 2) return mask;
  const double half = width / 2.0;
  double x0 = poly[0].x, x1 = x0, y0 = poly[0].y, y1 = y0;
  for (const auto& p : poly) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  const auto lo = [](double v) { return std::max(0L, static_cast<long>(std::floor(v))); };
  const long xe = std::min<long>(w, static_cast<long>(std::ceil(x1 + half)) + 1);
  const long ye = std::min<long>(h, static_cast<long>(std::ceil(y1 + half)) + 1);
  for (long y = lo(y0 - half - 1); y < ye; ++y) {
    for (long x = lo(x0 - half - 1); x < xe; ++x) {
      if (poly::distance_to_boundary(poly, {x + 0.5, y + 0.5}) <= half) {
        mask[static_cast<std::size_t>(y) * w + x] = 1;
      }
    }
  }
  return mask;
}

Raster render_overlay(const Raster& image, const annot::AnnotationRecord& record,
                      const LabelImage* mask) {
  Raster out = image;
  const std::uint32_t w = image.width(), h = image.height();
  if (mask && mask->width == w && mask->height == h) {
    for (std::uint32_t y = 0; y < h; ++y) {
      for (std::uint32_t x = 0; x < w; ++x) {
        const int id = mask->at(x, y);
        if (!id) continue;
        const auto tint = tint_for(id);
        for (int c = 0; c < 3; ++c) {
          float& v = out.at(x, y, c);
          v = (1.0f - kMaskOpacity) * v + kMaskOpacity * tint[c];
        }
      }
    }
  }
  auto paint = [&](const std::vector<std::uint8_t>& m, const std::array<float, 3>& col) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!m[i]) continue;
      for (int c = 0; c < 3; ++c) out.data()[i * 3 + c] = col[c];
    }
  };
  for (const auto& p : record.paragraphs) {
    for (const auto& l : p.lines) {
      for (const auto& word : l.words) paint(outline_mask(word.polygon, 1.0, w, h), kWordColor);
    }
  }
  for (const auto& p : record.paragraphs) {
    paint(outline_mask(p.polygon, 2.0, w, h), kParagraphColor);
  }
  return out;
}

void preview(const std::filesystem::path& image,
             const std::filesystem::path& annotation,
             const std::optional<std::filesystem::path>& mask,
             const std::filesystem::path& out) {
  for (const auto& p : {image, annotation}) {
    if (!std::filesystem::exists(p)) throw Error(Errc::MissingFile, p.string());
  }
  if (mask && !std::filesystem::exists(*mask)) {
    throw Error(Errc::MissingFile, mask->string());
  }
  const Raster img = read_png_rgb(image);
  const auto record = annot::load_record(annotation);
  std::optional<LabelImage> labels;
  if (mask) labels = read_png_gray16(*mask);
  write_png_rgb(render_overlay(img, record, labels ? &*labels : nullptr), out);
}

}  // namespace rtw::preview
