#include "rtw/region.hpp"

#include <algorithm>
#include <cmath>

#include "rtw/error.hpp"

namespace rtw::region {

bool Region::contains(std::uint32_t x, std::uint32_t y) const {
  if (x < bbox.x0 || x >= bbox.x1 || y < bbox.y0 || y >= bbox.y1) return false;
  const std::uint32_t idx = y * image_width + x;
  return std::binary_search(pixels.begin(), pixels.end(), idx);
}

void RegionParams::validate() const {
  if (!(boundary_threshold >= 0.0 && boundary_threshold <= 1.0)) {
    throw Error(Errc::ThresholdOutOfRange,
                "boundary_threshold must be in [0,1], got " +
                    std::to_string(boundary_threshold));
  }
  if (min_area && !(*min_area > 0.0)) {
    throw Error(Errc::BadConfig, "region.min_area must be > 0");
  }
  if (!(min_area_fraction > 0.0) || !(max_aspect > 0.0) ||
      !(max_text_occupancy > 0.0)) {
    throw Error(Errc::BadConfig, "region parameters must be positive");
  }
}

double RegionParams::min_area_for(std::uint32_t width,
                                  std::uint32_t height) const {
  if (min_area) return *min_area;
  return min_area_fraction * static_cast<double>(width) * height;
}

std::vector<Region> regions_from_boundaries(const Raster& boundary,
                                            const RegionParams& params) {
  if (boundary.channels() != 1) {
    throw Error(Errc::WrongChannelCount,
                "boundary map must have 1 channel, got " +
                    std::to_string(boundary.channels()));
  }
  if (!(params.boundary_threshold >= 0.0 && params.boundary_threshold <= 1.0)) {
    throw Error(Errc::ThresholdOutOfRange,
                "boundary_threshold " + std::to_string(params.boundary_threshold));
  }
  const std::uint32_t w = boundary.width();
  const std::uint32_t h = boundary.height();
  const auto samples = boundary.data();
  const float threshold = static_cast<float>(params.boundary_threshold);

  std::vector<std::int32_t> label(samples.size(), -1);
  std::vector<Region> regions;
  std::vector<std::uint32_t> stack;
  for (std::uint32_t seed = 0; seed < samples.size(); ++seed) {
    if (label[seed] >= 0 || !(samples[seed] < threshold)) continue;
    const auto id = static_cast<std::int32_t>(regions.size());
    Region r;
    r.image_width = w;
    r.image_height = h;
    label[seed] = id;
    stack.assign(1, seed);
    while (!stack.empty()) {
      const std::uint32_t idx = stack.back();
      stack.pop_back();
      r.pixels.push_back(idx);
      const std::uint32_t x = idx % w;
      const std::uint32_t y = idx / w;
      auto visit = [&](std::uint32_t n) {
        if (label[n] < 0 && samples[n] < threshold) {
          label[n] = id;
          stack.push_back(n);
        }
      };
      if (x > 0) visit(idx - 1);
      if (x + 1 < w) visit(idx + 1);
      if (y > 0) visit(idx - w);
      if (y + 1 < h) visit(idx + w);
    }
    std::sort(r.pixels.begin(), r.pixels.end());
    std::uint32_t x0 = w, y0 = h, x1 = 0, y1 = 0;
    double sx = 0.0, sy = 0.0;
    for (std::uint32_t idx : r.pixels) {
      const std::uint32_t x = idx % w;
      const std::uint32_t y = idx / w;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x + 1);
      y1 = std::max(y1, y + 1);
      sx += x + 0.5;
      sy += y + 0.5;
    }
    r.bbox = {x0, y0, x1, y1};
    const double n = static_cast<double>(r.pixels.size());
    r.centroid = {sx / n, sy / n};
    regions.push_back(std::move(r));
  }
  std::stable_sort(regions.begin(), regions.end(),
                   [](const Region& a, const Region& b) {
                     if (a.area() != b.area()) return a.area() > b.area();
                     if (a.centroid.y != b.centroid.y) {
                       return a.centroid.y < b.centroid.y;
                     }
                     return a.centroid.x < b.centroid.x;
                   });
  return regions;
}

std::vector<Region> filter_regions(const std::vector<Region>& regions,
                                   const RegionParams& params,
                                   const Raster* occupancy) {
  std::vector<Region> kept;
  for (const auto& r : regions) {
    const double area = static_cast<double>(r.area());
    if (area < params.min_area_for(r.image_width, r.image_height)) continue;
    const double bw = r.bbox.width();
    const double bh = r.bbox.height();
    if (std::max(bw, bh) / std::min(bw, bh) > params.max_aspect) continue;
    if (occupancy) {
      std::size_t taken = 0;
      for (std::uint32_t idx : r.pixels) {
        if (occupancy->data()[idx] > 0.5f) ++taken;
      }
      if (static_cast<double>(taken) / area > params.max_text_occupancy) continue;
    }
    kept.push_back(r);
  }
  return kept;
}

std::optional<std::size_t> pick_region(const std::vector<Region>& regions,
                                       Rng& rng) {
  if (regions.empty()) return std::nullopt;
  if (regions.size() == 1) return 0;
  std::vector<double> cumulative;
  cumulative.reserve(regions.size());
  double total = 0.0;
  for (const auto& r : regions) {
    total += static_cast<double>(r.area());
    cumulative.push_back(total);
  }
  return rng.weighted_index(cumulative);
}

}  // namespace rtw::region
