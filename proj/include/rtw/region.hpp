#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rtw/raster.hpp"
#include "rtw/rng.hpp"

namespace rtw::region {

struct PixelBox {
  std::uint32_t x0 = 0, y0 = 0;  // inclusive
  std::uint32_t x1 = 0, y1 = 0;  // exclusive

  std::uint32_t width() const noexcept { return x1 - x0; }
  std::uint32_t height() const noexcept { return y1 - y0; }
  friend bool operator==(const PixelBox&, const PixelBox&) = default;
};

// A 4-connected placement candidate. `pixels` holds sorted linear indices
// (y * image_width + x) into the source map.
struct Region {
  std::uint32_t image_width = 0;
  std::uint32_t image_height = 0;
  std::vector<std::uint32_t> pixels;
  PixelBox bbox;
  Point2 centroid;  // mean of pixel centers

  std::size_t area() const noexcept { return pixels.size(); }
  bool contains(std::uint32_t x, std::uint32_t y) const;
};

struct RegionParams {
  double boundary_threshold = 0.35;
  // Absolute minimum area in pixels; when unset, 0.5% of the image.
  std::optional<double> min_area;
  double min_area_fraction = 0.005;
  double max_aspect = 12.0;
  double max_text_occupancy = 0.05;

  void validate() const;
  double min_area_for(std::uint32_t width, std::uint32_t height) const;
};

// 4-connected components of {b < threshold}, ordered by area descending,
// then centroid y, then centroid x.
std::vector<Region> regions_from_boundaries(const Raster& boundary,
                                            const RegionParams& params);

// Keeps regions passing the area, aspect and occupancy tests; preserves
// order. `occupancy` is a 1-channel mask where > 0.5 marks taken pixels.
std::vector<Region> filter_regions(const std::vector<Region>& regions,
                                   const RegionParams& params,
                                   const Raster* occupancy);

// Area-proportional pick; nullopt for an empty list.
std::optional<std::size_t> pick_region(const std::vector<Region>& regions,
                                       Rng& rng);

}  // namespace rtw::region
