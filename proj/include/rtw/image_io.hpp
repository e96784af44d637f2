#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "rtw/raster.hpp"

namespace rtw {

// 8-bit PNG in, 3-channel float raster out (v/255). Gray is replicated and
// alpha is dropped.
Raster read_png_rgb(const std::filesystem::path& path);

// Quantizes with round(v*255) after clamping to [0,1]. Output is byte-stable
// for identical input (fixed zlib settings, no time chunk).
void write_png_rgb(const Raster& image, const std::filesystem::path& path);

// 16-bit single-channel label image.
struct LabelImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint16_t> labels;

  std::uint16_t at(std::uint32_t x, std::uint32_t y) const {
    return labels[std::size_t{y} * width + x];
  }
  friend bool operator==(const LabelImage&, const LabelImage&) = default;
};

void write_png_gray16(const LabelImage& image,
                      const std::filesystem::path& path);
LabelImage read_png_gray16(const std::filesystem::path& path);

}  // namespace rtw
