#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rtw {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

using Polygon = std::vector<Point2>;
using Quad = std::array<Point2, 4>;

// Row-major, channel-interleaved float image. Used for photos (3 channels,
// [0,1]), alpha and boundary maps (1 channel, [0,1]) and depth (1 channel,
// unbounded).
class Raster {
 public:
  Raster() = default;
  Raster(std::uint32_t width, std::uint32_t height, std::uint32_t channels,
         float fill = 0.0f);
  Raster(std::uint32_t width, std::uint32_t height, std::uint32_t channels,
         std::vector<float> data);

  std::uint32_t width() const noexcept { return width_; }
  std::uint32_t height() const noexcept { return height_; }
  std::uint32_t channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept {
    return std::size_t{width_} * height_;
  }
  bool empty() const noexcept { return data_.empty(); }

  float& at(std::uint32_t x, std::uint32_t y, std::uint32_t c = 0) {
    return data_[(std::size_t{y} * width_ + x) * channels_ + c];
  }
  float at(std::uint32_t x, std::uint32_t y, std::uint32_t c = 0) const {
    return data_[(std::size_t{y} * width_ + x) * channels_ + c];
  }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  bool same_shape(const Raster& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::uint32_t width_ = 0;
  std::uint32_t height_ = 0;
  std::uint32_t channels_ = 0;
  std::vector<float> data_;
};

// RTWMAP1 exchange format: 8-byte magic "RTWMAP1\0", then width, height and
// channels as u32 little endian, then float32 LE samples.
inline constexpr std::size_t kMapHeaderBytes = 20;
inline constexpr std::uint32_t kMaxMapSide = 65535;

Raster load_map(const std::filesystem::path& path);
Raster decode_map(std::span<const std::uint8_t> bytes);
void save_map(const Raster& r, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_map(const Raster& r);

// Affine rescale of a 1-channel map to [0,1]; constant input maps to 0.5.
Raster normalize_depth(const Raster& depth);

// Detector output: existing text or faces as quadrilaterals.
enum class BoxKind { ExistingText, Face };

struct Box {
  BoxKind kind = BoxKind::ExistingText;
  Quad quad{};
};

using BoxList = std::vector<Box>;

// Parses `[{"kind":"existing-text","quad":[[x,y],...]}]`; an axis-aligned
// `"box":[x0,y0,x1,y1]` is accepted in place of "quad". Vertices are clamped
// to [0,width]x[0,height] and reordered to positive signed area.
BoxList parse_boxes(const std::string& json_text, std::uint32_t width,
                    std::uint32_t height);
BoxList load_boxes(const std::filesystem::path& path, std::uint32_t width,
                   std::uint32_t height);
std::string boxes_to_json(const BoxList& boxes);

}  // namespace rtw
