#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rtw/raster.hpp"

namespace rtw::font {

// Flattened outline contour in font units, y pointing up.
using Contour = std::vector<Point2>;

// Minimal TrueType (glyf outline) reader: cmap formats 4 and 12, horizontal
// metrics, simple and composite glyphs. Immutable after construction.
class Face {
 public:
  static Face from_bytes(std::vector<std::uint8_t> bytes, std::string source);
  static Face load(const std::filesystem::path& path);

  const std::string& family() const noexcept { return family_; }
  const std::string& source() const noexcept { return source_; }
  int units_per_em() const noexcept { return units_per_em_; }
  int ascender() const noexcept { return ascender_; }
  int descender() const noexcept { return descender_; }  // negative
  int line_gap() const noexcept { return line_gap_; }
  std::size_t glyph_count() const noexcept { return glyph_count_; }

  std::optional<std::uint16_t> glyph_index(char32_t cp) const;
  bool has_glyph(char32_t cp) const { return glyph_index(cp).has_value(); }
  int advance(std::uint16_t glyph) const;

  // Quadratic segments are split into `curve_steps` line segments.
  std::vector<Contour> outline(std::uint16_t glyph, int curve_steps = 8) const;

 private:
  Face() = default;

  struct Table {
    std::uint32_t offset = 0;
    std::uint32_t length = 0;
  };

  std::optional<Table> find_table(const char tag[4]) const;
  std::uint8_t u8(std::size_t off) const;
  std::uint16_t u16(std::size_t off) const;
  std::int16_t i16(std::size_t off) const;
  std::uint32_t u32(std::size_t off) const;
  std::pair<std::uint32_t, std::uint32_t> glyph_range(std::uint16_t glyph) const;
  void append_outline(std::uint16_t glyph, const double xform[6], int steps,
                      int depth, std::vector<Contour>& out) const;

  std::shared_ptr<const std::vector<std::uint8_t>> bytes_;
  std::string source_;
  std::string family_;
  int units_per_em_ = 0;
  int ascender_ = 0;
  int descender_ = 0;
  int line_gap_ = 0;
  std::size_t glyph_count_ = 0;
  std::uint16_t metric_count_ = 0;
  bool long_loca_ = false;
  Table cmap_sub_{};
  int cmap_format_ = 0;
  Table hmtx_{};
  Table loca_{};
  Table glyf_{};
};

}  // namespace rtw::font
