#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rtw/raster.hpp"
#include "rtw/rng.hpp"
#include "rtw/text_source.hpp"
#include "rtw/truetype.hpp"

namespace rtw::render {

struct FontEntry {
  std::string family;
  std::string file;
  std::shared_ptr<const font::Face> face;
};

struct FontSet {
  std::vector<FontEntry> fonts;
  std::vector<std::string> warnings;  // one line per rejected file
  bool coverage_verified = false;
};

// Codepoints every usable font must map.
const std::u32string& required_coverage();

// Loads *.ttf / *.otf files in name order; files that fail to parse or lack
// coverage are listed in `warnings`. Throws NoUsableFonts when none remain.
FontSet load_fonts(const std::filesystem::path& dir);

struct Spacing {
  double letter = 1.0;  // pen advance multiplier, >= 1
  double word = 1.0;    // space width multiplier
  double line = 1.0;    // line pitch multiplier, >= 1
};

struct SineWarp {
  double amplitude = 0.0;  // pixels
  double period = 1.0;     // pixels
  double phase = 0.0;      // radians

  double offset_at(double x) const;
};

inline constexpr double kMinSizePx = 12.0;
inline constexpr double kMaxSizePx = 96.0;
inline constexpr double kPatchMargin = 2.0;

struct CharBox {
  char32_t cp = 0;
  std::uint16_t glyph = 0;
  double pen_x = 0.0;     // layout x of the glyph origin
  double baseline = 0.0;  // layout y of the unwarped baseline
  double advance = 0.0;   // pixels
  Quad quad{};            // tl, tr, br, bl in layout space
};

struct Span {
  std::size_t first = 0;
  std::size_t count = 0;
};

// Geometry of one paragraph. All coordinates are in layout space; patch
// pixel (0,0) sits at `origin`.
struct GlyphLayout {
  std::vector<CharBox> chars;  // spaces excluded
  std::vector<Span> words;     // ranges over chars
  std::vector<Span> lines;     // ranges over words
  std::vector<double> baselines;
  Polygon paragraph;           // convex hull of the word polygons
  double width = 0.0;          // patch size in pixels
  double height = 0.0;
  Point2 origin{0.0, 0.0};
  double size_px = 0.0;
  double line_height = 0.0;    // unscaled by spacing.line
  std::optional<SineWarp> warp;
  std::shared_ptr<const font::Face> face;

  std::uint32_t patch_width() const;
  std::uint32_t patch_height() const;
  std::string word_text(std::size_t word) const;
  // Upper chain through the char tops, lower chain back through the bottoms.
  Polygon word_polygon(std::size_t word) const;
  Polygon line_polygon(std::size_t line) const;
};

// Left-aligned layout; char quads are advance boxes spanning ascender to
// descender. Throws BadConfig for a size outside [12,96] and
// UnsupportedGlyph for an unmapped character.
GlyphLayout layout_text(const text::TextSample& sample,
                        std::shared_ptr<const font::Face> face, double size_px,
                        const Spacing& spacing = {});

void validate_warp(const SineWarp& w, const GlyphLayout& g);

// Moves every vertex (x,y) to (x, y + A sin(2 pi x / period + phase)) and
// grows the patch by 2A vertically. A = 0 returns the input unchanged.
GlyphLayout apply_sine_warp(const GlyphLayout& g, const SineWarp& w);

struct TextPatch {
  Raster color;  // 3 channels, constant
  Raster alpha;  // 1 channel
  GlyphLayout layout;
};

// Anti-aliased coverage of the (warped) glyph outlines. Each glyph is
// clipped to its char quad dilated by kPatchMargin pixels.
TextPatch rasterize(const GlyphLayout& g, const std::array<float, 3>& color);

// Region mean colour with CIE L* flipped to the opposite half and a small
// hue rotation.
std::array<float, 3> contrast_color(const std::array<float, 3>& mean_rgb,
                                    Rng& rng, double hue_jitter_deg = 12.0);

}  // namespace rtw::render
