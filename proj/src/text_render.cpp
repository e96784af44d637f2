#include "rtw/text_render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rtw/error.hpp"
#include "rtw/polygon.hpp"
#include "rtw/unicode.hpp"

namespace rtw::render {

const std::u32string& required_coverage() {
  static const std::u32string cps = [] {
    std::u32string s;
    for (char32_t c = 0x0410; c <= 0x044F; ++c) s.push_back(c);
    s.push_back(0x0401);
    s.push_back(0x0451);
    for (char32_t c = 'A'; c <= 'Z'; ++c) s.push_back(c);
    for (char32_t c = 'a'; c <= 'z'; ++c) s.push_back(c);
    for (char32_t c = '0'; c <= '9'; ++c) s.push_back(c);
    for (char c : std::string_view(".,?!:;-+()")) s.push_back(c);
    return s;
  }();
  return cps;
}

FontSet load_fonts(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(Errc::NoUsableFonts, dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".ttf" || ext == ".otf") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  FontSet set;
  for (const auto& path : files) {
    const auto name = path.filename().string();
    try {
      auto face = std::make_shared<const font::Face>(font::Face::load(path));
      std::string missing;
      for (char32_t c : required_coverage()) {
        if (!face->has_glyph(c)) {
          if (!missing.empty()) missing += ' ';
          missing += utf8::encode(c);
          if (missing.size() > 40) {
            missing += " ...";
            break;
          }
        }
      }
      if (!missing.empty()) {
        set.warnings.push_back(name + ": missing glyphs " + missing);
        continue;
      }
      set.fonts.push_back({face->family(), name, std::move(face)});
    } catch (const Error& e) {
      set.warnings.push_back(name + ": " + e.what());
    }
  }
  if (set.fonts.empty()) {
    std::string detail = "no font in " + dir.string() + " covers the alphabet";
    for (const auto& w : set.warnings) detail += "; " + w;
    throw Error(Errc::NoUsableFonts, detail);
  }
  set.coverage_verified = true;
  return set;
}

double SineWarp::offset_at(double x) const {
  return amplitude * std::sin(2.0 * std::numbers::pi * x / period + phase);
}

std::uint32_t GlyphLayout::patch_width() const {
  return static_cast<std::uint32_t>(std::max(1.0, std::ceil(width - 1e-9)));
}

std::uint32_t GlyphLayout::patch_height() const {
  return static_cast<std::uint32_t>(std::max(1.0, std::ceil(height - 1e-9)));
}

std::string GlyphLayout::word_text(std::size_t word) const {
  std::u32string s;
  const auto& span = words.at(word);
  for (std::size_t i = span.first; i < span.first + span.count; ++i) {
    s.push_back(chars[i].cp);
  }
  return utf8::encode(s);
}

namespace {

Polygon chain_polygon(const std::vector<CharBox>& chars, std::size_t first,
                      std::size_t count) {
  Polygon poly;
  for (std::size_t i = first; i < first + count; ++i) {
    poly.push_back(chars[i].quad[0]);
    poly.push_back(chars[i].quad[1]);
  }
  for (std::size_t i = first + count; i-- > first;) {
    poly.push_back(chars[i].quad[2]);
    poly.push_back(chars[i].quad[3]);
  }
  return poly::simplify(poly);
}

}  // namespace

Polygon GlyphLayout::word_polygon(std::size_t word) const {
  const auto& span = words.at(word);
  return chain_polygon(chars, span.first, span.count);
}

Polygon GlyphLayout::line_polygon(std::size_t line) const {
  const auto& span = lines.at(line);
  if (span.count == 0) return {};
  const auto& first = words[span.first];
  const auto& last = words[span.first + span.count - 1];
  return chain_polygon(chars, first.first,
                       last.first + last.count - first.first);
}

namespace {

Polygon hull_of_chars(const std::vector<CharBox>& chars) {
  std::vector<Point2> pts;
  pts.reserve(chars.size() * 4);
  for (const auto& c : chars) pts.insert(pts.end(), c.quad.begin(), c.quad.end());
  return poly::convex_hull(pts);
}

}  // namespace

GlyphLayout layout_text(const text::TextSample& sample,
                        std::shared_ptr<const font::Face> face, double size_px,
                        const Spacing& spacing) {
  if (!(size_px >= kMinSizePx && size_px <= kMaxSizePx)) {
    throw Error(Errc::BadConfig, "font size " + std::to_string(size_px) +
                                     " outside [12,96]");
  }
  if (!(spacing.letter >= 1.0) || !(spacing.word > 0.0) || !(spacing.line >= 1.0)) {
    throw Error(Errc::BadConfig, "spacing multipliers out of range");
  }
  const double scale = size_px / face->units_per_em();
  const double ascent = face->ascender() * scale;
  const double descent = -face->descender() * scale;
  const double line_height =
      (face->ascender() - face->descender() + face->line_gap()) * scale;
  const auto space_glyph = face->glyph_index(U' ');
  const double space_advance =
      (space_glyph ? face->advance(*space_glyph) : face->units_per_em() / 3.0) *
      scale * spacing.word;

  GlyphLayout g;
  g.size_px = size_px;
  g.line_height = line_height;
  g.face = face;
  double max_right = kPatchMargin;
  for (std::size_t l = 0; l < sample.lines.size(); ++l) {
    const double baseline =
        kPatchMargin + ascent + static_cast<double>(l) * line_height * spacing.line;
    g.baselines.push_back(baseline);
    std::u32string line_text;
    for (std::size_t t = 0; t < sample.lines[l].size(); ++t) {
      if (t) line_text.push_back(U' ');
      const auto cps = utf8::decode(sample.lines[l][t].text);
      if (!cps) throw Error(Errc::MalformedUtf8, "token in line " + std::to_string(l));
      line_text += *cps;
    }
    Span line_span{g.words.size(), 0};
    double pen = kPatchMargin;
    bool in_word = false;
    for (char32_t cp : line_text) {
      if (cp == U' ') {
        if (in_word) {
          pen += space_advance;
          in_word = false;
        }
        continue;
      }
      const auto glyph = face->glyph_index(cp);
      if (!glyph) {
        throw Error(Errc::UnsupportedGlyph,
                    face->family() + " has no glyph for U+" +
                        [&] {
                          char buf[16];
                          std::snprintf(buf, sizeof buf, "%04X", static_cast<unsigned>(cp));
                          return std::string(buf);
                        }());
      }
      if (!in_word) {
        g.words.push_back({g.chars.size(), 0});
        ++line_span.count;
        in_word = true;
      }
      CharBox c;
      c.cp = cp;
      c.glyph = *glyph;
      c.pen_x = pen;
      c.baseline = baseline;
      c.advance = face->advance(*glyph) * scale;
      const double top = baseline - ascent;
      const double bottom = baseline + descent;
      c.quad = {Point2{pen, top}, Point2{pen + c.advance, top},
                Point2{pen + c.advance, bottom}, Point2{pen, bottom}};
      max_right = std::max(max_right, pen + c.advance);
      pen += c.advance * spacing.letter;
      g.chars.push_back(c);
      ++g.words.back().count;
    }
    g.lines.push_back(line_span);
  }
  const double bottom =
      g.baselines.empty() ? kPatchMargin : g.baselines.back() + descent;
  g.width = std::ceil(max_right + kPatchMargin);
  g.height = std::ceil(bottom + kPatchMargin);
  g.paragraph = hull_of_chars(g.chars);
  return g;
}

void validate_warp(const SineWarp& w, const GlyphLayout& g) {
  if (!(w.period > 0.0) || !(w.amplitude >= 0.0) || !std::isfinite(w.phase)) {
    throw Error(Errc::BadConfig, "sine warp needs period > 0 and amplitude >= 0");
  }
  if (w.amplitude > 0.5 * g.line_height + 1e-12) {
    throw Error(Errc::BadConfig, "sine amplitude exceeds half the line height");
  }
}

GlyphLayout apply_sine_warp(const GlyphLayout& g, const SineWarp& w) {
  validate_warp(w, g);
  if (w.amplitude == 0.0) return g;
  if (g.warp && g.warp->amplitude != 0.0) {
    throw Error(Errc::BadConfig, "layout is already warped");
  }
  GlyphLayout out = g;
  for (auto& c : out.chars) {
    for (auto& p : c.quad) p.y += w.offset_at(p.x);
  }
  out.paragraph = hull_of_chars(out.chars);
  out.origin.y -= w.amplitude;
  out.height += 2.0 * w.amplitude;
  out.warp = w;
  return out;
}

namespace {

// Nonzero-winding coverage of closed polygons, 4 sub-scanlines per row with
// exact horizontal span overlap. `cov` is (x1-x0) x (y1-y0), row-major.
void accumulate_coverage(const std::vector<font::Contour>& contours, int x0,
                         int y0, int x1, int y1, std::vector<float>& cov) {
  constexpr int kSub = 4;
  const int w = x1 - x0;
  struct Crossing {
    double x;
    int dir;
  };
  std::vector<Crossing> xs;
  for (int y = y0; y < y1; ++y) {
    float* row = cov.data() + static_cast<std::size_t>(y - y0) * w;
    for (int k = 0; k < kSub; ++k) {
      const double sy = y + (k + 0.5) / kSub;
      xs.clear();
      for (const auto& c : contours) {
        const std::size_t n = c.size();
        for (std::size_t i = 0; i < n; ++i) {
          const Point2& a = c[i];
          const Point2& b = c[(i + 1) % n];
          if (a.y == b.y) continue;
          const bool up = b.y > a.y;
          const double ylo = up ? a.y : b.y;
          const double yhi = up ? b.y : a.y;
          if (sy < ylo || sy >= yhi) continue;
          const double x = a.x + (sy - a.y) * (b.x - a.x) / (b.y - a.y);
          xs.push_back({x, up ? 1 : -1});
        }
      }
      if (xs.size() < 2) continue;
      std::sort(xs.begin(), xs.end(),
                [](const Crossing& p, const Crossing& q) { return p.x < q.x; });
      int winding = 0;
      for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        winding += xs[i].dir;
        if (winding == 0) continue;
        const double xa = std::clamp(xs[i].x, double(x0), double(x1));
        const double xb = std::clamp(xs[i + 1].x, double(x0), double(x1));
        if (xb <= xa) continue;
        const int ia = static_cast<int>(std::floor(xa));
        const int ib = static_cast<int>(std::floor(xb));
        constexpr float kWeight = 1.0f / kSub;
        if (ia == ib) {
          row[ia - x0] += static_cast<float>(xb - xa) * kWeight;
          continue;
        }
        row[ia - x0] += static_cast<float>(ia + 1 - xa) * kWeight;
        for (int px = ia + 1; px < ib; ++px) row[px - x0] += kWeight;
        if (ib < x1) row[ib - x0] += static_cast<float>(xb - ib) * kWeight;
      }
    }
  }
}

}  // namespace

TextPatch rasterize(const GlyphLayout& g, const std::array<float, 3>& color) {
  const std::uint32_t pw = g.patch_width();
  const std::uint32_t ph = g.patch_height();
  TextPatch patch{Raster(pw, ph, 3), Raster(pw, ph, 1), g};
  for (std::uint32_t y = 0; y < ph; ++y) {
    for (std::uint32_t x = 0; x < pw; ++x) {
      for (int c = 0; c < 3; ++c) {
        patch.color.at(x, y, c) = std::clamp(color[c], 0.0f, 1.0f);
      }
    }
  }
  if (g.chars.empty() || !g.face) return patch;

  const double scale = g.size_px / g.face->units_per_em();
  const int curve_steps = std::clamp(static_cast<int>(std::ceil(g.size_px / 8.0)), 4, 16);
  for (const auto& ch : g.chars) {
    const auto outline = g.face->outline(ch.glyph, curve_steps);
    if (outline.empty()) continue;
    // Layout-space outline, edges split at most 1 px apart so the warp bends
    // straight strokes along the curve.
    std::vector<font::Contour> contours;
    contours.reserve(outline.size());
    for (const auto& src : outline) {
      font::Contour dst;
      const std::size_t n = src.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Point2 a{ch.pen_x + src[i].x * scale, ch.baseline - src[i].y * scale};
        const Point2 b{ch.pen_x + src[(i + 1) % n].x * scale,
                       ch.baseline - src[(i + 1) % n].y * scale};
        const int pieces = g.warp ? std::max(1, static_cast<int>(std::ceil(std::abs(b.x - a.x)))) : 1;
        for (int k = 0; k < pieces; ++k) {
          const double t = static_cast<double>(k) / pieces;
          Point2 p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
          if (g.warp) p.y += g.warp->offset_at(p.x);
          dst.push_back({p.x - g.origin.x, p.y - g.origin.y});
        }
      }
      contours.push_back(std::move(dst));
    }
    // Clip window: the char quad dilated by the margin.
    Polygon quad_px;
    double qx0 = 1e300, qy0 = 1e300, qx1 = -1e300, qy1 = -1e300;
    for (const auto& p : ch.quad) {
      const Point2 q{p.x - g.origin.x, p.y - g.origin.y};
      quad_px.push_back(q);
      qx0 = std::min(qx0, q.x);
      qy0 = std::min(qy0, q.y);
      qx1 = std::max(qx1, q.x);
      qy1 = std::max(qy1, q.y);
    }
    const int x0 = std::max(0, static_cast<int>(std::floor(qx0 - kPatchMargin)));
    const int y0 = std::max(0, static_cast<int>(std::floor(qy0 - kPatchMargin)));
    const int x1 = std::min<int>(pw, static_cast<int>(std::ceil(qx1 + kPatchMargin)));
    const int y1 = std::min<int>(ph, static_cast<int>(std::ceil(qy1 + kPatchMargin)));
    if (x1 <= x0 || y1 <= y0) continue;
    std::vector<float> cov(static_cast<std::size_t>(x1 - x0) * (y1 - y0), 0.0f);
    accumulate_coverage(contours, x0, y0, x1, y1, cov);
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        const float a = std::clamp(cov[static_cast<std::size_t>(y - y0) * (x1 - x0) + (x - x0)],
                                   0.0f, 1.0f);
        if (a <= 0.0f) continue;
        if (!poly::contains_with_tolerance(quad_px, {x + 0.5, y + 0.5}, kPatchMargin)) {
          continue;
        }
        float& dst = patch.alpha.at(x, y);
        dst = std::max(dst, a);
      }
    }
  }
  return patch;
}

namespace {

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double c) {
  return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

constexpr double kXn = 0.95047, kYn = 1.0, kZn = 1.08883;

double lab_f(double t) {
  constexpr double d = 6.0 / 29.0;
  return t > d * d * d ? std::cbrt(t) : t / (3 * d * d) + 4.0 / 29.0;
}

double lab_finv(double t) {
  constexpr double d = 6.0 / 29.0;
  return t > d ? t * t * t : 3 * d * d * (t - 4.0 / 29.0);
}

}  // namespace

std::array<float, 3> contrast_color(const std::array<float, 3>& mean_rgb,
                                    Rng& rng, double hue_jitter_deg) {
  const double r = srgb_to_linear(std::clamp<double>(mean_rgb[0], 0, 1));
  const double g = srgb_to_linear(std::clamp<double>(mean_rgb[1], 0, 1));
  const double b = srgb_to_linear(std::clamp<double>(mean_rgb[2], 0, 1));
  const double X = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double Y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double Z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  const double fx = lab_f(X / kXn), fy = lab_f(Y / kYn), fz = lab_f(Z / kZn);
  const double L = 116 * fy - 16;
  double a = 500 * (fx - fy);
  double bb = 200 * (fy - fz);

  // Opposite lightness half, at least 35 L* away from the background.
  double L2 = 100.0 - L;
  if (L < 50.0) {
    L2 = std::max(L2, std::min(100.0, L + 35.0));
  } else {
    L2 = std::min(L2, std::max(0.0, L - 35.0));
  }
  const double angle = rng.uniform(-hue_jitter_deg, hue_jitter_deg) *
                       std::numbers::pi / 180.0;
  const double ca = std::cos(angle), sa = std::sin(angle);
  const double a2 = ca * a - sa * bb;
  const double b2 = sa * a + ca * bb;

  const double fy2 = (L2 + 16) / 116;
  const double X2 = kXn * lab_finv(fy2 + a2 / 500);
  const double Y2 = kYn * lab_finv(fy2);
  const double Z2 = kZn * lab_finv(fy2 - b2 / 200);
  const double r2 = 3.2404542 * X2 - 1.5371385 * Y2 - 0.4985314 * Z2;
  const double g2 = -0.9692660 * X2 + 1.8760108 * Y2 + 0.0415560 * Z2;
  const double b3 = 0.0556434 * X2 - 0.2040259 * Y2 + 1.0572252 * Z2;
  auto out = [](double v) {
    return static_cast<float>(std::clamp(linear_to_srgb(std::clamp(v, 0.0, 1.0)), 0.0, 1.0));
  };
  return {out(r2), out(g2), out(b3)};
}

}  // namespace rtw::render
