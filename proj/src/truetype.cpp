#include "rtw/truetype.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "rtw/error.hpp"
#include "rtw/unicode.hpp"

namespace rtw::font {

namespace {

constexpr int kMaxCompositeDepth = 8;

[[noreturn]] void bad(const std::string& source, const std::string& what) {
  throw Error(Errc::BadFont, source + ": " + what);
}

}  // namespace

std::uint8_t Face::u8(std::size_t off) const {
  if (off >= bytes_->size()) bad(source_, "read past end of file");
  return (*bytes_)[off];
}

std::uint16_t Face::u16(std::size_t off) const {
  return static_cast<std::uint16_t>((u8(off) << 8) | u8(off + 1));
}

std::int16_t Face::i16(std::size_t off) const {
  return static_cast<std::int16_t>(u16(off));
}

std::uint32_t Face::u32(std::size_t off) const {
  return (std::uint32_t{u16(off)} << 16) | u16(off + 2);
}

std::optional<Face::Table> Face::find_table(const char tag[4]) const {
  const std::uint16_t count = u16(4);
  for (std::uint16_t i = 0; i < count; ++i) {
    const std::size_t rec = 12 + 16 * std::size_t{i};
    if (std::memcmp(bytes_->data() + rec, tag, 4) == 0) {
      Table t{u32(rec + 8), u32(rec + 12)};
      if (std::size_t{t.offset} + t.length > bytes_->size()) {
        bad(source_, std::string("table ") + std::string(tag, 4) + " out of range");
      }
      return t;
    }
  }
  return std::nullopt;
}

Face Face::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::IoFailure, "cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return from_bytes(std::move(bytes), path.filename().string());
}

Face Face::from_bytes(std::vector<std::uint8_t> bytes, std::string source) {
  Face f;
  f.source_ = std::move(source);
  f.bytes_ = std::make_shared<const std::vector<std::uint8_t>>(std::move(bytes));
  if (f.bytes_->size() < 12) bad(f.source_, "file too small");
  const std::uint32_t version = f.u32(0);
  if (version == 0x4F54544F) {  // 'OTTO'
    bad(f.source_, "CFF outlines are not supported");
  }
  if (version != 0x00010000 && version != 0x74727565) {  // 1.0 or 'true'
    bad(f.source_, "not a TrueType font");
  }
  if (12 + 16 * std::size_t{f.u16(4)} > f.bytes_->size()) {
    bad(f.source_, "table directory truncated");
  }

  const auto head = f.find_table("head");
  const auto hhea = f.find_table("hhea");
  const auto maxp = f.find_table("maxp");
  const auto hmtx = f.find_table("hmtx");
  const auto cmap = f.find_table("cmap");
  const auto loca = f.find_table("loca");
  const auto glyf = f.find_table("glyf");
  if (!head || !hhea || !maxp || !hmtx || !cmap) {
    bad(f.source_, "missing a required table");
  }
  if (!loca || !glyf) bad(f.source_, "no glyf outlines");

  f.units_per_em_ = f.u16(head->offset + 18);
  if (f.units_per_em_ <= 0) bad(f.source_, "unitsPerEm is zero");
  f.long_loca_ = f.i16(head->offset + 50) != 0;
  f.ascender_ = f.i16(hhea->offset + 4);
  f.descender_ = f.i16(hhea->offset + 6);
  f.line_gap_ = f.i16(hhea->offset + 8);
  f.metric_count_ = f.u16(hhea->offset + 34);
  f.glyph_count_ = f.u16(maxp->offset + 4);
  if (f.metric_count_ == 0) bad(f.source_, "no horizontal metrics");
  f.hmtx_ = *hmtx;
  f.loca_ = *loca;
  f.glyf_ = *glyf;

  // cmap: prefer a full-repertoire format 12, else a BMP format 4.
  const std::uint16_t n_sub = f.u16(cmap->offset + 2);
  int best_rank = 0;
  for (std::uint16_t i = 0; i < n_sub; ++i) {
    const std::size_t rec = cmap->offset + 4 + 8 * std::size_t{i};
    const std::uint16_t platform = f.u16(rec);
    const std::uint16_t encoding = f.u16(rec + 2);
    const std::uint32_t off = cmap->offset + f.u32(rec + 4);
    const std::uint16_t format = f.u16(off);
    const bool unicode =
        platform == 0 || (platform == 3 && (encoding == 1 || encoding == 10));
    if (!unicode) continue;
    int rank = 0;
    if (format == 12) rank = 2;
    if (format == 4) rank = 1;
    if (rank > best_rank) {
      best_rank = rank;
      f.cmap_format_ = format;
      f.cmap_sub_ = {off, 0};
    }
  }
  if (best_rank == 0) bad(f.source_, "no Unicode cmap (format 4 or 12)");

  if (const auto name = f.find_table("name")) {
    const std::uint16_t count = f.u16(name->offset + 2);
    const std::size_t strings = name->offset + f.u16(name->offset + 4);
    std::string mac_name;
    for (std::uint16_t i = 0; i < count; ++i) {
      const std::size_t rec = name->offset + 6 + 12 * std::size_t{i};
      const std::uint16_t platform = f.u16(rec);
      const std::uint16_t name_id = f.u16(rec + 6);
      const std::uint16_t length = f.u16(rec + 8);
      const std::size_t start = strings + f.u16(rec + 10);
      if (name_id != 1) continue;
      if (platform == 3 || platform == 0) {
        std::u32string text;
        for (std::size_t k = 0; k + 1 < length; k += 2) {
          text.push_back(f.u16(start + k));
        }
        f.family_ = utf8::encode(text);
        break;
      }
      if (platform == 1 && mac_name.empty()) {
        for (std::size_t k = 0; k < length; ++k) {
          mac_name.push_back(static_cast<char>(f.u8(start + k) & 0x7F));
        }
      }
    }
    if (f.family_.empty()) f.family_ = mac_name;
  }
  if (f.family_.empty()) f.family_ = f.source_;
  return f;
}

std::optional<std::uint16_t> Face::glyph_index(char32_t cp) const {
  const std::size_t base = cmap_sub_.offset;
  std::uint32_t glyph = 0;
  if (cmap_format_ == 4) {
    if (cp > 0xFFFF) return std::nullopt;
    const std::uint16_t seg_count = u16(base + 6) / 2;
    const std::size_t ends = base + 14;
    const std::size_t starts = ends + 2 * std::size_t{seg_count} + 2;
    const std::size_t deltas = starts + 2 * std::size_t{seg_count};
    const std::size_t ranges = deltas + 2 * std::size_t{seg_count};
    for (std::uint16_t s = 0; s < seg_count; ++s) {
      const std::uint16_t end = u16(ends + 2 * s);
      if (end < cp) continue;
      const std::uint16_t start = u16(starts + 2 * s);
      if (start > cp) break;
      const std::uint16_t delta = u16(deltas + 2 * s);
      const std::uint16_t range = u16(ranges + 2 * s);
      if (range == 0) {
        glyph = (cp + delta) & 0xFFFF;
      } else {
        const std::size_t addr = ranges + 2 * s + range + 2 * (cp - start);
        glyph = u16(addr);
        if (glyph != 0) glyph = (glyph + delta) & 0xFFFF;
      }
      break;
    }
  } else {
    const std::uint32_t groups = u32(base + 12);
    for (std::uint32_t g = 0; g < groups; ++g) {
      const std::size_t rec = base + 16 + 12 * std::size_t{g};
      const std::uint32_t start = u32(rec);
      const std::uint32_t end = u32(rec + 4);
      if (cp >= start && cp <= end) {
        glyph = u32(rec + 8) + (cp - start);
        break;
      }
    }
  }
  if (glyph == 0 || glyph >= glyph_count_) return std::nullopt;
  return static_cast<std::uint16_t>(glyph);
}

int Face::advance(std::uint16_t glyph) const {
  const std::uint16_t idx = glyph < metric_count_ ? glyph : metric_count_ - 1;
  return u16(hmtx_.offset + 4 * std::size_t{idx});
}

std::pair<std::uint32_t, std::uint32_t> Face::glyph_range(
    std::uint16_t glyph) const {
  if (glyph >= glyph_count_) bad(source_, "glyph index out of range");
  std::uint32_t a, b;
  if (long_loca_) {
    a = u32(loca_.offset + 4 * std::size_t{glyph});
    b = u32(loca_.offset + 4 * std::size_t{glyph} + 4);
  } else {
    a = 2u * u16(loca_.offset + 2 * std::size_t{glyph});
    b = 2u * u16(loca_.offset + 2 * std::size_t{glyph} + 2);
  }
  if (b < a || b > glyf_.length) bad(source_, "bad loca entry");
  return {glyf_.offset + a, glyf_.offset + b};
}

namespace {

struct RawPoint {
  double x, y;
  bool on;
};

Point2 apply(const double m[6], double x, double y) {
  return {m[0] * x + m[2] * y + m[4], m[1] * x + m[3] * y + m[5]};
}

void flatten_contour(const std::vector<RawPoint>& pts, int steps, Contour& out) {
  const std::size_t n = pts.size();
  if (n < 2) return;
  // Start from an on-curve point; synthesize one if the contour has none.
  std::size_t first = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (pts[i].on) {
      first = i;
      break;
    }
  }
  RawPoint start;
  std::size_t begin;
  if (first == n) {
    start = {(pts[0].x + pts[1].x) / 2, (pts[0].y + pts[1].y) / 2, true};
    begin = 1;
  } else {
    start = pts[first];
    begin = first + 1;
  }
  out.push_back({start.x, start.y});
  RawPoint cur = start;
  RawPoint ctrl{};
  bool has_ctrl = false;
  auto emit_quad = [&](const RawPoint& c, const RawPoint& end) {
    for (int s = 1; s <= steps; ++s) {
      const double t = static_cast<double>(s) / steps;
      const double u = 1.0 - t;
      out.push_back({u * u * cur.x + 2 * u * t * c.x + t * t * end.x,
                     u * u * cur.y + 2 * u * t * c.y + t * t * end.y});
    }
  };
  for (std::size_t k = 0; k < n; ++k) {
    const RawPoint& p = pts[(begin + k) % n];
    if (p.on) {
      if (has_ctrl) {
        emit_quad(ctrl, p);
        has_ctrl = false;
      } else {
        out.push_back({p.x, p.y});
      }
      cur = p;
    } else {
      if (has_ctrl) {
        const RawPoint mid{(ctrl.x + p.x) / 2, (ctrl.y + p.y) / 2, true};
        emit_quad(ctrl, mid);
        cur = mid;
      }
      ctrl = p;
      has_ctrl = true;
    }
  }
  if (has_ctrl) emit_quad(ctrl, start);
  if (out.size() > 1 && out.back() == out.front()) out.pop_back();
}

}  // namespace

void Face::append_outline(std::uint16_t glyph, const double xform[6],
                          int steps, int depth,
                          std::vector<Contour>& out) const {
  if (depth > kMaxCompositeDepth) bad(source_, "composite glyph nesting too deep");
  const auto [begin, end] = glyph_range(glyph);
  if (begin == end) return;  // empty glyph (e.g. space)
  const std::int16_t n_contours = i16(begin);
  std::size_t p = begin + 10;
  if (n_contours >= 0) {
    std::vector<std::uint16_t> ends(n_contours);
    for (auto& e : ends) {
      e = u16(p);
      p += 2;
    }
    const std::size_t n_points = n_contours ? std::size_t{ends.back()} + 1 : 0;
    p += 2 + u16(p);  // instructions
    std::vector<std::uint8_t> flags;
    flags.reserve(n_points);
    while (flags.size() < n_points) {
      const std::uint8_t f = u8(p++);
      flags.push_back(f);
      if (f & 0x08) {
        const std::uint8_t repeat = u8(p++);
        for (std::uint8_t r = 0; r < repeat && flags.size() < n_points; ++r) {
          flags.push_back(f);
        }
      }
    }
    std::vector<RawPoint> pts(n_points);
    int v = 0;
    for (std::size_t i = 0; i < n_points; ++i) {
      const std::uint8_t f = flags[i];
      if (f & 0x02) {
        const int d = u8(p++);
        v += (f & 0x10) ? d : -d;
      } else if (!(f & 0x10)) {
        v += i16(p);
        p += 2;
      }
      pts[i].x = v;
      pts[i].on = f & 0x01;
    }
    v = 0;
    for (std::size_t i = 0; i < n_points; ++i) {
      const std::uint8_t f = flags[i];
      if (f & 0x04) {
        const int d = u8(p++);
        v += (f & 0x20) ? d : -d;
      } else if (!(f & 0x20)) {
        v += i16(p);
        p += 2;
      }
      pts[i].y = v;
    }
    if (p > end) bad(source_, "glyph data overruns its loca range");
    std::size_t first = 0;
    for (std::int16_t c = 0; c < n_contours; ++c) {
      const std::size_t last = ends[c];
      if (last < first || last >= n_points) bad(source_, "bad contour end");
      std::vector<RawPoint> contour;
      for (std::size_t i = first; i <= last; ++i) {
        const Point2 q = apply(xform, pts[i].x, pts[i].y);
        contour.push_back({q.x, q.y, pts[i].on});
      }
      Contour flat;
      flatten_contour(contour, steps, flat);
      if (flat.size() >= 3) out.push_back(std::move(flat));
      first = last + 1;
    }
    return;
  }
  // Composite glyph.
  bool more = true;
  while (more) {
    const std::uint16_t flags = u16(p);
    const std::uint16_t component = u16(p + 2);
    p += 4;
    double dx = 0, dy = 0;
    if (flags & 0x0001) {
      dx = (flags & 0x0002) ? i16(p) : u16(p);
      dy = (flags & 0x0002) ? i16(p + 2) : u16(p + 2);
      p += 4;
    } else {
      dx = (flags & 0x0002) ? static_cast<std::int8_t>(u8(p)) : u8(p);
      dy = (flags & 0x0002) ? static_cast<std::int8_t>(u8(p + 1)) : u8(p + 1);
      p += 2;
    }
    if (!(flags & 0x0002)) dx = dy = 0;  // point matching is not supported
    auto f2dot14 = [this](std::size_t off) { return i16(off) / 16384.0; };
    double a = 1, b = 0, c = 0, d = 1;
    if (flags & 0x0008) {
      a = d = f2dot14(p);
      p += 2;
    } else if (flags & 0x0040) {
      a = f2dot14(p);
      d = f2dot14(p + 2);
      p += 4;
    } else if (flags & 0x0080) {
      a = f2dot14(p);
      b = f2dot14(p + 2);
      c = f2dot14(p + 4);
      d = f2dot14(p + 6);
      p += 8;
    }
    // combined = parent * component
    const double m[6] = {
        xform[0] * a + xform[2] * b,  xform[1] * a + xform[3] * b,
        xform[0] * c + xform[2] * d,  xform[1] * c + xform[3] * d,
        xform[0] * dx + xform[2] * dy + xform[4],
        xform[1] * dx + xform[3] * dy + xform[5]};
    append_outline(component, m, steps, depth + 1, out);
    more = flags & 0x0020;
  }
}

std::vector<Contour> Face::outline(std::uint16_t glyph, int curve_steps) const {
  std::vector<Contour> out;
  const double identity[6] = {1, 0, 0, 1, 0, 0};
  append_outline(glyph, identity, std::max(1, curve_steps), 0, out);
  return out;
}

}  // namespace rtw::font
