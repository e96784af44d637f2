#include "rtw/raster.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <json.hpp>

#include "rtw/error.hpp"

namespace rtw {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::BadMagic: return "BadMagic";
    case Errc::DimensionOverflow: return "DimensionOverflow";
    case Errc::NonFiniteSample: return "NonFiniteSample";
    case Errc::Truncated: return "Truncated";
    case Errc::UnsupportedChannels: return "UnsupportedChannels";
    case Errc::IoFailure: return "IoFailure";
    case Errc::WrongChannelCount: return "WrongChannelCount";
    case Errc::ThresholdOutOfRange: return "ThresholdOutOfRange";
    case Errc::BadJson: return "BadJson";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::MalformedUtf8: return "MalformedUtf8";
    case Errc::NoUsableFonts: return "NoUsableFonts";
    case Errc::UnsupportedGlyph: return "UnsupportedGlyph";
    case Errc::BadFont: return "BadFont";
    case Errc::DegenerateRegion: return "DegenerateRegion";
    case Errc::NumericallySingular: return "NumericallySingular";
    case Errc::EmptyDomain: return "EmptyDomain";
    case Errc::MissingMap: return "MissingMap";
    case Errc::CorruptInput: return "CorruptInput";
    case Errc::BadConfig: return "BadConfig";
    case Errc::MissingFile: return "MissingFile";
  }
  return "Unknown";
}

Raster::Raster(std::uint32_t width, std::uint32_t height,
               std::uint32_t channels, float fill)
    : width_(width), height_(height), channels_(channels) {
  if (width == 0 || height == 0) {
    throw Error(Errc::DimensionOverflow, "raster dimensions must be >= 1");
  }
  if (channels == 0 || channels > 4) {
    throw Error(Errc::UnsupportedChannels,
                "channel count " + std::to_string(channels));
  }
  data_.assign(std::size_t{width} * height * channels, fill);
}

Raster::Raster(std::uint32_t width, std::uint32_t height,
               std::uint32_t channels, std::vector<float> data)
    : Raster(width, height, channels) {
  if (data.size() != data_.size()) {
    throw Error(Errc::Truncated, "sample count " + std::to_string(data.size()) +
                                     " != " + std::to_string(data_.size()));
  }
  data_ = std::move(data);
}

namespace {

constexpr std::array<std::uint8_t, 8> kMagic = {'R', 'T', 'W', 'M',
                                                'A', 'P', '1', '\0'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= std::uint32_t{b[off + i]} << (8 * i);
  }
  return v;
}

bool supported_channels(std::uint32_t c) { return c == 1 || c == 3 || c == 4; }

}  // namespace

std::vector<std::uint8_t> encode_map(const Raster& r) {
  if (!supported_channels(r.channels())) {
    throw Error(Errc::UnsupportedChannels,
                "RTWMAP1 stores 1, 3 or 4 channels, got " +
                    std::to_string(r.channels()));
  }
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  out.reserve(kMapHeaderBytes + r.data().size() * 4);
  put_u32(out, r.width());
  put_u32(out, r.height());
  put_u32(out, r.channels());
  for (float s : r.data()) {
    put_u32(out, std::bit_cast<std::uint32_t>(s));
  }
  return out;
}

Raster decode_map(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() ||
      !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    std::size_t off = 0;
    while (off < kMagic.size() && off < bytes.size() &&
           bytes[off] == kMagic[off]) {
      ++off;
    }
    throw Error(Errc::BadMagic, "expected RTWMAP1 magic", off);
  }
  if (bytes.size() < kMapHeaderBytes) {
    throw Error(Errc::Truncated, "header shorter than 20 bytes", bytes.size());
  }
  const std::uint32_t w = get_u32(bytes, 8);
  const std::uint32_t h = get_u32(bytes, 12);
  const std::uint32_t c = get_u32(bytes, 16);
  if (w == 0 || w > kMaxMapSide) {
    throw Error(Errc::DimensionOverflow, "width " + std::to_string(w), 8);
  }
  if (h == 0 || h > kMaxMapSide) {
    throw Error(Errc::DimensionOverflow, "height " + std::to_string(h), 12);
  }
  if (!supported_channels(c)) {
    throw Error(Errc::UnsupportedChannels, "channels " + std::to_string(c), 16);
  }
  const std::size_t count = std::size_t{w} * h * c;
  const std::size_t expected = kMapHeaderBytes + count * 4;
  if (bytes.size() != expected) {
    throw Error(Errc::Truncated,
                "expected " + std::to_string(expected) + " bytes, got " +
                    std::to_string(bytes.size()),
                std::min(bytes.size(), expected));
  }
  std::vector<float> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t off = kMapHeaderBytes + 4 * i;
    const float v = std::bit_cast<float>(get_u32(bytes, off));
    if (!std::isfinite(v)) {
      throw Error(Errc::NonFiniteSample, "sample " + std::to_string(i), off);
    }
    data[i] = v;
  }
  return Raster(w, h, c, std::move(data));
}

Raster load_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::IoFailure, "cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_map(bytes);
}

void save_map(const Raster& r, const std::filesystem::path& path) {
  const auto bytes = encode_map(r);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(Errc::IoFailure, "cannot open " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(Errc::IoFailure, "write failed for " + path.string());
  }
}

Raster normalize_depth(const Raster& depth) {
  if (depth.channels() != 1) {
    throw Error(Errc::WrongChannelCount,
                "depth must have 1 channel, got " +
                    std::to_string(depth.channels()));
  }
  const auto [lo_it, hi_it] =
      std::minmax_element(depth.data().begin(), depth.data().end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  Raster out(depth.width(), depth.height(), 1);
  if (!(hi > lo)) {
    std::fill(out.data().begin(), out.data().end(), 0.5f);
    return out;
  }
  const double scale = 1.0 / (hi - lo);
  auto src = depth.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = static_cast<float>(std::clamp((src[i] - lo) * scale, 0.0, 1.0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// BoxList JSON

namespace {

double signed_area(const Quad& q) {
  double a = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& p = q[i];
    const auto& n = q[(i + 1) % 4];
    a += p.x * n.y - n.x * p.y;
  }
  return 0.5 * a;
}

}  // namespace

BoxList parse_boxes(const std::string& json_text, std::uint32_t width,
                    std::uint32_t height) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(Errc::BadJson, e.what());
  }
  if (!doc.is_array()) {
    throw Error(Errc::BadJson, "box list must be a JSON array");
  }
  BoxList boxes;
  try {
    for (const auto& item : doc) {
      Box box;
      const auto kind = item.at("kind").get<std::string>();
      if (kind == "existing-text") {
        box.kind = BoxKind::ExistingText;
      } else if (kind == "face") {
        box.kind = BoxKind::Face;
      } else {
        throw Error(Errc::BadJson, "unknown box kind '" + kind + "'");
      }
      if (item.contains("quad")) {
        const auto& q = item.at("quad");
        if (!q.is_array() || q.size() != 4) {
          throw Error(Errc::BadJson, "quad must have 4 vertices");
        }
        for (std::size_t i = 0; i < 4; ++i) {
          box.quad[i] = {q[i].at(0).get<double>(), q[i].at(1).get<double>()};
        }
      } else {
        const auto& b = item.at("box");
        if (!b.is_array() || b.size() != 4) {
          throw Error(Errc::BadJson, "box must be [x0,y0,x1,y1]");
        }
        const double x0 = b[0].get<double>(), y0 = b[1].get<double>();
        const double x1 = b[2].get<double>(), y1 = b[3].get<double>();
        box.quad = {Point2{x0, y0}, Point2{x1, y0}, Point2{x1, y1},
                    Point2{x0, y1}};
      }
      for (auto& p : box.quad) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
          throw Error(Errc::BadJson, "non-finite box vertex");
        }
        p.x = std::clamp(p.x, 0.0, static_cast<double>(width));
        p.y = std::clamp(p.y, 0.0, static_cast<double>(height));
      }
      if (signed_area(box.quad) < 0.0) {
        std::reverse(box.quad.begin(), box.quad.end());
      }
      boxes.push_back(box);
    }
  } catch (const json::exception& e) {
    throw Error(Errc::BadJson, e.what());
  }
  return boxes;
}

BoxList load_boxes(const std::filesystem::path& path, std::uint32_t width,
                   std::uint32_t height) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::IoFailure, "cannot open " + path.string());
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_boxes(text, width, height);
}

std::string boxes_to_json(const BoxList& boxes) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& b : boxes) {
    nlohmann::ordered_json item;
    item["kind"] = b.kind == BoxKind::Face ? "face" : "existing-text";
    auto quad = nlohmann::ordered_json::array();
    for (const auto& p : b.quad) {
      quad.push_back({p.x, p.y});
    }
    item["quad"] = quad;
    doc.push_back(item);
  }
  return doc.dump();
}

}  // namespace rtw
