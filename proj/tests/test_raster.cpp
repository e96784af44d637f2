#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <set>

#include "rtw/error.hpp"
#include "rtw/image_io.hpp"
#include "rtw/polygon.hpp"
#include "rtw/raster.hpp"
#include "rtw/rng.hpp"
#include "rtw/unicode.hpp"
#include "support.hpp"

using namespace rtw;

namespace {

// Hand-packed RTWMAP1 bytes, independent of encode_map.
std::vector<std::uint8_t> pack(std::uint32_t w, std::uint32_t h, std::uint32_t c,
                               const std::vector<float>& samples) {
  std::vector<std::uint8_t> out = {'R', 'T', 'W', 'M', 'A', 'P', '1', 0};
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  u32(w);
  u32(h);
  u32(c);
  for (float f : samples) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    u32(bits);
  }
  return out;
}

Errc code_of(const std::function<void()>& fn, std::optional<std::uint64_t>* offset = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (offset) *offset = e.offset();
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::IoFailure;
}

}  // namespace

TEST_CASE("RTWMAP1 1x1 map holds header plus one little-endian float") {
  const Raster r(1, 1, 1, 0.25f);
  const auto bytes = encode_map(r);
  CHECK(bytes.size() == kMapHeaderBytes + 4);
  const std::vector<std::uint8_t> tail(bytes.end() - 4, bytes.end());
  CHECK(tail == std::vector<std::uint8_t>{0x00, 0x00, 0x80, 0x3E});
  CHECK(bytes == pack(1, 1, 1, {0.25f}));
  CHECK(decode_map(bytes) == r);
}

TEST_CASE("RTWMAP1 round trip for 1, 3 and 4 channels") {
  Rng rng(7);
  for (std::uint32_t c : {1u, 3u, 4u}) {
    std::vector<float> data(5 * 3 * c);
    for (auto& v : data) v = static_cast<float>(rng.uniform(-10, 10));
    const Raster r(5, 3, c, data);
    CHECK(decode_map(encode_map(r)) == r);
    CHECK(decode_map(pack(5, 3, c, data)) == r);
  }
  test::TempDir dir("map");
  const Raster r(4, 2, 1, 0.75f);
  save_map(r, dir / "a.rtwmap");
  CHECK(load_map(dir / "a.rtwmap") == r);
}

TEST_CASE("RTWMAP1 rejects malformed input") {
  auto good = pack(2, 2, 1, {0, 1, 2, 3});
  SUBCASE("bad magic") {
    auto b = good;
    b[3] = 'X';
    std::optional<std::uint64_t> off;
    CHECK(code_of([&] { decode_map(b); }, &off) == Errc::BadMagic);
    CHECK(off == 3u);
  }
  SUBCASE("dimension overflow") {
    auto b = pack(70000, 1, 1, {});
    CHECK(code_of([&] { decode_map(b); }) == Errc::DimensionOverflow);
  }
  SUBCASE("non-finite sample reports its byte offset") {
    auto b = pack(3, 2, 1, {0, 1, 2, 3, std::numeric_limits<float>::quiet_NaN(), 5});
    std::optional<std::uint64_t> off;
    CHECK(code_of([&] { decode_map(b); }, &off) == Errc::NonFiniteSample);
    CHECK(off == 20u + 4u * 4u);
  }
  SUBCASE("two channels") {
    auto b = pack(1, 1, 2, {0, 0});
    CHECK(code_of([&] { decode_map(b); }) == Errc::UnsupportedChannels);
  }
  SUBCASE("truncated") {
    good.pop_back();
    CHECK(code_of([&] { decode_map(good); }) == Errc::Truncated);
  }
}

TEST_CASE("normalize_depth") {
  const Raster d(3, 1, 1, std::vector<float>{2.0f, 4.0f, 6.0f});
  const auto n = normalize_depth(d);
  CHECK(n.at(0, 0) == 0.0f);
  CHECK(n.at(1, 0) == doctest::Approx(0.5));
  CHECK(n.at(2, 0) == 1.0f);
  const auto flat = normalize_depth(Raster(4, 4, 1, 3.0f));
  for (float v : flat.data()) CHECK(v == 0.5f);
  CHECK(code_of([] { normalize_depth(Raster(2, 2, 3)); }) == Errc::WrongChannelCount);
}

TEST_CASE("box lists: axis boxes, quads, clamping and orientation") {
  const auto boxes = parse_boxes(
      R"([{"kind":"existing-text","box":[-5,2,10,8]},
          {"kind":"face","quad":[[0,0],[0,4],[4,4],[4,0]]}])",
      8, 6);
  REQUIRE(boxes.size() == 2);
  CHECK(boxes[0].kind == BoxKind::ExistingText);
  CHECK(boxes[0].quad[0] == Point2{0, 2});
  CHECK(boxes[0].quad[2] == Point2{8, 6});
  CHECK(boxes[1].kind == BoxKind::Face);
  CHECK(poly::signed_area(boxes[1].quad) > 0.0);
  CHECK(parse_boxes(boxes_to_json(boxes), 8, 6).size() == 2);
  CHECK(code_of([] { parse_boxes(R"([{"kind":"logo","box":[0,0,1,1]}])", 4, 4); }) ==
        Errc::BadJson);
  CHECK(code_of([] { parse_boxes("{", 4, 4); }) == Errc::BadJson);
}

TEST_CASE("PNG round trips are exact at 8 and 16 bits") {
  test::TempDir dir("png");
  Raster img(7, 5, 3);
  Rng rng(3);
  for (auto& v : img.data()) v = static_cast<float>(rng.uniform_int(0, 255)) / 255.0f;
  write_png_rgb(img, dir / "a.png");
  const auto back = read_png_rgb(dir / "a.png");
  REQUIRE(back.same_shape(img));
  for (std::size_t i = 0; i < img.data().size(); ++i) {
    CHECK(std::lround(back.data()[i] * 255) == std::lround(img.data()[i] * 255));
  }
  write_png_rgb(back, dir / "b.png");
  std::ifstream a(dir / "a.png", std::ios::binary), b(dir / "b.png", std::ios::binary);
  CHECK(std::string(std::istreambuf_iterator<char>(a), {}) ==
        std::string(std::istreambuf_iterator<char>(b), {}));

  LabelImage labels{3, 2, {0, 1, 65535, 2, 300, 0}};
  write_png_gray16(labels, dir / "m.png");
  CHECK(read_png_gray16(dir / "m.png") == labels);
}

TEST_CASE("FNV-1a and stream keys match the published constants") {
  CHECK(fnv1a(std::string_view("")) == 0xcbf29ce484222325ULL);
  CHECK(fnv1a(std::string_view("a")) == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a(std::string_view("foobar")) == 0x85944171f73967e8ULL);
  // Golden value frozen from an independent implementation.
  CHECK(stream_key(0, "img_000") == 0x46ebda540d8c8ebbULL);
  Rng rng = derive_rng(0, "img_000");
  CHECK(rng.next_u64() == 0xd25cf8e637d13702ULL);
  CHECK(rng.next_u64() == 0x64ff88f502e3aec1ULL);
  CHECK(rng.next_u64() == 0x81635ff6dbe2fc16ULL);
}

TEST_CASE("rng streams are reproducible and independent") {
  Rng a = derive_rng(5, "img"), b = derive_rng(5, "img");
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
  Rng x = derive_rng(5, "a"), y = derive_rng(5, "b");
  int same = 0;
  for (int i = 0; i < 100; ++i) same += x.next_u64() == y.next_u64();
  CHECK(same == 0);

  Rng r(11);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = r.uniform_int(-3, 3);
    REQUIRE(v >= -3);
    REQUIRE(v <= 3);
    seen.insert(v);
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  CHECK(seen.size() == 7);

  Rng parent(9);
  const auto before = parent.counter();
  Rng child = parent.fork("x");
  CHECK(parent.counter() == before);
  CHECK(child.key() != parent.key());
}

TEST_CASE("utf8 decode rejects malformed sequences") {
  CHECK(utf8::decode("дом") == std::u32string{0x0434, 0x043E, 0x043C});
  CHECK_FALSE(utf8::decode("\xC0\xAF"));      // overlong
  CHECK_FALSE(utf8::decode("\xED\xA0\x80"));  // surrogate
  CHECK_FALSE(utf8::decode("\xD0"));          // truncated
  CHECK(utf8::encode(U"ёЁ") == "ёЁ");
}

TEST_CASE("case folding matches a frozen lowercase table") {
  // Produced once with Python's str.lower() over U+0410..U+042F and U+0401.
  const std::u32string upper = U"АБВГДЕЖЗИЙКЛМНОПРСТУФХЦЧШЩЪЫЬЭЮЯЁ";
  const std::u32string lower = U"абвгдежзийклмнопрстуфхцчшщъыьэюяё";
  CHECK(utf8::fold(upper) == lower);
  CHECK(utf8::fold(lower) == lower);
  CHECK(utf8::fold(U"HeLLo") == U"hello");
}

TEST_CASE("polygon helpers") {
  const Polygon sq{{0, 0}, {4, 0}, {4, 4}, {0, 4}};
  CHECK(poly::signed_area(sq) == 16.0);
  CHECK(poly::contains(sq, {1, 1}));
  CHECK_FALSE(poly::contains(sq, {5, 1}));
  CHECK(poly::contains_with_tolerance(sq, {4.4, 2}, 0.5));
  CHECK(poly::is_convex(sq));
  CHECK_FALSE(poly::is_convex(Polygon{{0, 0}, {4, 0}, {1, 1}, {0, 4}}));

  const auto hull = poly::convex_hull(Polygon{{0, 0}, {2, 1}, {4, 0}, {4, 4}, {0, 4}, {2, 2}});
  CHECK(hull.size() == 4);
  CHECK(poly::area(hull) == 16.0);

  const auto padded = poly::pad_convex(sq, 1.0);
  CHECK(poly::area(padded) == doctest::Approx(36.0));

  const auto clipped = poly::clip_to_rect(padded, 0, 0, 3, 10);
  CHECK(poly::area(clipped) == doctest::Approx(3.0 * 5.0));

  CHECK(poly::simplify(Polygon{{0, 0}, {2, 0}, {4, 0}, {4, 4}, {4, 4}, {0, 4}}).size() == 4);

  // Pixel-center enumeration agrees with contains() on a skewed quad.
  const Polygon q{{1.3, 0.7}, {9.1, 2.2}, {8.4, 7.9}, {0.6, 6.1}};
  std::set<std::pair<int, int>> hits;
  poly::for_each_pixel_inside(q, 12, 10, [&](std::uint32_t x, std::uint32_t y) {
    hits.insert({int(x), int(y)});
  });
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 12; ++x) {
      CHECK(hits.count({x, y}) == (poly::contains(q, {x + 0.5, y + 0.5}) ? 1u : 0u));
    }
  }
}
