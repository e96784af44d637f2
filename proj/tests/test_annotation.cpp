#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rtw/annotation.hpp"
#include "rtw/error.hpp"
#include "rtw/polygon.hpp"
#include "support.hpp"

using namespace rtw;
using namespace rtw::annot;

namespace {

const render::FontSet& fonts() {
  static const auto set = render::load_fonts(test::fixtures() / "fonts");
  return set;
}

text::TextSample sample(std::initializer_list<std::vector<std::string>> lines) {
  text::TextSample s;
  for (const auto& l : lines) {
    std::vector<text::Token> toks;
    for (const auto& t : l) toks.push_back({t, text::TokenKind::Russian});
    s.lines.push_back(toks);
  }
  return s;
}

Polygon box(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

// One paragraph, one line per entry, words split on spaces, chars on code
// units (ASCII only).
ParagraphAnn para(int id, const std::vector<std::string>& lines) {
  ParagraphAnn p;
  p.id = id;
  p.polygon = box(0, 0, 50, 50);
  for (const auto& l : lines) {
    LineAnn line{box(1, 1, 40, 10), l, {}};
    std::size_t start = 0;
    while (start <= l.size()) {
      const auto end = std::min(l.find(' ', start), l.size());
      WordAnn w{box(1, 1, 10, 10), l.substr(start, end - start), {}};
      for (char c : w.text) w.chars.push_back({box(1, 1, 3, 10), std::string(1, c)});
      line.words.push_back(w);
      start = end + 1;
    }
    if (!p.text.empty()) p.text += '\n';
    p.text += l;
    p.lines.push_back(line);
  }
  return p;
}

AnnotationRecord record(const std::string& id, std::vector<ParagraphAnn> ps) {
  return {id, 100, 100, std::move(ps)};
}

// Record whose text goes through the real layout path (Cyrillic allowed).
AnnotationRecord laid_out(const std::string& id, const text::TextSample& s) {
  const auto g = render::layout_text(s, fonts().fonts[0].face, 20);
  const auto placed = geom::transform_layout(g, geom::Homography::translation(10, 10));
  return {id, 400, 200, {make_paragraph(1, g, placed, 400, 200)}};
}

std::vector<Violation> of_kind(const AnnotationRecord& r, ViolationKind k) {
  std::vector<Violation> out;
  for (const auto& v : validate_record(r))
    if (v.kind == k) out.push_back(v);
  return out;
}

}  // namespace

TEST_CASE("classify_box") {
  CHECK(classify_box("дом") == BoxFlags{true, false, false, false});
  CHECK(classify_box("Кафе Cafe 24/7!") == BoxFlags{true, true, true, true});
  CHECK(classify_box("12345") == BoxFlags{false, false, true, false});
  CHECK(classify_box("a-b") == BoxFlags{false, true, false, true});
  CHECK(classify_box("Ёж") == BoxFlags{true, false, false, false});

  const std::vector<std::string> parts{"дом", "Cafe", "42", "!", "", "@", "ё-", "x.y", " "};
  for (const auto& a : parts)
    for (const auto& b : parts) {
      const auto fa = classify_box(a), fb = classify_box(b), fab = classify_box(a + b);
      CHECK(fab == BoxFlags{fa.russian || fb.russian, fa.english || fb.english,
                            fa.digits || fb.digits, fa.punctuation || fb.punctuation});
    }
}

TEST_CASE("compute_stats") {
  CHECK(compute_stats({}, {}) == StatsTable{});

  const std::vector<AnnotationRecord> two{laid_out("a", sample({{"дом", "кот"}})),
                                          laid_out("b", sample({{"кот", "5"}}))};
  const auto t = compute_stats(two, {Subset::Training, Subset::Training});
  CHECK(t.training.images == 2);
  CHECK(t.training.boxes == 2);
  CHECK(t.training.lines == 2);
  CHECK(t.training.words == 4);
  CHECK(t.training.unique_words_cs == 3);
  CHECK(t.training.unique_words_no_numbers == 2);
  CHECK(t.training.boxes_russian == 2);
  CHECK(t.training.boxes_digits == 1);
  CHECK(t.test == StatsRow{});
  CHECK(t.joint == t.training);
}

TEST_CASE("stats are additive across disjoint subsets") {
  std::vector<AnnotationRecord> rs;
  std::vector<Subset> split;
  const std::vector<std::string> pool{"дом", "Дом", "кот", "Cafe", "42", "a1", "улица.", "Open!"};
  Rng rng(8);
  for (int i = 0; i < 40; ++i) {
    std::vector<ParagraphAnn> ps;
    const auto n = rng.uniform_int(0, 3);
    for (int k = 0; k < n; ++k) {
      text::TextSample s;
      for (int l = 0; l < rng.uniform_int(1, 2); ++l) {
        std::vector<text::Token> toks;
        for (int w = 0; w < rng.uniform_int(1, 3); ++w)
          toks.push_back({pool[rng.uniform_int(0, pool.size() - 1)], {}});
        s.lines.push_back(toks);
      }
      auto r = laid_out("x", s);
      r.paragraphs[0].id = k + 1;
      ps.push_back(r.paragraphs[0]);
    }
    rs.push_back({"img" + std::to_string(i), 400, 200, ps});
    split.push_back(rng.bernoulli(0.5) ? Subset::Training : Subset::Test);
  }
  const auto t = compute_stats(rs, split);
  const auto& a = t.training;
  const auto& b = t.test;
  const auto& j = t.joint;
  CHECK(j.images == a.images + b.images);
  CHECK(j.boxes == a.boxes + b.boxes);
  CHECK(j.boxes_russian == a.boxes_russian + b.boxes_russian);
  CHECK(j.boxes_english == a.boxes_english + b.boxes_english);
  CHECK(j.boxes_digits == a.boxes_digits + b.boxes_digits);
  CHECK(j.boxes_punctuation == a.boxes_punctuation + b.boxes_punctuation);
  CHECK(j.lines == a.lines + b.lines);
  CHECK(j.words == a.words + b.words);
  for (auto f : {&StatsRow::unique_words_cs, &StatsRow::unique_words_no_numbers}) {
    CHECK(std::max(a.*f, b.*f) <= j.*f);
    CHECK(j.*f <= a.*f + b.*f);
  }
  CHECK(j.unique_words_cs > j.unique_words_no_numbers);
}

TEST_CASE("stats JSON round trip with published counts") {
  StatsTable t;
  t.training = {10000, 27645, 8155, 3483, 3441, 4217, 46479, 96810, 33504, 26804};
  const auto text = stats_to_json(t);
  CHECK(stats_from_json(text) == t);
  CHECK(stats_to_json(stats_from_json(text)) == text);
  CHECK(text.find("\"unique_words_no_numbers\": 26804") != std::string::npos);
  CHECK(text.find("\"training\"") < text.find("\"test\""));
  CHECK(text.find("\"test\"") < text.find("\"joint\""));
  CHECK_THROWS_AS(stats_from_json(R"({"training":{},"test":{},"joint":{}})"), Error);
  CHECK_THROWS_AS(stats_from_json("[]"), Error);
}

TEST_CASE("emit_mask") {
  const auto empty = emit_mask({}, 6, 4);
  CHECK(std::all_of(empty.labels.begin(), empty.labels.end(), [](auto v) { return v == 0; }));

  Raster a(6, 4, 1), b(6, 4, 1);
  for (std::uint32_t x = 0; x < 4; ++x) a.at(x, 1) = 0.8f;
  a.at(5, 3) = 0.5f;  // not above threshold
  for (std::uint32_t x = 2; x < 6; ++x) b.at(x, 1) = 0.9f;
  const auto one = emit_mask({{1, &a}}, 6, 4);
  for (std::uint32_t y = 0; y < 4; ++y)
    for (std::uint32_t x = 0; x < 6; ++x) CHECK(one.labels[y * 6 + x] == (a.at(x, y) > 0.5f ? 1 : 0));
  const auto two = emit_mask({{1, &a}, {2, &b}}, 6, 4);
  CHECK(two.labels[1 * 6 + 1] == 1);
  CHECK(two.labels[1 * 6 + 2] == 2);
  CHECK(two.labels[1 * 6 + 3] == 2);
  CHECK(two.labels[1 * 6 + 5] == 2);
}

TEST_CASE("validate_record") {
  CHECK(validate_record(record("z", {})).empty());
  CHECK(validate_record(record("a", {para(1, {"abc de", "f"}), para(2, {"x"})})).empty());

  auto at = record("a", {para(1, {"e@mail"})});
  const auto bad = of_kind(at, ViolationKind::DisallowedCharacter);
  REQUIRE(!bad.empty());
  CHECK(bad[0].detail == "@");

  auto mismatch = record("a", {para(1, {"abc"}), para(2, {"de"})});
  mismatch.paragraphs[1].text = "dx";
  const auto mm = of_kind(mismatch, ViolationKind::TextMismatch);
  REQUIRE(mm.size() == 1);
  CHECK(mm[0].paragraph == 2);

  auto gap = record("a", {para(1, {"a"}), para(3, {"b"})});
  CHECK(of_kind(gap, ViolationKind::IdGap).size() == 1);

  auto oob = record("a", {para(1, {"a"})});
  oob.paragraphs[0].polygon = box(-1, 0, 20, 20);
  CHECK(of_kind(oob, ViolationKind::OutOfBounds).size() == 1);

  auto flat = record("a", {para(1, {"a"})});
  flat.paragraphs[0].lines[0].words[0].chars[0].polygon = {{1, 1}, {2, 2}, {3, 3}};
  CHECK(of_kind(flat, ViolationKind::DegeneratePolygon).size() == 1);

  auto chars = record("a", {para(1, {"ab"})});
  chars.paragraphs[0].lines[0].words[0].chars.pop_back();
  CHECK(of_kind(chars, ViolationKind::TextMismatch).size() == 1);
}

TEST_CASE("JSON layout and round trip") {
  const auto r = laid_out("img_7", sample({{"дом.", "Ёж"}, {"42"}}));
  const auto text = to_json(r);
  CHECK(text.find("\"image_id\"") < text.find("\"width\""));
  CHECK(text.find("\"width\"") < text.find("\"height\""));
  CHECK(text.find("\"height\"") < text.find("\"paragraphs\""));
  CHECK(text.find("\"id\"") < text.find("\"polygon\""));
  CHECK(text.find("\"char\": \"д\"") != std::string::npos);
  const auto back = record_from_json(text);
  CHECK(to_json(back) == text);
  CHECK(back.paragraphs[0].text == "дом. Ёж\n42");
  // Two-decimal rounding.
  for (const auto& l : back.paragraphs[0].lines)
    for (const auto& w : l.words)
      for (const auto& p : w.polygon) CHECK(std::abs(p.x * 100 - std::round(p.x * 100)) < 1e-9);

  test::TempDir dir("ann");
  save_record(r, dir / "a.json");
  CHECK(to_json(load_record(dir / "a.json")) == text);
  CHECK_THROWS_AS(load_record(dir / "missing.json"), Error);
  CHECK_THROWS_AS(record_from_json("{\"image_id\": 3}"), Error);
}

TEST_CASE("make_paragraph") {
  SUBCASE("single unwarped word") {
    const auto g = render::layout_text(sample({{"дом"}}), fonts().fonts[0].face, 24);
    const auto placed = geom::transform_layout(g, geom::Homography::translation(50, 40));
    const auto p = make_paragraph(1, g, placed, 300, 200);
    REQUIRE(p.lines.size() == 1);
    REQUIRE(p.lines[0].words.size() == 1);
    const auto& word = p.lines[0].words[0].polygon;
    // The word polygon is the union of its advance boxes: one rectangle.
    const auto& c0 = placed.chars.front();
    const auto& c2 = placed.chars.back();
    CHECK(poly::area(word) == doctest::Approx((c2[1].x - c0[0].x) * (c0[3].y - c0[0].y)).epsilon(1e-3));
    CHECK(p.lines[0].polygon == word);
    const auto padded = poly::pad_convex(poly::convex_hull(word), 4.0);
    CHECK(poly::area(p.polygon) == doctest::Approx(poly::area(padded)).epsilon(1e-3));
    CHECK(p.polygon.size() == 4);
    CHECK(p.text == "дом");
  }
  SUBCASE("warped two-line paragraph keeps chars inside words") {
    auto g = render::layout_text(sample({{"улица", "метро"}, {"Open", "24"}}), fonts().fonts[1].face, 22);
    g = render::apply_sine_warp(g, {5, 2.0 * g.width, 0.4});
    const auto placed = geom::transform_layout(g, geom::Homography::translation(20, 30));
    const AnnotationRecord r{"w", 400, 200, {make_paragraph(1, g, placed, 400, 200)}};
    CHECK(validate_record(r).empty());
    for (const auto& l : r.paragraphs[0].lines)
      for (const auto& w : l.words)
        for (const auto& c : w.chars)
          for (const auto& v : c.polygon) CHECK(poly::contains_with_tolerance(w.polygon, v, 0.5));
  }
  SUBCASE("disallowed characters are dropped and polygons clipped") {
    text::TextSample s;
    s.lines = {{{"+7", text::TokenKind::Phone}, {"(495)", text::TokenKind::Phone}, {"()", {}}}};
    const auto g = render::layout_text(s, fonts().fonts[0].face, 20);
    const auto placed = geom::transform_layout(g, geom::Homography::translation(-5, 2));
    const auto p = make_paragraph(1, g, placed, 200, 40);
    CHECK(p.text == "7 495");
    REQUIRE(p.lines.size() == 1);
    CHECK(p.lines[0].words.size() == 2);
    const AnnotationRecord r{"p", 200, 40, {p}};
    for (const auto& v : p.polygon) CHECK(v.x >= 0.0);
    CHECK(validate_record(r).empty());
  }
}
