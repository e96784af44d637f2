#include "rtw/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "rtw/error.hpp"
#include "rtw/polygon.hpp"
#include "rtw/unicode.hpp"

namespace rtw::annot {

using ojson = nlohmann::ordered_json;

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

Polygon finish(const Polygon& poly, std::uint32_t w, std::uint32_t h) {
  Polygon out;
  out.reserve(poly.size());
  for (const auto& p : poly) {
    out.push_back({round2(std::clamp(p.x, 0.0, double(w))),
                   round2(std::clamp(p.y, 0.0, double(h)))});
  }
  return out;
}

}  // namespace

ParagraphAnn make_paragraph(int id, const render::GlyphLayout& layout,
                            const geom::ImageLayout& placed,
                            std::uint32_t width, std::uint32_t height) {
  ParagraphAnn para;
  para.id = id;
  std::vector<Point2> hull_pts;
  for (std::size_t l = 0; l < layout.lines.size(); ++l) {
    LineAnn line;
    line.polygon = finish(placed.lines[l], width, height);
    const auto& lspan = layout.lines[l];
    for (std::size_t w = lspan.first; w < lspan.first + lspan.count; ++w) {
      WordAnn word;
      word.polygon = finish(placed.words[w], width, height);
      hull_pts.insert(hull_pts.end(), placed.words[w].begin(), placed.words[w].end());
      const auto& wspan = layout.words[w];
      for (std::size_t c = wspan.first; c < wspan.first + wspan.count; ++c) {
        const char32_t cp = layout.chars[c].cp;
        if (!utf8::is_allowed(cp) || cp == U' ') continue;
        CharAnn ch{finish(placed.chars[c], width, height), utf8::encode(cp)};
        word.text += ch.ch;
        word.chars.push_back(std::move(ch));
      }
      if (word.chars.empty()) continue;
      if (!line.text.empty()) line.text += ' ';
      line.text += word.text;
      line.words.push_back(std::move(word));
    }
    if (line.words.empty()) continue;
    if (!para.text.empty()) para.text += '\n';
    para.text += line.text;
    para.lines.push_back(std::move(line));
  }
  const Polygon hull = poly::convex_hull(hull_pts);
  Polygon padded = poly::clip_to_rect(poly::pad_convex(hull, kParagraphPad), 0.0,
                                      0.0, width, height);
  para.polygon = poly::simplify(finish(padded, width, height));
  return para;
}

namespace {

ojson polygon_json(const Polygon& poly) {
  ojson arr = ojson::array();
  for (const auto& p : poly) arr.push_back({round2(p.x), round2(p.y)});
  return arr;
}

Polygon polygon_from(const ojson& j) {
  Polygon poly;
  for (const auto& v : j) {
    if (!v.is_array() || v.size() != 2) throw Error(Errc::BadJson, "vertex must be [x,y]");
    poly.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  return poly;
}

}  // namespace

std::string to_json(const AnnotationRecord& r) {
  ojson j;
  j["image_id"] = r.image_id;
  j["width"] = r.width;
  j["height"] = r.height;
  ojson paras = ojson::array();
  for (const auto& p : r.paragraphs) {
    ojson pj;
    pj["id"] = p.id;
    pj["polygon"] = polygon_json(p.polygon);
    pj["text"] = p.text;
    ojson lines = ojson::array();
    for (const auto& l : p.lines) {
      ojson lj;
      lj["polygon"] = polygon_json(l.polygon);
      lj["text"] = l.text;
      ojson words = ojson::array();
      for (const auto& w : l.words) {
        ojson wj;
        wj["polygon"] = polygon_json(w.polygon);
        wj["text"] = w.text;
        ojson chars = ojson::array();
        for (const auto& c : w.chars) {
          ojson cj;
          cj["polygon"] = polygon_json(c.polygon);
          cj["char"] = c.ch;
          chars.push_back(std::move(cj));
        }
        wj["chars"] = std::move(chars);
        words.push_back(std::move(wj));
      }
      lj["words"] = std::move(words);
      lines.push_back(std::move(lj));
    }
    pj["lines"] = std::move(lines);
    paras.push_back(std::move(pj));
  }
  j["paragraphs"] = std::move(paras);
  return j.dump(1) + "\n";
}

AnnotationRecord record_from_json(const std::string& text) {
  try {
    const auto j = ojson::parse(text);
    AnnotationRecord r;
    r.image_id = j.at("image_id").get<std::string>();
    r.width = j.at("width").get<std::uint32_t>();
    r.height = j.at("height").get<std::uint32_t>();
    for (const auto& pj : j.at("paragraphs")) {
      ParagraphAnn p;
      p.id = pj.at("id").get<int>();
      p.polygon = polygon_from(pj.at("polygon"));
      p.text = pj.at("text").get<std::string>();
      for (const auto& lj : pj.at("lines")) {
        LineAnn l;
        l.polygon = polygon_from(lj.at("polygon"));
        l.text = lj.at("text").get<std::string>();
        for (const auto& wj : lj.at("words")) {
          WordAnn w;
          w.polygon = polygon_from(wj.at("polygon"));
          w.text = wj.at("text").get<std::string>();
          for (const auto& cj : wj.at("chars")) {
            w.chars.push_back({polygon_from(cj.at("polygon")),
                               cj.at("char").get<std::string>()});
          }
          l.words.push_back(std::move(w));
        }
        p.lines.push_back(std::move(l));
      }
      r.paragraphs.push_back(std::move(p));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadJson, e.what());
  }
}

void save_record(const AnnotationRecord& r, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  out << to_json(r);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
}

AnnotationRecord load_record(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::MissingFile, path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return record_from_json(ss.str());
}

const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::DisallowedCharacter: return "DisallowedCharacter";
    case ViolationKind::OutOfBounds: return "OutOfBounds";
    case ViolationKind::IdGap: return "IdGap";
    case ViolationKind::TextMismatch: return "TextMismatch";
    case ViolationKind::DegeneratePolygon: return "DegeneratePolygon";
  }
  return "?";
}

std::vector<Violation> validate_record(const AnnotationRecord& r) {
  std::vector<Violation> out;
  auto check_polygon = [&](const Polygon& poly, int id, std::size_t min_vertices,
                           const std::string& what) {
    bool finite = true;
    for (const auto& p : poly) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        finite = false;
        continue;
      }
      if (p.x < 0.0 || p.y < 0.0 || p.x > r.width || p.y > r.height) {
        out.push_back({ViolationKind::OutOfBounds, id,
                       what + " vertex (" + std::to_string(p.x) + "," +
                           std::to_string(p.y) + ")"});
        break;
      }
    }
    if (!finite || poly.size() < min_vertices || !(poly::area(poly) > 0.0)) {
      out.push_back({ViolationKind::DegeneratePolygon, id, what});
    }
  };
  auto check_text = [&](const std::string& text, int id, bool newline_ok) {
    const auto cps = utf8::decode(text);
    if (!cps) {
      out.push_back({ViolationKind::DisallowedCharacter, id, "malformed UTF-8"});
      return;
    }
    for (char32_t c : *cps) {
      if (utf8::is_allowed(c) || (newline_ok && c == U'\n')) continue;
      out.push_back({ViolationKind::DisallowedCharacter, id, utf8::encode(c)});
    }
  };

  for (std::size_t i = 0; i < r.paragraphs.size(); ++i) {
    const auto& p = r.paragraphs[i];
    if (p.id != static_cast<int>(i) + 1) {
      out.push_back({ViolationKind::IdGap, p.id,
                     "expected id " + std::to_string(i + 1)});
    }
    check_polygon(p.polygon, p.id, 4, "paragraph");
    check_text(p.text, p.id, true);
    std::string joined_lines;
    for (std::size_t l = 0; l < p.lines.size(); ++l) {
      const auto& line = p.lines[l];
      check_polygon(line.polygon, p.id, 3, "line " + std::to_string(l));
      std::string joined_words;
      for (std::size_t w = 0; w < line.words.size(); ++w) {
        const auto& word = line.words[w];
        check_polygon(word.polygon, p.id, 3, "word '" + word.text + "'");
        std::string joined_chars;
        for (const auto& c : word.chars) {
          check_polygon(c.polygon, p.id, 3, "char '" + c.ch + "'");
          const auto cp = utf8::decode(c.ch);
          if (!cp || cp->size() != 1) {
            out.push_back({ViolationKind::TextMismatch, p.id,
                           "char entry '" + c.ch + "' is not one character"});
          }
          joined_chars += c.ch;
        }
        if (joined_chars != word.text) {
          out.push_back({ViolationKind::TextMismatch, p.id,
                         "word '" + word.text + "' vs chars '" + joined_chars + "'"});
        }
        if (w) joined_words += ' ';
        joined_words += word.text;
      }
      if (joined_words != line.text) {
        out.push_back({ViolationKind::TextMismatch, p.id,
                       "line '" + line.text + "' vs words '" + joined_words + "'"});
      }
      if (l) joined_lines += '\n';
      joined_lines += line.text;
    }
    if (joined_lines != p.text) {
      out.push_back({ViolationKind::TextMismatch, p.id,
                     "paragraph text differs from its lines"});
    }
  }
  return out;
}

BoxFlags classify_box(const std::string& text) {
  BoxFlags f;
  const auto cps = utf8::decode(text).value_or(std::u32string{});
  for (char32_t c : cps) {
    f.russian |= utf8::is_cyrillic(c);
    f.english |= utf8::is_latin(c);
    f.digits |= utf8::is_digit(c);
    f.punctuation |= utf8::is_punctuation(c);
  }
  return f;
}

const char* to_string(Subset s) { return s == Subset::Training ? "training" : "test"; }

namespace {

std::vector<std::string> whitespace_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

struct Accumulator {
  StatsRow row;
  std::set<std::string> words;
  std::set<std::string> words_no_numbers;

  void add(const AnnotationRecord& r) {
    ++row.images;
    for (const auto& p : r.paragraphs) {
      ++row.boxes;
      const auto f = classify_box(p.text);
      row.boxes_russian += f.russian;
      row.boxes_english += f.english;
      row.boxes_digits += f.digits;
      row.boxes_punctuation += f.punctuation;
      row.lines += p.lines.size();
      for (auto& tok : whitespace_tokens(p.text)) {
        ++row.words;
        if (std::none_of(tok.begin(), tok.end(),
                         [](char c) { return c >= '0' && c <= '9'; })) {
          words_no_numbers.insert(tok);
        }
        words.insert(std::move(tok));
      }
    }
  }

  StatsRow finish() const {
    StatsRow out = row;
    out.unique_words_cs = words.size();
    out.unique_words_no_numbers = words_no_numbers.size();
    return out;
  }
};

const std::array<const char*, 10> kFields = {
    "images",        "boxes", "boxes_russian", "boxes_english",
    "boxes_digits",  "boxes_punctuation", "lines", "words",
    "unique_words_cs", "unique_words_no_numbers"};

std::array<std::uint64_t*, 10> fields(StatsRow& r) {
  return {&r.images,        &r.boxes, &r.boxes_russian, &r.boxes_english,
          &r.boxes_digits,  &r.boxes_punctuation, &r.lines, &r.words,
          &r.unique_words_cs, &r.unique_words_no_numbers};
}

}  // namespace

StatsTable compute_stats(const std::vector<AnnotationRecord>& records,
                         const std::vector<Subset>& split) {
  if (split.size() != records.size()) {
    throw Error(Errc::BadConfig, "split labels do not match the records");
  }
  Accumulator train, test, joint;
  for (std::size_t i = 0; i < records.size(); ++i) {
    (split[i] == Subset::Training ? train : test).add(records[i]);
    joint.add(records[i]);
  }
  return {train.finish(), test.finish(), joint.finish()};
}

std::string stats_to_json(const StatsTable& t) {
  ojson j;
  StatsTable copy = t;
  for (auto [name, row] : {std::pair{"training", &copy.training},
                           std::pair{"test", &copy.test},
                           std::pair{"joint", &copy.joint}}) {
    ojson rj;
    const auto f = fields(*row);
    for (std::size_t i = 0; i < kFields.size(); ++i) rj[kFields[i]] = *f[i];
    j[name] = std::move(rj);
  }
  return j.dump(2) + "\n";
}

StatsTable stats_from_json(const std::string& text) {
  try {
    const auto j = ojson::parse(text);
    if (!j.is_object() || j.size() != 3) {
      throw Error(Errc::BadJson, "stats must hold training, test and joint");
    }
    StatsTable t;
    for (auto [name, row] : {std::pair{"training", &t.training},
                             std::pair{"test", &t.test},
                             std::pair{"joint", &t.joint}}) {
      const auto& rj = j.at(name);
      if (!rj.is_object() || rj.size() != kFields.size()) {
        throw Error(Errc::BadJson, std::string(name) + " must have ten fields");
      }
      const auto f = fields(*row);
      for (std::size_t i = 0; i < kFields.size(); ++i) {
        *f[i] = rj.at(kFields[i]).get<std::uint64_t>();
      }
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadJson, e.what());
  }
}

LabelImage emit_mask(const std::vector<std::pair<int, const Raster*>>& alphas,
                     std::uint32_t width, std::uint32_t height) {
  LabelImage mask{width, height, std::vector<std::uint16_t>(std::size_t{width} * height, 0)};
  for (const auto& [id, alpha] : alphas) {
    if (id < 1 || id > 65535) throw Error(Errc::BadConfig, "mask id out of range");
    if (alpha->width() != width || alpha->height() != height) {
      throw Error(Errc::BadConfig, "alpha size differs from the mask");
    }
    for (std::uint32_t y = 0; y < height; ++y) {
      for (std::uint32_t x = 0; x < width; ++x) {
        if (alpha->at(x, y) > 0.5f) {
          mask.labels[std::size_t{y} * width + x] = static_cast<std::uint16_t>(id);
        }
      }
    }
  }
  return mask;
}

}  // namespace rtw::annot
