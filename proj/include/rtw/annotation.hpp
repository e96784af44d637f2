#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rtw/geometry.hpp"
#include "rtw/image_io.hpp"
#include "rtw/raster.hpp"
#include "rtw/text_render.hpp"

namespace rtw::annot {

struct CharAnn {
  Polygon polygon;
  std::string ch;
};

struct WordAnn {
  Polygon polygon;
  std::string text;
  std::vector<CharAnn> chars;
};

struct LineAnn {
  Polygon polygon;
  std::string text;
  std::vector<WordAnn> words;
};

struct ParagraphAnn {
  int id = 0;
  Polygon polygon;
  std::string text;
  std::vector<LineAnn> lines;
};

struct AnnotationRecord {
  std::string image_id;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<ParagraphAnn> paragraphs;
};

inline constexpr double kParagraphPad = 4.0;

// Builds one paragraph from a placed layout. Characters outside the
// annotation alphabet are dropped from texts and char lists (their ink stays
// inside the word polygon); words and lines left empty are omitted. The
// paragraph polygon is the convex hull of the word polygons padded by 4 px.
// All polygons are clipped to the image and rounded to 2 decimals.
ParagraphAnn make_paragraph(int id, const render::GlyphLayout& layout,
                            const geom::ImageLayout& placed,
                            std::uint32_t width, std::uint32_t height);

std::string to_json(const AnnotationRecord& r);
AnnotationRecord record_from_json(const std::string& text);
void save_record(const AnnotationRecord& r, const std::filesystem::path& path);
AnnotationRecord load_record(const std::filesystem::path& path);

enum class ViolationKind {
  DisallowedCharacter,
  OutOfBounds,
  IdGap,
  TextMismatch,
  DegeneratePolygon,
};

const char* to_string(ViolationKind k);

struct Violation {
  ViolationKind kind;
  int paragraph = 0;   // id, 0 when not tied to a paragraph
  std::string detail;
};

std::vector<Violation> validate_record(const AnnotationRecord& r);

struct BoxFlags {
  bool russian = false;
  bool english = false;
  bool digits = false;
  bool punctuation = false;
  friend bool operator==(const BoxFlags&, const BoxFlags&) = default;
};

BoxFlags classify_box(const std::string& text);

struct StatsRow {
  std::uint64_t images = 0;
  std::uint64_t boxes = 0;
  std::uint64_t boxes_russian = 0;
  std::uint64_t boxes_english = 0;
  std::uint64_t boxes_digits = 0;
  std::uint64_t boxes_punctuation = 0;
  std::uint64_t lines = 0;
  std::uint64_t words = 0;
  std::uint64_t unique_words_cs = 0;
  std::uint64_t unique_words_no_numbers = 0;
  friend bool operator==(const StatsRow&, const StatsRow&) = default;
};

struct StatsTable {
  StatsRow training;
  StatsRow test;
  StatsRow joint;
  friend bool operator==(const StatsTable&, const StatsTable&) = default;
};

enum class Subset { Training, Test };

const char* to_string(Subset s);

// `split[i]` labels `records[i]`. Words are whitespace-delimited tokens of
// paragraph texts; unique counts for `joint` come from the union of sets.
StatsTable compute_stats(const std::vector<AnnotationRecord>& records,
                         const std::vector<Subset>& split);

std::string stats_to_json(const StatsTable& t);
StatsTable stats_from_json(const std::string& text);

// 16-bit label image: id where alpha > 0.5, later entries overwrite.
LabelImage emit_mask(const std::vector<std::pair<int, const Raster*>>& alphas,
                     std::uint32_t width, std::uint32_t height);

}  // namespace rtw::annot
