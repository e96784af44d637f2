#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rtw/annotation.hpp"
#include "rtw/config.hpp"
#include "rtw/geometry.hpp"
#include "rtw/image_io.hpp"
#include "rtw/prefilter.hpp"
#include "rtw/rng.hpp"
#include "rtw/text_render.hpp"
#include "rtw/text_source.hpp"

namespace rtw::pipeline {

struct Inputs {
  Raster image;     // 3 channels
  Raster depth;     // 1 channel, raw
  Raster boundary;  // 1 channel
  BoxList boxes;    // existing text and faces
};

// Reads <images>/<id>.png and <maps>/<id>.{depth,boundary}.rtwmap plus the
// optional <id>.text_boxes.json / <id>.face_boxes.json. Throws MissingMap for
// an absent map and CorruptInput for anything unreadable or mis-sized.
Inputs load_inputs(const PipelineConfig& cfg, const std::string& image_id);

// Image ids (file stems of *.png in the images directory) in name order.
std::vector<std::string> list_images(const std::filesystem::path& images_dir);

struct Resources {
  render::FontSet fonts;
  text::Corpus corpus;
};

Resources load_resources(const PipelineConfig& cfg);

struct PlacementInfo {
  int id = 0;
  std::size_t region = 0;  // index into the unfiltered region list
  geom::Homography homography;
  std::string text;        // raw sampled text, lines joined by '\n'
  std::string font;
  double size_px = 0.0;
  std::optional<render::SineWarp> warp;
  std::string blend;       // mix, replace or alpha
  bool converged = true;
};

enum class SkipReason { NoPlacement, PreexistingText };

const char* to_string(SkipReason r);

struct ImageResult {
  std::string image_id;
  std::optional<SkipReason> skipped;
  prefilter::Decision decision = prefilter::Decision::Keep;
  Raster output;
  annot::AnnotationRecord record;
  LabelImage mask;
  std::vector<PlacementInfo> placements;
  // Pixels that may differ from the input: blur footprints and blend domains.
  std::vector<std::uint8_t> touched;
};

ImageResult generate_image(const PipelineConfig& cfg, const Resources& res,
                           const std::string& image_id, const Inputs& in,
                           Rng& rng);

// Stable split: FNV-1a of the id, mixed by one SplitMix64 step, against the
// training fraction.
annot::Subset split_for(const std::string& image_id, double train_fraction);

struct RunOptions {
  std::optional<int> workers;
  std::optional<std::size_t> limit;
};

struct RunSummary {
  std::size_t images = 0;
  std::size_t generated = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
  bool corrupt_input = false;
};

// Writes images/, annotations/, masks/, manifest.jsonl, skipped.jsonl and
// stats.json under `out`. Per-image failures are recorded, not thrown.
RunSummary run(const PipelineConfig& cfg, const std::filesystem::path& out,
               const RunOptions& opts = {});

// Recomputes the statistics table from a manifest written by run().
annot::StatsTable stats_from_manifest(const std::filesystem::path& manifest);

}  // namespace rtw::pipeline
