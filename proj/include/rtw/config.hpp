#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "rtw/blending.hpp"
#include "rtw/geometry.hpp"
#include "rtw/prefilter.hpp"
#include "rtw/region.hpp"
#include "rtw/text_source.hpp"

namespace rtw {

// Flat `section.key = value` file. '#' starts a comment; blank lines are
// ignored. Reading a key marks it used so leftovers can be reported.
class KeyValues {
 public:
  static KeyValues parse(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> str(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  std::optional<double> number(const std::string& key) const;
  std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  // Keys never read, in sorted order.
  std::set<std::string> unused() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

struct RenderParams {
  double size_min = 14.0;           // pixels
  double size_max = 48.0;
  double letter_spacing_max = 1.15; // multipliers drawn from [1, max]
  double word_spacing_max = 1.5;
  double line_spacing_max = 1.3;
  double warp_probability = 0.5;
  double warp_amplitude_max = 0.25; // fraction of the line height, <= 0.5
  double warp_period_min = 1.0;     // multiples of the patch width
  double warp_period_max = 3.0;
  double hue_jitter_deg = 12.0;
};

struct PipelineConfig {
  std::filesystem::path images_dir;
  std::filesystem::path maps_dir;
  std::filesystem::path fonts_dir;
  std::filesystem::path words;
  std::filesystem::path blocklist;  // optional
  std::filesystem::path surnames;   // optional

  std::uint64_t seed = 0;
  int workers = 1;
  int placements_min = 1;
  int placements_max = 4;
  int retries = 3;
  double train_fraction = 0.946;

  prefilter::PrefilterPolicy prefilter;
  region::RegionParams region;
  text::CorpusConfig corpus;
  text::SampleLayout sample;
  RenderParams render;
  geom::PlaneFitConfig plane;
  geom::PlacementConfig placement;
  double depth_offset = 0.5;  // added to normalized depth before back-projection
  double min_coverage = 0.98;
  double area_fraction_min = 0.2;
  double area_fraction_max = 0.7;
  int scale_retries = 3;
  bool poisson = true;
  blend::Mode blend_mode = blend::Mode::Mix;
  blend::SolverConfig solver;

  // Throws BadConfig with the offending key.
  void validate() const;
};

// Relative paths resolve against `base_dir`. Unknown keys are BadConfig.
PipelineConfig parse_config(const std::string& text,
                            const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace rtw
