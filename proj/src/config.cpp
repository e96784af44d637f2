#include "rtw/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rtw/error.hpp"

namespace rtw {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues KeyValues::parse(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::BadConfig, "line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw Error(Errc::BadConfig, "line " + std::to_string(number) + ": empty key");
    }
    if (!kv.values_.emplace(key, value).second) {
      throw Error(Errc::BadConfig, "duplicate key " + key);
    }
  }
  return kv;
}

std::optional<std::string> KeyValues::str(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  used_.insert(key);
  return it->second;
}

std::optional<double> KeyValues::number(const std::string& key) const {
  const auto s = str(key);
  if (!s) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
  if (ec != std::errc() || ptr != s->data() + s->size()) {
    throw Error(Errc::BadConfig, key + ": not a number: " + *s);
  }
  return v;
}

double KeyValues::number(const std::string& key, double fallback) const {
  return number(key).value_or(fallback);
}

std::int64_t KeyValues::integer(const std::string& key, std::int64_t fallback) const {
  const auto s = str(key);
  if (!s) return fallback;
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
  if (ec != std::errc() || ptr != s->data() + s->size()) {
    throw Error(Errc::BadConfig, key + ": not an integer: " + *s);
  }
  return v;
}

bool KeyValues::boolean(const std::string& key, bool fallback) const {
  const auto s = str(key);
  if (!s) return fallback;
  if (*s == "true" || *s == "1" || *s == "yes") return true;
  if (*s == "false" || *s == "0" || *s == "no") return false;
  throw Error(Errc::BadConfig, key + ": not a boolean: " + *s);
}

std::set<std::string> KeyValues::unused() const {
  std::set<std::string> out;
  for (const auto& [k, v] : values_) {
    if (!used_.count(k)) out.insert(k);
  }
  return out;
}

void PipelineConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(Errc::BadConfig, what); };
  auto need_dir = [&](const std::filesystem::path& p, const char* key) {
    if (p.empty() || !std::filesystem::is_directory(p)) {
      fail(std::string(key) + ": directory not found: " + p.string());
    }
  };
  auto need_file = [&](const std::filesystem::path& p, const char* key) {
    if (!std::filesystem::is_regular_file(p)) {
      fail(std::string(key) + ": file not found: " + p.string());
    }
  };
  need_dir(images_dir, "paths.images");
  need_dir(maps_dir, "paths.maps");
  need_dir(fonts_dir, "paths.fonts");
  need_file(words, "paths.words");
  if (!blocklist.empty()) need_file(blocklist, "paths.blocklist");
  if (!surnames.empty()) need_file(surnames, "paths.surnames");
  if (workers < 1) fail("run.workers must be >= 1");
  if (placements_min < 1 || placements_max < placements_min) {
    fail("run.placements_min/max: empty range");
  }
  if (retries < 1) fail("run.retries must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    fail("run.train_fraction must be in (0,1)");
  }
  prefilter.validate();
  region.validate();
  corpus.validate();
  if (sample.max_lines < 1 || sample.words_min < 1 || sample.words_max < sample.words_min) {
    fail("text: line/word ranges are empty");
  }
  if (!(sample.punctuation_prob >= 0.0 && sample.punctuation_prob <= 1.0)) {
    fail("text.punctuation_prob must be in [0,1]");
  }
  const auto& r = render;
  if (!(r.size_min >= 12.0 && r.size_max <= 96.0 && r.size_min <= r.size_max)) {
    fail("render.size_min/max must lie in [12,96]");
  }
  if (!(r.letter_spacing_max >= 1.0 && r.word_spacing_max >= 1.0 &&
        r.line_spacing_max >= 1.0)) {
    fail("render spacing maxima must be >= 1");
  }
  if (!(r.warp_probability >= 0.0 && r.warp_probability <= 1.0)) {
    fail("render.warp_probability must be in [0,1]");
  }
  if (!(r.warp_amplitude_max >= 0.0 && r.warp_amplitude_max <= 0.5)) {
    fail("render.warp_amplitude_max must be in [0,0.5]");
  }
  if (!(r.warp_period_min > 0.0 && r.warp_period_max >= r.warp_period_min)) {
    fail("render.warp_period_min/max: empty range");
  }
  plane.validate();
  if (!(placement.min_normal_z > 0.0 && placement.min_normal_z < 1.0)) {
    fail("geometry.min_normal_z must be in (0,1)");
  }
  if (!(depth_offset >= 0.0)) fail("geometry.depth_offset must be >= 0");
  if (!(min_coverage > 0.0 && min_coverage <= 1.0)) {
    fail("geometry.min_coverage must be in (0,1]");
  }
  if (!(area_fraction_min > 0.0 && area_fraction_max >= area_fraction_min &&
        area_fraction_max <= 1.0)) {
    fail("geometry.area_fraction_min/max must satisfy 0 < min <= max <= 1");
  }
  if (scale_retries < 0) fail("geometry.scale_retries must be >= 0");
  if (!(solver.tolerance > 0.0)) fail("blend.tolerance must be > 0");
  if (solver.max_iters && *solver.max_iters < 1) fail("blend.max_iters must be >= 1");
}

PipelineConfig parse_config(const std::string& text,
                            const std::filesystem::path& base_dir) {
  const KeyValues kv = KeyValues::parse(text);
  PipelineConfig c;
  auto path = [&](const char* key) -> std::filesystem::path {
    const auto s = kv.str(key);
    if (!s || s->empty()) return {};
    std::filesystem::path p(*s);
    return p.is_absolute() ? p : base_dir / p;
  };
  c.images_dir = path("paths.images");
  c.maps_dir = path("paths.maps");
  c.fonts_dir = path("paths.fonts");
  c.words = path("paths.words");
  c.blocklist = path("paths.blocklist");
  c.surnames = path("paths.surnames");

  const auto seed = kv.integer("run.seed", 0);
  if (seed < 0) throw Error(Errc::BadConfig, "run.seed must be >= 0");
  c.seed = static_cast<std::uint64_t>(seed);
  c.workers = static_cast<int>(kv.integer("run.workers", c.workers));
  c.placements_min = static_cast<int>(kv.integer("run.placements_min", c.placements_min));
  c.placements_max = static_cast<int>(kv.integer("run.placements_max", c.placements_max));
  c.retries = static_cast<int>(kv.integer("run.retries", c.retries));
  c.train_fraction = kv.number("run.train_fraction", c.train_fraction);

  auto& pf = c.prefilter;
  pf.discard_coverage_threshold =
      kv.number("prefilter.discard_threshold", pf.discard_coverage_threshold);
  pf.blur_sigma = kv.number("prefilter.blur_sigma");
  pf.face_blur = kv.boolean("prefilter.face_blur", pf.face_blur);
  pf.feather_px = kv.number("prefilter.feather_px", pf.feather_px);

  auto& rg = c.region;
  rg.boundary_threshold = kv.number("region.boundary_threshold", rg.boundary_threshold);
  rg.min_area = kv.number("region.min_area");
  rg.min_area_fraction = kv.number("region.min_area_fraction", rg.min_area_fraction);
  rg.max_aspect = kv.number("region.max_aspect", rg.max_aspect);
  rg.max_text_occupancy = kv.number("region.max_text_occupancy", rg.max_text_occupancy);

  auto& cp = c.corpus;
  cp.word_weight = kv.number("corpus.word_weight", cp.word_weight);
  cp.surname_weight = kv.number("corpus.surname_weight", cp.surname_weight);
  cp.number_template = kv.boolean("corpus.number_template", cp.number_template);
  cp.number_weight = kv.number("corpus.number_weight", cp.number_weight);
  cp.number_min_digits =
      static_cast<int>(kv.integer("corpus.number_min_digits", cp.number_min_digits));
  cp.number_max_digits =
      static_cast<int>(kv.integer("corpus.number_max_digits", cp.number_max_digits));
  cp.phone_template = kv.boolean("corpus.phone_template", cp.phone_template);
  cp.phone_weight = kv.number("corpus.phone_weight", cp.phone_weight);

  auto& sl = c.sample;
  sl.max_lines = static_cast<int>(kv.integer("text.max_lines", sl.max_lines));
  sl.words_min = static_cast<int>(kv.integer("text.words_min", sl.words_min));
  sl.words_max = static_cast<int>(kv.integer("text.words_max", sl.words_max));
  sl.punctuation_prob = kv.number("text.punctuation_prob", sl.punctuation_prob);

  auto& r = c.render;
  r.size_min = kv.number("render.size_min", r.size_min);
  r.size_max = kv.number("render.size_max", r.size_max);
  r.letter_spacing_max = kv.number("render.letter_spacing_max", r.letter_spacing_max);
  r.word_spacing_max = kv.number("render.word_spacing_max", r.word_spacing_max);
  r.line_spacing_max = kv.number("render.line_spacing_max", r.line_spacing_max);
  r.warp_probability = kv.number("render.warp_probability", r.warp_probability);
  r.warp_amplitude_max = kv.number("render.warp_amplitude_max", r.warp_amplitude_max);
  r.warp_period_min = kv.number("render.warp_period_min", r.warp_period_min);
  r.warp_period_max = kv.number("render.warp_period_max", r.warp_period_max);
  r.hue_jitter_deg = kv.number("render.hue_jitter_deg", r.hue_jitter_deg);

  c.plane.focal_assumption = kv.number("geometry.focal_assumption", c.plane.focal_assumption);
  c.placement.focal_assumption = c.plane.focal_assumption;
  c.plane.ransac_iters = static_cast<int>(kv.integer("geometry.ransac_iters", c.plane.ransac_iters));
  c.plane.inlier_tol = kv.number("geometry.inlier_tol", c.plane.inlier_tol);
  c.placement.min_normal_z = kv.number("geometry.min_normal_z", c.placement.min_normal_z);
  c.depth_offset = kv.number("geometry.depth_offset", c.depth_offset);
  c.min_coverage = kv.number("geometry.min_coverage", c.min_coverage);
  c.area_fraction_min = kv.number("geometry.area_fraction_min", c.area_fraction_min);
  c.area_fraction_max = kv.number("geometry.area_fraction_max", c.area_fraction_max);
  c.scale_retries = static_cast<int>(kv.integer("geometry.scale_retries", c.scale_retries));

  if (const auto mode = kv.str("blend.mode")) {
    if (*mode == "mix") {
      c.blend_mode = blend::Mode::Mix;
    } else if (*mode == "replace") {
      c.blend_mode = blend::Mode::Replace;
    } else if (*mode == "alpha") {
      c.poisson = false;
    } else {
      throw Error(Errc::BadConfig, "blend.mode must be mix, replace or alpha");
    }
  }
  c.solver.tolerance = kv.number("blend.tolerance", c.solver.tolerance);
  if (const auto it = kv.number("blend.max_iters")) c.solver.max_iters = static_cast<int>(*it);

  const auto unused = kv.unused();
  if (!unused.empty()) {
    throw Error(Errc::BadConfig, "unknown key " + *unused.begin());
  }
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::BadConfig, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto dir = path.parent_path();
  if (dir.empty()) dir = ".";
  return parse_config(ss.str(), dir);
}

}  // namespace rtw
