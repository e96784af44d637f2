#include "rtw/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <thread>

#include "rtw/blending.hpp"
#include "rtw/error.hpp"
#include "rtw/polygon.hpp"
#include "rtw/region.hpp"

namespace rtw::pipeline {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

const char* to_string(SkipReason r) {
  return r == SkipReason::NoPlacement ? "NoPlacement" : "PreexistingText";
}

std::vector<std::string> list_images(const fs::path& images_dir) {
  std::vector<std::string> ids;
  for (const auto& e : fs::directory_iterator(images_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") {
      ids.push_back(e.path().stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

Raster load_map_checked(const fs::path& path, const char* kind,
                        std::uint32_t w, std::uint32_t h) {
  if (!fs::exists(path)) {
    throw Error(Errc::MissingMap, std::string(kind) + " map " + path.string());
  }
  Raster map;
  try {
    map = load_map(path);
  } catch (const Error& e) {
    throw Error(Errc::CorruptInput, path.string() + ": " + e.what());
  }
  if (map.channels() != 1 || map.width() != w || map.height() != h) {
    throw Error(Errc::CorruptInput,
                path.string() + ": expected a 1-channel " + std::to_string(w) + "x" +
                    std::to_string(h) + " map");
  }
  return map;
}

}  // namespace

Inputs load_inputs(const PipelineConfig& cfg, const std::string& id) {
  Inputs in;
  const fs::path image = cfg.images_dir / (id + ".png");
  try {
    in.image = read_png_rgb(image);
  } catch (const Error& e) {
    throw Error(Errc::CorruptInput, image.string() + ": " + e.what());
  }
  const auto w = in.image.width(), h = in.image.height();
  in.depth = load_map_checked(cfg.maps_dir / (id + ".depth.rtwmap"), "depth", w, h);
  in.boundary =
      load_map_checked(cfg.maps_dir / (id + ".boundary.rtwmap"), "boundary", w, h);
  for (const char* suffix : {".text_boxes.json", ".face_boxes.json"}) {
    const fs::path p = cfg.maps_dir / (id + suffix);
    if (!fs::exists(p)) continue;
    try {
      auto boxes = load_boxes(p, w, h);
      in.boxes.insert(in.boxes.end(), boxes.begin(), boxes.end());
    } catch (const Error& e) {
      throw Error(Errc::CorruptInput, p.string() + ": " + e.what());
    }
  }
  return in;
}

Resources load_resources(const PipelineConfig& cfg) {
  Resources res;
  res.fonts = render::load_fonts(cfg.fonts_dir);
  for (const auto& w : res.fonts.warnings) spdlog::warn("font rejected: {}", w);
  res.corpus = text::build_corpus(cfg.words, cfg.blocklist, cfg.surnames, cfg.corpus);
  spdlog::info("{} fonts, {} corpus entries ({} blocked, {} rejected)",
               res.fonts.fonts.size(), res.corpus.entries.size(),
               res.corpus.blocked, res.corpus.rejected);
  return res;
}

annot::Subset split_for(const std::string& image_id, double train_fraction) {
  // Raw FNV-1a barely moves its top bits for ids that differ in the last
  // character, so the hash goes through one SplitMix64 round first.
  const double u = Rng(fnv1a(image_id)).uniform();
  return u < train_fraction ? annot::Subset::Training : annot::Subset::Test;
}

namespace {

struct Candidate {
  render::GlyphLayout layout;
  geom::Homography homography;
  Quad quad{};
};

struct Placed {
  render::GlyphLayout layout;
  geom::WarpedPatch warped;
  PlacementInfo info;
};

constexpr double kOccupancyPad = 3.0;

std::array<float, 3> region_mean(const Raster& img, const region::Region& r) {
  double sum[3] = {0, 0, 0};
  for (auto idx : r.pixels) {
    const auto x = idx % r.image_width, y = idx / r.image_width;
    for (int c = 0; c < 3; ++c) sum[c] += img.at(x, y, c);
  }
  const double n = static_cast<double>(r.pixels.size());
  return {static_cast<float>(sum[0] / n), static_cast<float>(sum[1] / n),
          static_cast<float>(sum[2] / n)};
}

// Lays out at `size`, warps, and places on the plane; re-lays out when the
// projection would scale glyphs by more than 25% either way.
Candidate build_candidate(const text::TextSample& sample,
                          const render::FontEntry& font, double size,
                          const render::Spacing& spacing,
                          std::optional<std::array<double, 3>> warp_rel,
                          const geom::Plane& plane, const region::Region& region,
                          double fraction, const PipelineConfig& cfg) {
  Candidate c;
  for (int pass = 0; pass < 3; ++pass) {
    c.layout = render::layout_text(sample, font.face, size, spacing);
    if (warp_rel) {
      const render::SineWarp w{(*warp_rel)[0] * c.layout.line_height,
                               (*warp_rel)[1] * c.layout.width, (*warp_rel)[2]};
      c.layout = render::apply_sine_warp(c.layout, w);
    }
    const double pw = c.layout.patch_width(), ph = c.layout.patch_height();
    c.homography = geom::region_homography(plane, region, pw, ph, fraction,
                                           cfg.placement);
    c.quad = geom::patch_quad(c.homography, pw, ph);
    const double scale = std::sqrt(poly::area(c.quad) / (pw * ph));
    const double next = std::clamp(size * scale, render::kMinSizePx, render::kMaxSizePx);
    if ((scale > 0.8 && scale < 1.25) || std::abs(next - size) < 0.5) break;
    size = next;
  }
  return c;
}

std::optional<Placed> try_place(const PipelineConfig& cfg, const Resources& res,
                                const region::Region& region, const Raster& img,
                                const Raster& depth, const Raster& occupancy,
                                Rng& rng) {
  const auto sample = text::sample_text(res.corpus, rng, cfg.sample);
  const auto& font = res.fonts.fonts[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(res.fonts.fonts.size()) - 1))];
  const auto& rp = cfg.render;
  const double size = rng.uniform(rp.size_min, rp.size_max);
  const render::Spacing spacing{rng.uniform(1.0, rp.letter_spacing_max),
                                rng.uniform(1.0, rp.word_spacing_max),
                                rng.uniform(1.0, rp.line_spacing_max)};
  std::optional<std::array<double, 3>> warp_rel;
  if (rp.warp_probability > 0.0 && rng.bernoulli(rp.warp_probability)) {
    warp_rel = std::array<double, 3>{
        rng.uniform(0.0, rp.warp_amplitude_max),
        rng.uniform(rp.warp_period_min, rp.warp_period_max),
        rng.uniform(0.0, 2.0 * std::numbers::pi)};
  }
  const geom::Plane plane = geom::fit_plane(depth, region, cfg.plane, rng);
  double fraction = rng.uniform(cfg.area_fraction_min, cfg.area_fraction_max);

  Candidate cand;
  bool ok = false;
  for (int s = 0; s <= cfg.scale_retries && !ok; ++s, fraction *= 0.7) {
    cand = build_candidate(sample, font, size, spacing, warp_rel, plane, region,
                           fraction, cfg);
    ok = geom::fits(cand.layout.patch_width(), cand.layout.patch_height(), region,
                    cand.homography, cfg.min_coverage);
  }
  if (!ok) return std::nullopt;

  bool overlaps = false;
  poly::for_each_pixel_inside(poly::pad_convex(cand.quad, kOccupancyPad),
                              img.width(), img.height(),
                              [&](std::uint32_t x, std::uint32_t y) {
                                overlaps |= occupancy.at(x, y) > 0.5f;
                              });
  if (overlaps) return std::nullopt;

  const auto color =
      render::contrast_color(region_mean(img, region), rng, rp.hue_jitter_deg);
  const auto patch = render::rasterize(cand.layout, color);
  Placed p{cand.layout,
           geom::warp_patch(patch, cand.homography, img.width(), img.height()),
           {}};
  const auto alpha = p.warped.alpha.data();
  if (std::none_of(alpha.begin(), alpha.end(), [](float a) { return a > 0.5f; })) {
    return std::nullopt;
  }
  p.info.homography = cand.homography;
  p.info.text = sample.flattened();
  p.info.font = font.family;
  p.info.size_px = cand.layout.size_px;
  p.info.warp = cand.layout.warp;
  return p;
}

bool recoverable(Errc code) {
  return code == Errc::DegenerateRegion || code == Errc::NumericallySingular ||
         code == Errc::UnsupportedGlyph || code == Errc::EmptyDomain;
}

}  // namespace

ImageResult generate_image(const PipelineConfig& cfg, const Resources& res,
                           const std::string& image_id, const Inputs& in,
                           Rng& rng) {
  const std::uint32_t w = in.image.width(), h = in.image.height();
  ImageResult r;
  r.image_id = image_id;
  r.touched.assign(std::size_t{w} * h, 0);
  r.record = {image_id, w, h, {}};
  r.decision = prefilter::decide_image(in.boxes, cfg.prefilter, double(w) * h);
  if (r.decision == prefilter::Decision::Discard) {
    r.skipped = SkipReason::PreexistingText;
    return r;
  }
  Raster img = in.image;
  if (r.decision == prefilter::Decision::BlurThenKeep) {
    img = prefilter::blur_regions(img, in.boxes, cfg.prefilter);
    const auto fp = prefilter::blur_footprint(w, h, in.boxes, cfg.prefilter);
    for (std::size_t i = 0; i < fp.size(); ++i) r.touched[i] |= fp[i];
  }

  Raster depth = normalize_depth(in.depth);
  for (auto& d : depth.data()) d += static_cast<float>(cfg.depth_offset);
  const auto regions = region::regions_from_boundaries(in.boundary, cfg.region);

  Raster occupancy(w, h, 1, 0.0f);
  std::vector<Raster> alphas;
  const auto target = rng.uniform_int(cfg.placements_min, cfg.placements_max);
  for (std::int64_t k = 0; k < target; ++k) {
    const auto candidates = region::filter_regions(regions, cfg.region, &occupancy);
    if (candidates.empty()) break;
    std::optional<Placed> placed;
    std::size_t region_index = 0;
    for (int attempt = 0; attempt < cfg.retries && !placed; ++attempt) {
      const auto pick = region::pick_region(candidates, rng);
      if (!pick) break;
      const auto& region = candidates[*pick];
      region_index = static_cast<std::size_t>(
          std::find_if(regions.begin(), regions.end(),
                       [&](const region::Region& g) {
                         return g.pixels.front() == region.pixels.front();
                       }) -
          regions.begin());
      try {
        placed = try_place(cfg, res, region, img, depth, occupancy, rng);
      } catch (const Error& e) {
        if (!recoverable(e.code())) throw;
        spdlog::debug("{}: placement attempt rejected: {}", image_id, e.what());
      }
    }
    if (!placed) continue;

    const int id = static_cast<int>(r.placements.size()) + 1;
    auto para = annot::make_paragraph(id, placed->layout, placed->warped.layout, w, h);
    if (para.lines.empty()) continue;

    auto& info = placed->info;
    info.id = id;
    info.region = region_index;
    const auto& wp = placed->warped;
    bool blended = false;
    if (cfg.poisson) {
      try {
        const auto problem =
            blend::build_problem(img, wp.color, wp.alpha, cfg.blend_mode, cfg.solver);
        const auto solution = blend::solve(problem);
        img = blend::compose(img, solution, problem);
        for (auto p : problem.pixels) r.touched[p] = 1;
        info.blend = blend::to_string(cfg.blend_mode);
        info.converged = solution.converged;
        if (!solution.converged) {
          spdlog::warn("{}: Poisson solve stopped at residual {:.3g}", image_id,
                       solution.residual);
        }
        blended = true;
      } catch (const Error& e) {
        if (e.code() != Errc::EmptyDomain) throw;
      }
    }
    if (!blended) {
      img = blend::alpha_blend(img, wp.color, wp.alpha);
      const auto a = wp.alpha.data();
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > 0.0f) r.touched[i] = 1;
      }
      info.blend = "alpha";
    }
    poly::for_each_pixel_inside(
        poly::pad_convex(geom::patch_quad(info.homography, placed->layout.patch_width(),
                                          placed->layout.patch_height()),
                         kOccupancyPad),
        w, h, [&](std::uint32_t x, std::uint32_t y) { occupancy.at(x, y) = 1.0f; });

    r.record.paragraphs.push_back(std::move(para));
    alphas.push_back(wp.alpha);
    r.placements.push_back(std::move(info));
  }

  if (r.placements.empty()) {
    r.skipped = SkipReason::NoPlacement;
    return r;
  }
  std::vector<std::pair<int, const Raster*>> ids;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    ids.emplace_back(static_cast<int>(i) + 1, &alphas[i]);
  }
  r.mask = annot::emit_mask(ids, w, h);
  r.output = std::move(img);
  return r;
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct Outcome {
  std::optional<std::string> manifest;
  std::optional<std::string> skipped;
  std::optional<annot::AnnotationRecord> record;
  annot::Subset split = annot::Subset::Training;
  bool corrupt = false;
  bool failed = false;
};

std::string skip_line(const std::string& id, std::string_view reason,
                      const std::string& detail) {
  ojson j;
  j["image_id"] = id;
  j["reason"] = reason;
  j["detail"] = detail;
  return j.dump();
}

Outcome process(const PipelineConfig& cfg, const Resources& res,
                const fs::path& out, const std::string& id) {
  Outcome o;
  try {
    const Inputs in = load_inputs(cfg, id);
    Rng rng = derive_rng(cfg.seed, id);
    const auto key = rng.key();
    auto result = generate_image(cfg, res, id, in, rng);
    if (result.skipped) {
      o.skipped = skip_line(id, to_string(*result.skipped),
                            prefilter::to_string(result.decision));
      spdlog::info("{}: skipped ({})", id, to_string(*result.skipped));
      return o;
    }
    const std::string image_rel = "images/" + id + ".png";
    const std::string ann_rel = "annotations/" + id + ".json";
    const std::string mask_rel = "masks/" + id + ".png";
    write_png_rgb(result.output, out / image_rel);
    annot::save_record(result.record, out / ann_rel);
    write_png_gray16(result.mask, out / mask_rel);
    o.split = split_for(id, cfg.train_fraction);
    ojson m;
    m["image_id"] = id;
    m["image"] = image_rel;
    m["annotation"] = ann_rel;
    m["mask"] = mask_rel;
    m["seed"] = cfg.seed;
    m["stream_key"] = hex64(key);
    m["placements"] = result.placements.size();
    m["split"] = annot::to_string(o.split);
    o.manifest = m.dump();
    o.record = std::move(result.record);
    spdlog::info("{}: {} placements", id, result.placements.size());
  } catch (const Error& e) {
    const auto reason = to_string(e.code());
    o.skipped = skip_line(id, reason, e.what());
    o.corrupt = e.code() == Errc::CorruptInput;
    o.failed = true;
    spdlog::error("{}: {}", id, e.what());
  }
  return o;
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::ofstream f(path, std::ios::binary);
  for (const auto& l : lines) f << l << '\n';
  if (!f) throw Error(Errc::IoFailure, "cannot write " + path.string());
}

}  // namespace

RunSummary run(const PipelineConfig& cfg, const fs::path& out, const RunOptions& opts) {
  cfg.validate();
  const Resources res = load_resources(cfg);
  auto ids = list_images(cfg.images_dir);
  if (opts.limit && ids.size() > *opts.limit) ids.resize(*opts.limit);
  for (const char* sub : {"images", "annotations", "masks"}) {
    fs::create_directories(out / sub);
  }

  std::vector<Outcome> outcomes(ids.size());
  const int workers = std::max(1, opts.workers.value_or(cfg.workers));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < ids.size(); i = next++) {
      outcomes[i] = process(cfg, res, out, ids[i]);
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
  }

  RunSummary summary;
  summary.images = ids.size();
  std::vector<std::string> manifest, skipped;
  std::vector<annot::AnnotationRecord> records;
  std::vector<annot::Subset> split;
  for (auto& o : outcomes) {
    if (o.manifest) {
      manifest.push_back(*o.manifest);
      records.push_back(std::move(*o.record));
      split.push_back(o.split);
      ++summary.generated;
    }
    if (o.skipped) {
      skipped.push_back(*o.skipped);
      ++(o.failed ? summary.failed : summary.skipped);
    }
    summary.corrupt_input |= o.corrupt;
  }
  write_lines(out / "manifest.jsonl", manifest);
  write_lines(out / "skipped.jsonl", skipped);
  std::ofstream(out / "stats.json", std::ios::binary)
      << annot::stats_to_json(annot::compute_stats(records, split));
  return summary;
}

annot::StatsTable stats_from_manifest(const fs::path& manifest) {
  std::ifstream in(manifest, std::ios::binary);
  if (!in) throw Error(Errc::MissingFile, manifest.string());
  const fs::path base = manifest.parent_path();
  std::vector<annot::AnnotationRecord> records;
  std::vector<annot::Subset> split;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const auto j = ojson::parse(line);
      records.push_back(annot::load_record(base / j.at("annotation").get<std::string>()));
      const auto s = j.at("split").get<std::string>();
      if (s != "training" && s != "test") {
        throw Error(Errc::BadJson, "split must be training or test");
      }
      split.push_back(s == "training" ? annot::Subset::Training : annot::Subset::Test);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::BadJson, manifest.string() + " line " +
                                     std::to_string(number) + ": " + e.what());
    }
  }
  return annot::compute_stats(records, split);
}

}  // namespace rtw::pipeline
