// rtwgen: synthetic scene-text generator command line.
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "rtw/annotation.hpp"
#include "rtw/config.hpp"
#include "rtw/error.hpp"
#include "rtw/pipeline.hpp"
#include "rtw/preview.hpp"
#include "rtw/raster.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCorrupt = 1;
constexpr int kExitConfig = 2;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("rtw");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* level = std::getenv("RTW_LOG");
  const std::string l = level ? level : "info";
  if (l == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (l == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    spdlog::set_level(spdlog::level::info);
  }
}

bool is_config_error(rtw::Errc c) {
  using rtw::Errc;
  return c == Errc::BadConfig || c == Errc::NoUsableFonts || c == Errc::EmptyCorpus ||
         c == Errc::MalformedUtf8;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Returns an empty string when the file is well formed.
std::string check_file(const fs::path& p) {
  const std::string name = p.filename().string();
  try {
    if (p.extension() == ".rtwmap") {
      const auto map = rtw::load_map(p);
      if (name.find(".boundary.") != std::string::npos) {
        for (float v : map.data()) {
          if (v < 0.0f || v > 1.0f) return "boundary sample outside [0,1]";
        }
      }
      return {};
    }
    if (name.ends_with("_boxes.json")) {
      rtw::parse_boxes(slurp(p), rtw::kMaxMapSide, rtw::kMaxMapSide);
      return {};
    }
    if (name == "stats.json") {
      rtw::annot::stats_from_json(slurp(p));
      return {};
    }
    if (p.extension() == ".jsonl") {
      std::istringstream in(slurp(p));
      std::string line;
      while (std::getline(in, line)) {
        if (!line.empty() && nlohmann::json::parse(line).is_discarded()) {
          return "unparsable manifest line";
        }
      }
      return {};
    }
    if (p.extension() == ".json") {
      const auto record = rtw::annot::record_from_json(slurp(p));
      const auto violations = rtw::annot::validate_record(record);
      std::string out;
      for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += std::string(rtw::annot::to_string(v.kind)) + " (paragraph " +
               std::to_string(v.paragraph) + "): " + v.detail;
      }
      return out;
    }
  } catch (const rtw::Error& e) {
    return e.what();
  } catch (const nlohmann::json::exception& e) {
    return e.what();
  }
  return {};
}

int cmd_validate(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    spdlog::error("not a directory: {}", dir.string());
    return kExitCorrupt;
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension();
    if (ext == ".rtwmap" || ext == ".json" || ext == ".jsonl") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::size_t bad = 0;
  for (const auto& f : files) {
    const auto problem = check_file(f);
    const auto rel = fs::relative(f, dir).string();
    if (problem.empty()) {
      std::cout << "OK   " << rel << "\n";
    } else {
      ++bad;
      std::cout << "FAIL " << rel << ": " << problem << "\n";
    }
  }
  std::cout << files.size() << " files checked, " << bad << " with violations\n";
  return bad ? kExitCorrupt : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Synthetic scene-text dataset generator"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Render text into the configured images");
  fs::path config, out;
  std::uint64_t seed = 0;
  int workers = 0;
  std::size_t limit = 0;
  gen->add_option("--config", config, "Config file")->required();
  auto* seed_opt = gen->add_option("--seed", seed, "Global seed (overrides run.seed)");
  gen->add_option("--out", out, "Output directory")->required();
  auto* workers_opt = gen->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  auto* limit_opt = gen->add_option("--limit", limit, "Process at most M images");

  auto* stats = app.add_subcommand("stats", "Recompute statistics from a manifest");
  fs::path manifest, stats_out;
  stats->add_option("--manifest", manifest)->required();
  stats->add_option("--out", stats_out)->required();

  auto* validate = app.add_subcommand("validate", "Check annotation, map and box files");
  fs::path validate_dir;
  validate->add_option("--dir", validate_dir)->required();

  auto* prev = app.add_subcommand("preview", "Draw annotations over an image");
  fs::path image, annotation, mask, prev_out;
  prev->add_option("--image", image)->required();
  prev->add_option("--annotation", annotation)->required();
  auto* mask_opt = prev->add_option("--mask", mask, "Instance mask PNG");
  prev->add_option("--out", prev_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) {
      rtw::PipelineConfig cfg;
      try {
        cfg = rtw::load_config(config);
      } catch (const rtw::Error& e) {
        spdlog::error("{}", e.what());
        return kExitConfig;
      }
      if (*seed_opt) cfg.seed = seed;
      rtw::pipeline::RunOptions opts;
      if (*workers_opt) opts.workers = workers;
      if (*limit_opt) opts.limit = limit;
      const auto summary = rtw::pipeline::run(cfg, out, opts);
      spdlog::info("{} images: {} generated, {} skipped, {} failed", summary.images,
                   summary.generated, summary.skipped, summary.failed);
      return summary.corrupt_input ? kExitCorrupt : kExitOk;
    }
    if (*stats) {
      const auto table = rtw::pipeline::stats_from_manifest(manifest);
      std::ofstream(stats_out, std::ios::binary) << rtw::annot::stats_to_json(table);
      return kExitOk;
    }
    if (*validate) return cmd_validate(validate_dir);
    if (*prev) {
      std::optional<fs::path> m;
      if (*mask_opt) m = mask;
      rtw::preview::preview(image, annotation, m, prev_out);
      return kExitOk;
    }
  } catch (const rtw::Error& e) {
    spdlog::error("{}", e.what());
    return is_config_error(e.code()) ? kExitConfig : kExitCorrupt;
  }
  return kExitOk;
}
