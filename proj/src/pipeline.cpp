#include "ganterp/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ganterp/error.hpp"
#include "ganterp/generator.hpp"
#include "ganterp/process.hpp"
#include "ganterp/trajectory.hpp"

namespace fs = std::filesystem;

namespace ganterp {
namespace {

template <typename F>
auto in_stage(const char* name, F&& body) {
  try {
    return body();
  } catch (Error& e) {
    if (e.stage().empty()) e.set_stage(name);
    throw;
  }
}

std::string format_fps(double fps) {
  std::ostringstream out;
  out.precision(17);
  out << fps;
  return out.str();
}

std::string substitute(std::string arg, const std::string& key, const std::string& value) {
  for (std::size_t pos = arg.find(key); pos != std::string::npos; pos = arg.find(key, pos + value.size())) {
    arg.replace(pos, key.size(), value);
  }
  return arg;
}

}  // namespace

BackendSelector BackendSelector::parse(const std::string& text) {
  if (text == "mock") return {};
  const std::string prefix = "external:";
  if (text.rfind(prefix, 0) == 0 && text.size() > prefix.size()) {
    return {Kind::kExternal, fs::path(text.substr(prefix.size()))};
  }
  throw Error(ErrorCode::kInvalidArgument, "backend must be \"mock\" or \"external:<path>\", got \"" + text + "\"");
}

std::vector<std::string> default_encoder_command() {
  return {"ffmpeg",   "-y",      "-loglevel", "error",     "-framerate", "{fps}",   "-i",
          "{frames}/frame_%06d.png", "-i", "{audio}", "-c:v", "libx264", "-pix_fmt", "yuv420p",
          "-c:a",     "aac",     "-shortest", "{output}"};
}

void RunConfig::validate() const {
  if (!(fps > 0.0) || !std::isfinite(fps)) throw Error(ErrorCode::kInvalidArgument, "fps must be positive");
  if (window_samples == 0 || (window_samples & (window_samples - 1)) != 0) {
    throw Error(ErrorCode::kInvalidArgument, "window must be a positive power of two");
  }
  if (rolling_length < 1) throw Error(ErrorCode::kInvalidArgument, "rolling length must be >= 1");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw Error(ErrorCode::kInvalidArgument, "delta must be >= 0");
  if (parallelism < 1) throw Error(ErrorCode::kInvalidArgument, "parallelism must be >= 1");
  if (encode && encoder_command.empty()) throw Error(ErrorCode::kInvalidArgument, "encoder command is empty");
  generator.validate();
}

std::map<std::size_t, int> parse_category_file(const fs::path& path, int num_classes) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot read categories file " + path.string());

  std::map<std::size_t, int> pins;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long long index = 0;
    long long category = 0;
    std::string extra;
    if (!(fields >> index)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw Error(ErrorCode::kInvalidArgument, path.string() + ":" + std::to_string(line_no) +
                                                   ": expected \"<keyframe_index> <category_id>\"");
    }
    if (!(fields >> category) || (fields >> extra) || index < 0) {
      throw Error(ErrorCode::kInvalidArgument, path.string() + ":" + std::to_string(line_no) +
                                                   ": expected \"<keyframe_index> <category_id>\"");
    }
    if (category < 0 || category >= num_classes) {
      throw Error(ErrorCode::kInvalidCategory, path.string() + ":" + std::to_string(line_no) + ": category " +
                                                   std::to_string(category) + " is outside [0, " +
                                                   std::to_string(num_classes) + ")");
    }
    if (!pins.emplace(static_cast<std::size_t>(index), static_cast<int>(category)).second) {
      throw Error(ErrorCode::kInvalidArgument, path.string() + ":" + std::to_string(line_no) + ": keyframe " +
                                                   std::to_string(index) + " is pinned twice");
    }
  }
  return pins;
}

CategoryPins load_categories(const fs::path& path, std::size_t num_keyframes, int num_classes) {
  CategoryPins pins(num_keyframes);
  for (const auto& [index, category] : parse_category_file(path, num_classes)) {
    if (index >= num_keyframes) {
      throw Error(ErrorCode::kIndexOutOfRange, "category pinned at keyframe " + std::to_string(index) +
                                                   " but only " + std::to_string(num_keyframes) + " keyframes exist");
    }
    pins[index] = category;
  }
  return pins;
}

AnalysisResult analyze_audio(const RunConfig& config) {
  in_stage("config", [&] {
    config.validate();
    return 0;
  });
  const AudioBuffer audio = in_stage("decode", [&] { return decode_audio(config.audio_path); });
  const Spectrogram spec =
      in_stage("spectrogram", [&] { return compute_spectrogram(audio, config.fps, config.window_samples); });

  AnalysisResult result;
  result.num_slices = spec.num_slices();
  result.tv = in_stage("tv", [&] { return compute_tv_series(spec, config.normalize_tv); });
  result.inflections = in_stage("inflection", [&] {
    return detect_inflection_points(result.tv, {config.rolling_length, config.delta});
  });
  result.alphas = in_stage("alpha", [&] {
    return compute_alpha_track(result.tv, result.inflections,
                               config.legacy_alpha_division ? AlphaMode::kLegacyLength : AlphaMode::kCumulative);
  });

  if (config.dump_analysis) {
    in_stage("dump", [&] {
      std::ofstream out(*config.dump_analysis);
      if (!out) throw Error(ErrorCode::kIoError, "cannot write " + config.dump_analysis->string());
      write_analysis_table(out, result.tv, result.inflections, result.alphas);
      return 0;
    });
  }
  return result;
}

RunReport run_pipeline(const RunConfig& config) {
  RunReport report;

  // Parsed before analysis so a bad file fails fast; keyframe indices can
  // only be checked once the inflection count is known.
  std::map<std::size_t, int> pinned;
  if (config.categories_path) {
    pinned = in_stage("categories",
                      [&] { return parse_category_file(*config.categories_path, config.generator.num_classes); });
  }

  const AnalysisResult analysis = analyze_audio(config);
  report.num_slices = analysis.num_slices;
  report.num_inflections = analysis.inflections.indices.size();

  CategoryPins pins(report.num_inflections);
  for (const auto& [index, category] : pinned) {
    if (index < pins.size()) {
      pins[index] = category;
    } else {
      report.warnings.push_back("categories file pins keyframe " + std::to_string(index) + " but only " +
                                std::to_string(pins.size()) + " keyframes were detected; ignored");
    }
  }

  const auto keyframes = in_stage("keyframes", [&] {
    return sample_keyframes(analysis.inflections, config.generator, pins, config.seed);
  });
  FramePlan plan = in_stage("plan", [&] { return build_frame_plan(keyframes, analysis.alphas); });

  Trajectory trajectory;
  trajectory.spec = config.generator;
  trajectory.fps = config.fps;
  trajectory.keyframes = keyframes;
  trajectory.frames = std::move(plan.frames);
  trajectory.seed = config.seed;
  trajectory.alpha_mode = analysis.alphas.mode;

  report.trajectory_path = config.out_dir / "trajectory.json";
  report.frames_dir = config.out_dir / "frames";
  in_stage("trajectory", [&] {
    trajectory.audio_sha256 = sha256_file(config.audio_path);
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot create " + config.out_dir.string() + ": " + ec.message());
    write_trajectory(trajectory, report.trajectory_path);
    return 0;
  });

  const auto frames = in_stage("render", [&] {
    if (config.backend.kind == BackendSelector::Kind::kExternal) {
      ExternalGenerator generator(config.backend.executable, config.generator);
      return generator.render_trajectory(report.trajectory_path, report.frames_dir);
    }
    MockGenerator generator(config.generator);
    plan.frames = trajectory.frames;
    return render_all(generator, plan, report.frames_dir, config.parallelism);
  });
  report.frames_written = frames.size();

  if (config.encode) {
    in_stage("encode", [&] {
      const fs::path video = config.out_dir / "video.mp4";
      std::vector<std::string> argv;
      for (const auto& arg : config.encoder_command) {
        std::string a = substitute(arg, "{fps}", format_fps(config.fps));
        a = substitute(a, "{frames}", report.frames_dir.string());
        a = substitute(a, "{audio}", config.audio_path.string());
        a = substitute(a, "{output}", video.string());
        argv.push_back(std::move(a));
      }
      const ProcessResult result = run_process(argv);
      if (!result.succeeded()) {
        throw Error(ErrorCode::kEncoderFailed, "encoder " + argv.front() + " " + result.describe());
      }
      report.video_path = video;
      return 0;
    });
  }
  return report;
}

std::vector<fs::path> render_trajectory_file(const fs::path& trajectory, const fs::path& out_dir,
                                             const BackendSelector& backend, std::size_t parallelism) {
  const Trajectory t = in_stage("trajectory", [&] { return read_trajectory(trajectory); });
  return in_stage("render", [&] {
    if (backend.kind == BackendSelector::Kind::kExternal) {
      return ExternalGenerator(backend.executable, t.spec).render_trajectory(trajectory, out_dir);
    }
    FramePlan plan{t.frames};
    return render_all(MockGenerator(t.spec), plan, out_dir, parallelism);
  });
}

}  // namespace ganterp
