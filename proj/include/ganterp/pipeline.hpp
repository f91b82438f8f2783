#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ganterp/analysis.hpp"
#include "ganterp/planner.hpp"

namespace ganterp {

struct BackendSelector {
  enum class Kind { kMock, kExternal } kind = Kind::kMock;
  std::filesystem::path executable;  // for kExternal

  // Accepts "mock" or "external:<path>". Throws Error(kInvalidArgument).
  static BackendSelector parse(const std::string& text);
};

// Placeholders substituted per argument: {fps} {frames} {audio} {output}.
std::vector<std::string> default_encoder_command();

struct RunConfig {
  std::filesystem::path audio_path;
  double fps = 30.0;
  std::size_t window_samples = 2048;
  std::size_t rolling_length = 30;
  double delta = 0.1;
  bool normalize_tv = true;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> categories_path;
  BackendSelector backend;
  GeneratorSpec generator;  // truncation lives here
  std::filesystem::path out_dir;
  std::size_t parallelism = 1;
  bool encode = false;
  std::vector<std::string> encoder_command = default_encoder_command();
  bool legacy_alpha_division = false;
  std::optional<std::filesystem::path> dump_analysis;

  // Throws Error(kInvalidArgument) for values outside the stage preconditions.
  void validate() const;
};

struct AnalysisResult {
  std::size_t num_slices = 0;
  TvSeries tv;
  InflectionSet inflections;
  AlphaTrack alphas;
};

struct RunReport {
  std::size_t num_slices = 0;
  std::size_t num_inflections = 0;
  std::size_t frames_written = 0;
  std::filesystem::path trajectory_path;
  std::filesystem::path frames_dir;
  std::optional<std::filesystem::path> video_path;
  std::vector<std::string> warnings;
};

// Parses "<keyframe_index> <category_id>" lines; '#' starts a comment.
// Throws Error(kInvalidCategory) for ids outside [0, num_classes) and
// Error(kInvalidArgument) for malformed or duplicate lines.
std::map<std::size_t, int> parse_category_file(const std::filesystem::path& path, int num_classes);

// Sparse pins for exactly num_keyframes keyframes. Throws
// Error(kIndexOutOfRange) when a line names a keyframe that does not exist.
CategoryPins load_categories(const std::filesystem::path& path, std::size_t num_keyframes, int num_classes);

// decode -> spectrogram -> TV -> inflections -> alphas. Errors carry the stage name.
AnalysisResult analyze_audio(const RunConfig& config);

// The full pipeline. Rerunning with the same config and audio reproduces the
// trajectory bytes, and with the mock backend the frame bytes.
RunReport run_pipeline(const RunConfig& config);

// Renders an existing trajectory file into out_dir.
std::vector<std::filesystem::path> render_trajectory_file(const std::filesystem::path& trajectory,
                                                          const std::filesystem::path& out_dir,
                                                          const BackendSelector& backend, std::size_t parallelism);

}  // namespace ganterp
