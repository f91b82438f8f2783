#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ganterp/analysis.hpp"
#include "ganterp/planner.hpp"

namespace ganterp {

inline constexpr int kTrajectoryFormatVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// Persisted plan: everything a renderer needs to produce the frames.
//
// On disk this is a JSON document:
//   format_version, tool_version, spec{d, num_classes, image_size[w, h],
//   truncation|null}, fps, audio_sha256, seed, alpha_mode,
//   keyframes[{slice_index, z[], category}],
//   frames[{z[], class_weights{"<id>": weight}}]
// Reals are written with round-trip precision.
struct Trajectory {
  GeneratorSpec spec;
  double fps = 30.0;
  std::vector<LatentKeyframe> keyframes;
  std::vector<FrameMix> frames;
  std::uint64_t seed = 0;
  std::string tool_version = kToolVersion;
  std::string audio_sha256;
  AlphaMode alpha_mode = AlphaMode::kCumulative;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// Checks every structural invariant. Throws TrajectoryError naming the field.
void validate(const Trajectory& trajectory);

std::string to_json(const Trajectory& trajectory);
// Throws TrajectoryError (MalformedTrajectory) or Error(kVersionMismatch).
Trajectory trajectory_from_json(const std::string& text);

void write_trajectory(const Trajectory& trajectory, const std::filesystem::path& path);
Trajectory read_trajectory(const std::filesystem::path& path);

// Lowercase hex SHA-256 of a file's bytes. Throws Error(kFileNotFound).
std::string sha256_file(const std::filesystem::path& path);

}  // namespace ganterp
