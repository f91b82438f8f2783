#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ganterp/analysis.hpp"

namespace ganterp {

struct ImageSize {
  int width = 128;
  int height = 128;

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

// Capabilities of a class-conditional generator: latent dimension d, number
// of categories |C|, output resolution and optional truncation threshold.
struct GeneratorSpec {
  int latent_dim = 128;
  int num_classes = 1000;
  ImageSize image_size;
  std::optional<double> truncation;

  void validate() const;

  friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

struct LatentKeyframe {
  std::size_t slice_index = 0;
  std::vector<double> z;
  int category = 0;

  friend bool operator==(const LatentKeyframe&, const LatentKeyframe&) = default;
};

struct ClassWeight {
  int category = 0;
  double weight = 0.0;

  friend bool operator==(const ClassWeight&, const ClassWeight&) = default;
};

// Convex weights over categories: at most two entries, sorted by category,
// all weights in (0, 1], summing to 1.
using ClassWeights = std::vector<ClassWeight>;

struct FrameMix {
  std::vector<double> z;
  ClassWeights class_weights;

  friend bool operator==(const FrameMix&, const FrameMix&) = default;
};

struct FramePlan {
  std::vector<FrameMix> frames;

  friend bool operator==(const FramePlan&, const FramePlan&) = default;
};

// Sparse per-keyframe category pins; std::nullopt means "draw at random".
using CategoryPins = std::vector<std::optional<int>>;

// Deterministic source of the planner's randomness. The engine's output is
// fixed by the standard, but <random> distributions are implementation
// defined, so normal and bounded-uniform draws are derived here directly.
class SeededStream {
 public:
  explicit SeededStream(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform in (0, 1].
  double next_unit();
  double next_normal();
  // Uniform integer in [0, bound).
  std::uint64_t next_below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

std::vector<LatentKeyframe> sample_keyframes(const InflectionSet& inflections, const GeneratorSpec& spec,
                                             const CategoryPins& categories, std::uint64_t seed);

FramePlan build_frame_plan(std::span<const LatentKeyframe> keyframes, const AlphaTrack& alphas);

// Mixture for a single frame between two keyframes at interpolation weight alpha.
FrameMix mix_keyframes(const LatentKeyframe& from, const LatentKeyframe& to, double alpha);

}  // namespace ganterp
