#include "ganterp/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ganterp/error.hpp"

namespace ganterp {

void GeneratorSpec::validate() const {
  if (latent_dim < 1) throw Error(ErrorCode::kInvalidArgument, "latent_dim must be >= 1");
  if (num_classes < 1) throw Error(ErrorCode::kInvalidArgument, "num_classes must be >= 1");
  if (image_size.width < 1 || image_size.height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "image size must be at least 1x1");
  }
  if (truncation && !(*truncation > 0.0 && *truncation <= 2.0)) {
    throw Error(ErrorCode::kInvalidArgument, "truncation must lie in (0, 2]");
  }
}

SeededStream::SeededStream(std::uint64_t seed) : engine_(seed) {}

std::uint64_t SeededStream::next_u64() { return engine_(); }

double SeededStream::next_unit() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double SeededStream::next_normal() {
  const double radius = std::sqrt(-2.0 * std::log(next_unit()));
  const double angle = 2.0 * std::numbers::pi * next_unit();
  return radius * std::cos(angle);
}

std::uint64_t SeededStream::next_below(std::uint64_t bound) {
  // Reject the low residue class so every value is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x >= threshold) return x % bound;
  }
}

std::vector<LatentKeyframe> sample_keyframes(const InflectionSet& inflections, const GeneratorSpec& spec,
                                             const CategoryPins& categories, std::uint64_t seed) {
  spec.validate();
  if (inflections.indices.empty()) throw Error(ErrorCode::kInvalidArgument, "no inflection points");
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (!categories[i]) continue;
    const int c = *categories[i];
    if (c < 0 || c >= spec.num_classes) {
      throw Error(ErrorCode::kInvalidCategory, "category " + std::to_string(c) + " at keyframe " +
                                                   std::to_string(i) + " is outside [0, " +
                                                   std::to_string(spec.num_classes) + ")");
    }
    if (i >= inflections.indices.size()) {
      throw Error(ErrorCode::kIndexOutOfRange, "category pinned at keyframe " + std::to_string(i) + " but only " +
                                                   std::to_string(inflections.indices.size()) +
                                                   " keyframes exist");
    }
  }

  SeededStream rng(seed);
  std::vector<LatentKeyframe> keyframes;
  keyframes.reserve(inflections.indices.size());
  for (std::size_t i = 0; i < inflections.indices.size(); ++i) {
    LatentKeyframe kf;
    kf.slice_index = inflections.indices[i];
    kf.z.resize(static_cast<std::size_t>(spec.latent_dim));
    for (double& v : kf.z) {
      v = rng.next_normal();
      if (spec.truncation) {
        while (std::abs(v) > *spec.truncation) v = rng.next_normal();
      }
    }
    if (i < categories.size() && categories[i]) {
      kf.category = *categories[i];
    } else {
      kf.category = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(spec.num_classes)));
    }
    keyframes.push_back(std::move(kf));
  }
  return keyframes;
}

FrameMix mix_keyframes(const LatentKeyframe& from, const LatentKeyframe& to, double alpha) {
  if (from.z.size() != to.z.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "keyframe latent sizes differ");
  }
  if (alpha == 0.0) return {from.z, {{from.category, 1.0}}};
  if (alpha == 1.0) return {to.z, {{to.category, 1.0}}};

  FrameMix mix;
  mix.z.resize(from.z.size());
  for (std::size_t j = 0; j < from.z.size(); ++j) mix.z[j] = std::lerp(from.z[j], to.z[j], alpha);

  if (from.category == to.category) {
    mix.class_weights = {{from.category, 1.0}};
  } else {
    mix.class_weights = {{from.category, 1.0 - alpha}, {to.category, alpha}};
    std::sort(mix.class_weights.begin(), mix.class_weights.end(),
              [](const ClassWeight& a, const ClassWeight& b) { return a.category < b.category; });
  }
  return mix;
}

FramePlan build_frame_plan(std::span<const LatentKeyframe> keyframes, const AlphaTrack& alphas) {
  const auto& bounds = alphas.segment_bounds.indices;
  if (keyframes.size() != bounds.size()) {
    throw Error(ErrorCode::kMisalignedInputs, std::to_string(keyframes.size()) + " keyframes for " +
                                                  std::to_string(bounds.size()) + " inflection points");
  }
  for (std::size_t i = 0; i < keyframes.size(); ++i) {
    if (keyframes[i].slice_index != bounds[i]) {
      throw Error(ErrorCode::kMisalignedInputs, "keyframe " + std::to_string(i) + " sits at slice " +
                                                    std::to_string(keyframes[i].slice_index) +
                                                    " but the inflection is at " + std::to_string(bounds[i]));
    }
  }
  validate(alphas.segment_bounds, alphas.alphas.size());

  FramePlan plan;
  plan.frames.reserve(alphas.alphas.size());
  plan.frames.push_back({keyframes[0].z, {{keyframes[0].category, 1.0}}});
  for (std::size_t seg = 1; seg < bounds.size(); ++seg) {
    for (std::size_t t = bounds[seg - 1] + 1; t <= bounds[seg]; ++t) {
      plan.frames.push_back(mix_keyframes(keyframes[seg - 1], keyframes[seg], alphas.alphas[t]));
    }
  }
  return plan;
}

}  // namespace ganterp
