#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ganterp/image.hpp"
#include "ganterp/planner.hpp"

namespace ganterp {

enum class BackendConcurrency {
  kConcurrent,  // render_frame may be called from several threads at once
  kSerialized,  // one request in flight at a time
};

// The generator G: maps a latent vector and class mixture to an image.
class Generator {
 public:
  virtual ~Generator() = default;

  virtual const GeneratorSpec& spec() const = 0;
  virtual BackendConcurrency concurrency() const = 0;
  virtual FrameImage render_frame(std::span<const double> z_mix, const ClassWeights& class_weights) const = 0;

 protected:
  // Throws Error(kDimensionMismatch) unless the inputs fit spec().
  void check_inputs(std::span<const double> z_mix, const ClassWeights& class_weights) const;
};

// Procedural stand-in for a trained generator. Channel k of pixel (x, y) is
//
//   0.5 + 0.5 * sin( sum_j z[j] * phi(j, k, u, v) + sum_c w_c * psi(c) )
//
// with u = x / width, v = y / height and
//
//   phi(j, k, u, v) = cos(2 pi (fx(j) u + fy(j) v) + theta(j, k))
//   fx(j) = j mod 3,  fy(j) = (j / 3) mod 3
//   theta(j, k) = 2 pi frac((3 j + k + 1) g)
//   psi(c) = 2 pi frac((c + 1) g),  g = (sqrt(5) - 1) / 2
//
// quantized with round(255 * value). Spatial frequencies stay at or below two
// cycles per image, so nearby latents produce nearby images.
class MockGenerator final : public Generator {
 public:
  explicit MockGenerator(GeneratorSpec spec);

  const GeneratorSpec& spec() const override { return spec_; }
  BackendConcurrency concurrency() const override { return BackendConcurrency::kConcurrent; }
  FrameImage render_frame(std::span<const double> z_mix, const ClassWeights& class_weights) const override;

  static double class_phase(int category);

 private:
  GeneratorSpec spec_;
  // cos/sin of the x-dependent and y-dependent parts of phi, per (j, k).
  std::vector<double> cos_x_, sin_x_, cos_y_, sin_y_;
};

// Delegates rendering to an executable invoked as `<exe> <trajectory> <out_dir>`
// which must exit 0 and leave exactly one frame_%06d.png per trajectory frame.
class ExternalGenerator final : public Generator {
 public:
  ExternalGenerator(std::filesystem::path executable, GeneratorSpec spec);

  const GeneratorSpec& spec() const override { return spec_; }
  BackendConcurrency concurrency() const override { return BackendConcurrency::kSerialized; }

  // Renders one mixture by handing the renderer a three-frame trajectory whose
  // middle frame is the requested mixture.
  FrameImage render_frame(std::span<const double> z_mix, const ClassWeights& class_weights) const override;

  // Renders every frame of a trajectory file into out_dir and returns the
  // frame paths in index order. Throws Error(kBackendUnavailable) when the
  // process fails or the frame set does not match the trajectory.
  std::vector<std::filesystem::path> render_trajectory(const std::filesystem::path& trajectory,
                                                       const std::filesystem::path& out_dir) const;

  const std::filesystem::path& executable() const noexcept { return executable_; }

 private:
  std::filesystem::path executable_;
  GeneratorSpec spec_;
};

std::string frame_file_name(std::size_t index);

// Renders each plan frame to out_dir/frame_%06d.png using up to
// `parallelism` threads (one for serialized backends). The directory is
// created and probed for writability before the backend is touched.
std::vector<std::filesystem::path> render_all(const Generator& generator, const FramePlan& plan,
                                              const std::filesystem::path& out_dir, std::size_t parallelism);

}  // namespace ganterp
