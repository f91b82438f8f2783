#include "ganterp/generator.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <regex>
#include <thread>

#include "ganterp/error.hpp"
#include "ganterp/process.hpp"
#include "ganterp/trajectory.hpp"

namespace fs = std::filesystem;

namespace ganterp {
namespace {

constexpr double kGoldenFraction = 0.6180339887498949;  // (sqrt(5) - 1) / 2
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(double x) { return x - std::floor(x); }

bool is_frame_file(const fs::path& p) {
  static const std::regex pattern(R"(frame_\d{6}\.png)");
  return std::regex_match(p.filename().string(), pattern);
}

// Leaves out_dir without any frame_%06d.png so the result holds exactly the new frames.
void remove_frame_files(const fs::path& dir) {
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && is_frame_file(entry.path())) fs::remove(entry.path(), ec);
  }
}

void prepare_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::kIoError, "cannot create output directory " + dir.string() +
                                         (ec ? ": " + ec.message() : std::string()));
  }
  const fs::path probe = dir / ".ganterp_write_probe";
  {
    std::ofstream out(probe, std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "output directory " + dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
  remove_frame_files(dir);
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    path_ = fs::temp_directory_path() /
            ("ganterp-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

}  // namespace

void Generator::check_inputs(std::span<const double> z_mix, const ClassWeights& class_weights) const {
  const auto& s = spec();
  if (z_mix.size() != static_cast<std::size_t>(s.latent_dim)) {
    throw Error(ErrorCode::kDimensionMismatch, "latent has " + std::to_string(z_mix.size()) +
                                                   " entries, generator expects " + std::to_string(s.latent_dim));
  }
  if (!std::all_of(z_mix.begin(), z_mix.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(ErrorCode::kDimensionMismatch, "latent contains a non-finite entry");
  }
  if (class_weights.empty() || class_weights.size() > 2) {
    throw Error(ErrorCode::kDimensionMismatch, "class weights must have 1 or 2 entries");
  }
  double sum = 0.0;
  for (const auto& w : class_weights) {
    if (w.category < 0 || w.category >= s.num_classes) {
      throw Error(ErrorCode::kDimensionMismatch, "category " + std::to_string(w.category) + " out of range");
    }
    if (!(w.weight >= 0.0 && w.weight <= 1.0)) {
      throw Error(ErrorCode::kDimensionMismatch, "class weight outside [0, 1]");
    }
    sum += w.weight;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorCode::kDimensionMismatch, "class weights must sum to 1");
}

MockGenerator::MockGenerator(GeneratorSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const int d = spec_.latent_dim;
  const int w = spec_.image_size.width;
  const int h = spec_.image_size.height;
  cos_x_.resize(static_cast<std::size_t>(d) * 3 * w);
  sin_x_.resize(cos_x_.size());
  cos_y_.resize(static_cast<std::size_t>(d) * h);
  sin_y_.resize(cos_y_.size());
  for (int j = 0; j < d; ++j) {
    const double fx = j % 3;
    const double fy = (j / 3) % 3;
    for (int k = 0; k < 3; ++k) {
      const double theta = kTwoPi * frac((3.0 * j + k + 1) * kGoldenFraction);
      for (int x = 0; x < w; ++x) {
        const double a = kTwoPi * fx * x / w + theta;
        const std::size_t i = (static_cast<std::size_t>(j) * 3 + k) * w + x;
        cos_x_[i] = std::cos(a);
        sin_x_[i] = std::sin(a);
      }
    }
    for (int y = 0; y < h; ++y) {
      const double b = kTwoPi * fy * y / h;
      cos_y_[static_cast<std::size_t>(j) * h + y] = std::cos(b);
      sin_y_[static_cast<std::size_t>(j) * h + y] = std::sin(b);
    }
  }
}

double MockGenerator::class_phase(int category) { return kTwoPi * frac((category + 1.0) * kGoldenFraction); }

FrameImage MockGenerator::render_frame(std::span<const double> z_mix, const ClassWeights& class_weights) const {
  check_inputs(z_mix, class_weights);
  double phase = 0.0;
  for (const auto& cw : class_weights) phase += cw.weight * class_phase(cw.category);

  const int d = spec_.latent_dim;
  const int w = spec_.image_size.width;
  const int h = spec_.image_size.height;
  FrameImage image(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int k = 0; k < 3; ++k) {
        double arg = phase;
        for (int j = 0; j < d; ++j) {
          const std::size_t ix = (static_cast<std::size_t>(j) * 3 + k) * w + x;
          const std::size_t iy = static_cast<std::size_t>(j) * h + y;
          // cos(A + B) with A the x part (including theta) and B the y part.
          arg += z_mix[j] * (cos_x_[ix] * cos_y_[iy] - sin_x_[ix] * sin_y_[iy]);
        }
        const double value = 0.5 + 0.5 * std::sin(arg);
        image.at(x, y, k) = static_cast<std::uint8_t>(std::lround(255.0 * value));
      }
    }
  }
  return image;
}

ExternalGenerator::ExternalGenerator(fs::path executable, GeneratorSpec spec)
    : executable_(std::move(executable)), spec_(std::move(spec)) {
  spec_.validate();
}

std::vector<fs::path> ExternalGenerator::render_trajectory(const fs::path& trajectory,
                                                           const fs::path& out_dir) const {
  const std::size_t num_frames = read_trajectory(trajectory).frames.size();
  prepare_output_dir(out_dir);

  const ProcessResult result = run_process({executable_.string(), trajectory.string(), out_dir.string()});
  if (!result.succeeded()) {
    throw Error(ErrorCode::kBackendUnavailable, "renderer " + executable_.string() + " " + result.describe());
  }

  std::vector<fs::path> frames;
  frames.reserve(num_frames);
  for (std::size_t i = 0; i < num_frames; ++i) {
    fs::path p = out_dir / frame_file_name(i);
    if (!fs::is_regular_file(p)) {
      throw Error(ErrorCode::kBackendUnavailable, "renderer exited 0 but did not produce " + p.string());
    }
    frames.push_back(std::move(p));
  }
  std::size_t found = 0;
  for (const auto& entry : fs::directory_iterator(out_dir)) {
    if (entry.is_regular_file() && is_frame_file(entry.path())) ++found;
  }
  if (found != num_frames) {
    throw Error(ErrorCode::kBackendUnavailable, "renderer produced " + std::to_string(found) +
                                                    " frame files, expected " + std::to_string(num_frames));
  }
  return frames;
}

FrameImage ExternalGenerator::render_frame(std::span<const double> z_mix, const ClassWeights& class_weights) const {
  check_inputs(z_mix, class_weights);
  const std::vector<double> z(z_mix.begin(), z_mix.end());
  const int first = class_weights.front().category;
  const int last = class_weights.back().category;

  Trajectory t;
  t.spec = spec_;
  t.keyframes = {{0, z, first}, {2, z, last}};
  t.frames = {{z, {{first, 1.0}}}, {z, class_weights}, {z, {{last, 1.0}}}};

  TempDir scratch;
  const fs::path traj = scratch.path() / "frame.json";
  write_trajectory(t, traj);
  const auto frames = render_trajectory(traj, scratch.path() / "frames");
  return read_png(frames.at(1));
}

std::string frame_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06zu.png", index);
  return buf;
}

std::vector<fs::path> render_all(const Generator& generator, const FramePlan& plan, const fs::path& out_dir,
                                 std::size_t parallelism) {
  if (parallelism < 1) throw Error(ErrorCode::kInvalidArgument, "parallelism must be >= 1");
  prepare_output_dir(out_dir);

  const std::size_t count = plan.frames.size();
  std::vector<fs::path> paths(count);
  for (std::size_t i = 0; i < count; ++i) paths[i] = out_dir / frame_file_name(i);

  if (generator.concurrency() == BackendConcurrency::kSerialized) parallelism = 1;
  const std::size_t workers = std::min(parallelism, std::max<std::size_t>(count, 1));

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> written{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto work = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        const auto& frame = plan.frames[i];
        write_png(paths[i], generator.render_frame(frame.z, frame.class_weights));
        written.fetch_add(1);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
      }
    }
  };

  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
  }

  if (first_error) {
    try {
      std::rethrow_exception(first_error);
    } catch (const Error& e) {
      throw Error(e.code(), e.message() + " (wrote " + std::to_string(written.load()) + " of " +
                                std::to_string(count) + " frames to " + out_dir.string() + ")");
    }
  }
  return paths;
}

}  // namespace ganterp
