#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "ganterp/audio.hpp"
#include "ganterp/error.hpp"

namespace ganterp {
namespace {

// FFTW's planner is not re-entrant; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
        out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::span<double> input() { return {in_.get(), n_}; }

  void magnitudes(std::span<double> out) {
    fftw_execute(plan_);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::hypot(out_.get()[k][0], out_.get()[k][1]);
  }

 private:
  std::size_t n_;
  std::unique_ptr<double, FftwFree> in_;
  std::unique_ptr<fftw_complex, FftwFree> out_;
  fftw_plan plan_;
};

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Spectrogram::Spectrogram(std::size_t num_freqs, std::size_t num_slices, std::size_t hop_samples,
                         std::size_t window_samples, int sample_rate)
    : num_freqs_(num_freqs),
      num_slices_(num_slices),
      hop_samples_(hop_samples),
      window_samples_(window_samples),
      sample_rate_(sample_rate),
      mags_(num_freqs * num_slices, 0.0) {}

std::size_t hop_for_fps(int sample_rate, double fps) {
  if (!(fps > 0.0) || !std::isfinite(fps)) throw Error(ErrorCode::kInvalidArgument, "fps must be positive");
  if (sample_rate <= 0) throw Error(ErrorCode::kInvalidArgument, "sample_rate must be positive");
  const double hop = std::round(sample_rate / fps);
  if (hop < 1.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "fps " + std::to_string(fps) + " exceeds what sample rate " + std::to_string(sample_rate) +
                    " can resolve");
  }
  return static_cast<std::size_t>(hop);
}

Spectrogram compute_spectrogram(const AudioBuffer& audio, double fps, std::size_t window_samples) {
  audio.validate();
  if (!is_power_of_two(window_samples)) {
    throw Error(ErrorCode::kInvalidArgument, "window_samples must be a positive power of two");
  }
  const std::size_t hop = hop_for_fps(audio.sample_rate, fps);
  const std::size_t n = audio.samples.size();
  if (n < window_samples) {
    throw Error(ErrorCode::kAudioTooShort, std::to_string(n) + " samples is shorter than the " +
                                               std::to_string(window_samples) + "-sample window");
  }
  const std::size_t slices = (n - window_samples) / hop + 1;
  if (slices < 2) {
    throw Error(ErrorCode::kAudioTooShort, "audio yields a single spectrogram slice; at least 2 are required");
  }

  // Periodic Hann.
  std::vector<double> window(window_samples);
  for (std::size_t i = 0; i < window_samples; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(window_samples));
  }

  Spectrogram spec(window_samples / 2 + 1, slices, hop, window_samples, audio.sample_rate);
  RealFft fft(window_samples);
  auto in = fft.input();
  for (std::size_t t = 0; t < slices; ++t) {
    const double* src = audio.samples.data() + t * hop;
    for (std::size_t i = 0; i < window_samples; ++i) in[i] = src[i] * window[i];
    fft.magnitudes(spec.slice(t));
  }
  return spec;
}

}  // namespace ganterp
