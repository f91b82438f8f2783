#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace ganterp {

// Decoded mono audio. Samples are finite and lie in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 0;

  // Throws Error(kInvalidArgument / kEmptyAudio) when an invariant is broken.
  void validate() const;
};

// One-sided STFT magnitudes of shape F x T (F = window/2 + 1 frequency bins,
// T time slices). Each slice is stored contiguously.
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(std::size_t num_freqs, std::size_t num_slices, std::size_t hop_samples,
              std::size_t window_samples, int sample_rate);

  std::size_t num_freqs() const noexcept { return num_freqs_; }
  std::size_t num_slices() const noexcept { return num_slices_; }
  std::size_t hop_samples() const noexcept { return hop_samples_; }
  std::size_t window_samples() const noexcept { return window_samples_; }
  int sample_rate() const noexcept { return sample_rate_; }

  double at(std::size_t freq, std::size_t slice) const { return mags_[slice * num_freqs_ + freq]; }
  double& at(std::size_t freq, std::size_t slice) { return mags_[slice * num_freqs_ + freq]; }

  std::span<const double> slice(std::size_t t) const {
    return {mags_.data() + t * num_freqs_, num_freqs_};
  }
  std::span<double> slice(std::size_t t) { return {mags_.data() + t * num_freqs_, num_freqs_}; }

  std::span<const double> data() const noexcept { return mags_; }

  friend bool operator==(const Spectrogram&, const Spectrogram&) = default;

 private:
  std::size_t num_freqs_ = 0;
  std::size_t num_slices_ = 0;
  std::size_t hop_samples_ = 0;
  std::size_t window_samples_ = 0;
  int sample_rate_ = 0;
  std::vector<double> mags_;
};

// Reads a RIFF/WAVE file (PCM16 or IEEE float32, mono or stereo) into a mono
// buffer. Stereo frames are averaged; PCM16 is scaled by 1/32768.
AudioBuffer decode_audio(const std::filesystem::path& path);

// Same as decode_audio but over an in-memory file image.
AudioBuffer decode_wav_bytes(std::span<const unsigned char> bytes);

// Samples per slice so that one spectrogram slice corresponds to one video frame.
std::size_t hop_for_fps(int sample_rate, double fps);

// Hann-windowed magnitude STFT with hop = round(sample_rate / fps).
Spectrogram compute_spectrogram(const AudioBuffer& audio, double fps, std::size_t window_samples);

}  // namespace ganterp
