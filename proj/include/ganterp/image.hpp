#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ganterp {

// Row-major RGB8 raster.
struct FrameImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  FrameImage() = default;
  FrameImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

  std::uint8_t& at(int x, int y, int channel) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + channel];
  }
  std::uint8_t at(int x, int y, int channel) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + channel];
  }

  bool valid() const noexcept {
    return width > 0 && height > 0 && pixels.size() == static_cast<std::size_t>(width) * height * 3;
  }

  friend bool operator==(const FrameImage&, const FrameImage&) = default;
};

// Throws Error(kIoError) on failure.
void write_png(const std::filesystem::path& path, const FrameImage& image);

// Reads 8-bit RGB or RGBA PNGs (alpha is dropped). Throws Error(kIoError).
FrameImage read_png(const std::filesystem::path& path);

}  // namespace ganterp
