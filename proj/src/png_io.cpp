#include <png.h>

#include <cstdio>
#include <memory>
#include <string>

#include "ganterp/error.hpp"
#include "ganterp/image.hpp"

namespace ganterp {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return f;
}

// libpng reports errors by longjmp; the message is stashed for rethrow as Error.
[[noreturn]] void png_error_handler(png_structp png, png_const_charp message) {
  auto* sink = static_cast<std::string*>(png_get_error_ptr(png));
  if (sink) *sink = message;
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

}  // namespace

void write_png(const std::filesystem::path& path, const FrameImage& image) {
  if (!image.valid()) throw Error(ErrorCode::kIoError, "refusing to write an invalid image");
  FilePtr file = open_file(path, "wb");

  std::string failure;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &failure, png_error_handler,
                                            png_warning_handler);
  if (!png) throw Error(ErrorCode::kIoError, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_write_struct(png, info); }
  } guard{&png, &info};
  if (!info) throw Error(ErrorCode::kIoError, "png_create_info_struct failed");
  const std::size_t stride = static_cast<std::size_t>(image.width) * 3;
  if (setjmp(png_jmpbuf(png))) throw Error(ErrorCode::kIoError, "libpng: " + failure);

  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < image.height; ++y) {
    png_write_row(png, image.pixels.data() + stride * static_cast<std::size_t>(y));
  }
  png_write_end(png, nullptr);
  if (std::fflush(file.get()) != 0) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

FrameImage read_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");

  std::string failure;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &failure, png_error_handler,
                                           png_warning_handler);
  if (!png) throw Error(ErrorCode::kIoError, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_read_struct(png, info, nullptr); }
  } guard{&png, &info};
  if (!info) throw Error(ErrorCode::kIoError, "png_create_info_struct failed");
  FrameImage image;
  if (setjmp(png_jmpbuf(png))) throw Error(ErrorCode::kIoError, "libpng: " + failure);

  png_init_io(png, file.get());
  png_read_info(png, info);
  const auto color = png_get_color_type(png, info);
  if (png_get_bit_depth(png, info) != 8 || (color != PNG_COLOR_TYPE_RGB && color != PNG_COLOR_TYPE_RGBA)) {
    png_error(png, "not an 8-bit RGB(A) PNG");
  }
  if (color == PNG_COLOR_TYPE_RGBA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  image = FrameImage(static_cast<int>(png_get_image_width(png, info)),
                     static_cast<int>(png_get_image_height(png, info)));
  const std::size_t stride = static_cast<std::size_t>(image.width) * 3;
  for (int y = 0; y < image.height; ++y) {
    png_read_row(png, image.pixels.data() + stride * static_cast<std::size_t>(y), nullptr);
  }
  png_read_end(png, nullptr);
  return image;
}

}  // namespace ganterp
