#include "rtw/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "rtw/error.hpp"

namespace rtw {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw Error(Errc::IoFailure, "cannot open " + path.string());
  }
  return f;
}

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  if (text) *text = msg;
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

// Decoded 8- or 16-bit rows; libpng transforms normalize the layout.
struct Decoded {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> bytes;
};

Decoded decode_png(const std::filesystem::path& path, bool want_gray16) {
  auto file = open_file(path, "rb");
  std::string err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err,
                                           png_error_fn, png_warning_fn);
  if (!png) throw Error(Errc::IoFailure, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  Decoded out;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(Errc::CorruptInput, path.string() + ": " + err);
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const auto color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (want_gray16) {
    if (color != PNG_COLOR_TYPE_GRAY) {
      png_error(png, "expected grayscale label image");
    }
    if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (depth == 16) png_set_swap(png);
  } else {
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) {
      png_set_expand_gray_1_2_4_to_8(png);
    }
    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
      png_set_gray_to_rgb(png);
    }
    png_set_strip_alpha(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  }
  png_read_update_info(png, info);
  out.width = png_get_image_width(png, info);
  out.height = png_get_image_height(png, info);
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out.bytes.resize(stride * out.height);
  rows.resize(out.height);
  for (std::uint32_t y = 0; y < out.height; ++y) {
    rows[y] = out.bytes.data() + y * stride;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

void encode_png(const std::filesystem::path& path, std::uint32_t width,
                std::uint32_t height, int color_type, int bit_depth,
                const std::vector<std::uint8_t>& bytes, std::size_t stride) {
  auto file = open_file(path, "wb");
  std::string err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err,
                                            png_error_fn, png_warning_fn);
  if (!png) throw Error(Errc::IoFailure, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows(height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(Errc::IoFailure, path.string() + ": " + err);
  }
  png_init_io(png, file.get());
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, width, height, bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);
  for (std::uint32_t y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(bytes.data() + y * stride);
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

Raster read_png_rgb(const std::filesystem::path& path) {
  const auto d = decode_png(path, false);
  if (d.channels != 3) {
    throw Error(Errc::CorruptInput,
                path.string() + ": unexpected channel layout");
  }
  Raster img(d.width, d.height, 3);
  auto dst = img.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = static_cast<float>(d.bytes[i]) / 255.0f;
  }
  return img;
}

void write_png_rgb(const Raster& image, const std::filesystem::path& path) {
  if (image.channels() != 3) {
    throw Error(Errc::WrongChannelCount, "PNG writer expects 3 channels");
  }
  std::vector<std::uint8_t> bytes(image.data().size());
  auto src = image.data();
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const float v = std::clamp(src[i], 0.0f, 1.0f);
    bytes[i] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
  }
  encode_png(path, image.width(), image.height(), PNG_COLOR_TYPE_RGB, 8, bytes,
             std::size_t{image.width()} * 3);
}

void write_png_gray16(const LabelImage& image,
                      const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(image.labels.size() * 2);
  std::memcpy(bytes.data(), image.labels.data(), bytes.size());
  encode_png(path, image.width, image.height, PNG_COLOR_TYPE_GRAY, 16, bytes,
             std::size_t{image.width} * 2);
}

LabelImage read_png_gray16(const std::filesystem::path& path) {
  const auto d = decode_png(path, true);
  LabelImage out{d.width, d.height, {}};
  out.labels.resize(std::size_t{d.width} * d.height);
  if (d.bit_depth == 16) {
    std::memcpy(out.labels.data(), d.bytes.data(), out.labels.size() * 2);
  } else {
    std::copy(d.bytes.begin(), d.bytes.begin() + out.labels.size(),
              out.labels.begin());
  }
  return out;
}

}  // namespace rtw
