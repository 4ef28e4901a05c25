#include "holo/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>

#include "holo/field.hpp"

namespace holo {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_fail(png_structp png, png_const_charp message) {
  auto* error = static_cast<std::string*>(png_get_error_ptr(png));
  *error = message;
  png_longjmp(png, 1);
}

void png_warn(png_structp, png_const_charp) {}

}  // namespace

PngImage read_png(const std::string& path) {
  File file(std::fopen(path.c_str(), "rb"));
  if (!file) throw Error("cannot open '" + path + "' for reading");
  unsigned char signature[8];
  if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
    throw Error("'" + path + "' is not a PNG file");
  }

  std::string error;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_fail, png_warn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error("libpng initialization failed");
  }

  PngImage out;
  std::vector<png_bytep> rows;
  std::vector<unsigned char> buffer;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error("cannot decode '" + path + "': " + error);
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) {
    png_set_palette_to_rgb(png);
    depth = 8;
  } else if (depth != 8 && depth != 16) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error("'" + path + "' has unsupported bit depth " + std::to_string(depth) +
                " (8 or 16 required)");
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (depth == 16) png_set_swap(png);  // host little-endian samples
  png_read_update_info(png, info);

  out.width = png_get_image_width(png, info);
  out.height = png_get_image_height(png, info);
  out.channels = png_get_channels(png, info);
  out.bit_depth = depth;
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  buffer.resize(row_bytes * out.height);
  rows.resize(out.height);
  for (std::size_t y = 0; y < out.height; ++y) rows[y] = buffer.data() + y * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const std::size_t count = out.width * out.height * static_cast<std::size_t>(out.channels);
  out.samples.resize(count);
  if (depth == 8) {
    for (std::size_t i = 0; i < count; ++i) out.samples[i] = buffer[i];
  } else {
    const auto* wide = reinterpret_cast<const std::uint16_t*>(buffer.data());
    for (std::size_t i = 0; i < count; ++i) out.samples[i] = wide[i];
  }
  return out;
}

void write_png(const std::string& path, const PngImage& image) {
  if (image.channels != 1 && image.channels != 3) throw Error("PNG output must be gray or RGB");
  if (image.bit_depth != 8 && image.bit_depth != 16) throw Error("PNG output must be 8 or 16 bit");
  if (image.samples.size() != image.width * image.height * static_cast<std::size_t>(image.channels)) {
    throw Error("PNG sample count does not match its dimensions");
  }
  File file(std::fopen(path.c_str(), "wb"));
  if (!file) throw Error("cannot open '" + path + "' for writing");

  std::string error;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_fail, png_warn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("libpng initialization failed");
  }

  const std::size_t row_samples = image.width * static_cast<std::size_t>(image.channels);
  const std::size_t bytes = static_cast<std::size_t>(image.bit_depth / 8);
  std::vector<unsigned char> buffer(row_samples * bytes * image.height);
  for (std::size_t i = 0; i < image.samples.size(); ++i) {
    if (bytes == 1) {
      buffer[i] = static_cast<unsigned char>(image.samples[i]);
    } else {
      buffer[2 * i] = static_cast<unsigned char>(image.samples[i] >> 8);  // PNG is big-endian
      buffer[2 * i + 1] = static_cast<unsigned char>(image.samples[i] & 0xFF);
    }
  }
  std::vector<png_bytep> rows(image.height);
  for (std::size_t y = 0; y < image.height; ++y) rows[y] = buffer.data() + y * row_samples * bytes;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("cannot encode '" + path + "': " + error);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), image.bit_depth,
               image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) throw Error("cannot write '" + path + "'");
}

}  // namespace holo
