#include "demoedit/image.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>

#include <png.h>

#include "demoedit/error.hpp"

namespace demoedit {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  return f;
}

enum class Target { Rgb8, Gray16, Gray8 };

struct Decoded {
  int width = 0;
  int height = 0;
  std::vector<png_byte> bytes;  // row-major, already in host byte order
};

Decoded decode(const std::filesystem::path& path, Target target) {
  FilePtr file = open_file(path, "rb");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw Error(ErrorCode::IoError, "not a PNG file: " + path.string());
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::IoError, "libpng initialization failed");
  }
  Decoded out;
  std::string schema_problem;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::IoError, "corrupt PNG: " + path.string());
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  switch (target) {
    case Target::Rgb8:
      if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
      if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
        if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
        png_set_gray_to_rgb(png);
      }
      if (depth == 16) png_set_strip_16(png);
      if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
      if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
      break;
    case Target::Gray16:
      if (color != PNG_COLOR_TYPE_GRAY || depth != 16) {
        schema_problem = "expected 16-bit single-channel depth PNG";
      }
      png_set_swap(png);
      break;
    case Target::Gray8:
      if (color != PNG_COLOR_TYPE_GRAY || depth > 8) {
        schema_problem = "expected 8-bit single-channel mask PNG";
      } else if (depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
      }
      break;
  }
  if (!schema_problem.empty()) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::SchemaError, schema_problem + ": " + path.string());
  }
  png_read_update_info(png, info);
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  out.bytes.resize(rowbytes * static_cast<std::size_t>(out.height));
  rows.resize(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) rows[static_cast<std::size_t>(y)] = out.bytes.data() + rowbytes * static_cast<std::size_t>(y);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

void encode(const std::filesystem::path& path, int width, int height, int color_type, int bit_depth,
            const png_byte* data, std::size_t rowbytes) {
  FilePtr file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::IoError, "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::IoError, "failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(data + rowbytes * static_cast<std::size_t>(y)));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

RgbImage read_rgb_png(const std::filesystem::path& path) {
  Decoded d = decode(path, Target::Rgb8);
  RgbImage img(d.width, d.height);
  std::copy(d.bytes.begin(), d.bytes.end(), img.data().begin());
  return img;
}

DepthImage read_depth_png(const std::filesystem::path& path) {
  Decoded d = decode(path, Target::Gray16);
  DepthImage img(d.width, d.height);
  std::memcpy(img.data().data(), d.bytes.data(), d.bytes.size());
  return img;
}

Mask read_mask_png(const std::filesystem::path& path) {
  Decoded d = decode(path, Target::Gray8);
  Mask img(d.width, d.height);
  std::copy(d.bytes.begin(), d.bytes.end(), img.data().begin());
  return img;
}

void write_png(const std::filesystem::path& path, const RgbImage& image) {
  encode(path, image.width(), image.height(), PNG_COLOR_TYPE_RGB, 8, image.data().data(),
         static_cast<std::size_t>(image.width()) * 3);
}

void write_png(const std::filesystem::path& path, const DepthImage& image) {
  encode(path, image.width(), image.height(), PNG_COLOR_TYPE_GRAY, 16,
         reinterpret_cast<const png_byte*>(image.data().data()), static_cast<std::size_t>(image.width()) * 2);
}

void write_png(const std::filesystem::path& path, const Mask& image) {
  encode(path, image.width(), image.height(), PNG_COLOR_TYPE_GRAY, 8, image.data().data(),
         static_cast<std::size_t>(image.width()));
}

}  // namespace demoedit
