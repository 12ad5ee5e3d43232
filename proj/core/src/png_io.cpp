#include "polyforge/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <vector>

namespace polyforge {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngImage {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> rows;  // packed row-major samples (big-endian for 16-bit)
};

PngImage read_gray_png(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw std::runtime_error("cannot open PNG: " + path);
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("failed to decode PNG: " + path);
  }
  png_init_io(png, file.get());
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color & PNG_COLOR_MASK_COLOR) png_set_rgb_to_gray(png, 1, -1.0, -1.0);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);

  PngImage img;
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.bit_depth = png_get_bit_depth(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  img.rows.resize(row_bytes * img.height);
  std::vector<png_bytep> row_ptrs(img.height);
  for (int y = 0; y < img.height; ++y) row_ptrs[y] = img.rows.data() + row_bytes * y;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_gray_png(const std::string& path, int width, int height, int bit_depth,
                    const std::vector<std::uint8_t>& rows) {
  // Atomic write: temp file in the same directory, then rename.
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    FilePtr file(std::fopen(tmp.c_str(), "wb"));
    if (!file) throw std::runtime_error("cannot create file: " + tmp.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
      png_destroy_write_struct(&png, nullptr);
      throw std::runtime_error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
      png_destroy_write_struct(&png, &info);
      throw std::runtime_error("failed to encode PNG: " + path);
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, width, height, bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t row_bytes = static_cast<std::size_t>(width) * (bit_depth / 8);
    std::vector<png_bytep> row_ptrs(height);
    for (int y = 0; y < height; ++y) {
      row_ptrs[y] = const_cast<png_bytep>(rows.data() + row_bytes * y);
    }
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace

BinaryMask read_mask_png(const std::string& path) {
  const PngImage img = read_gray_png(path);
  if (img.bit_depth != 8) {
    throw std::runtime_error("expected an 8-bit mask PNG: " + path);
  }
  BinaryMask mask(img.width, img.height, 0);
  for (std::size_t i = 0; i < mask.data.size(); ++i) {
    mask.data[i] = img.rows[i] != 0 ? 1 : 0;
  }
  return mask;
}

void write_mask_png(const BinaryMask& mask, const std::string& path) {
  std::vector<std::uint8_t> rows(mask.data.size());
  for (std::size_t i = 0; i < mask.data.size(); ++i) rows[i] = mask.data[i] ? 255 : 0;
  write_gray_png(path, mask.width, mask.height, 8, rows);
}

Heatmap read_heatmap_png(const std::string& path) {
  const PngImage img = read_gray_png(path);
  if (img.bit_depth != 16) {
    throw std::runtime_error("expected a 16-bit heatmap PNG: " + path);
  }
  Heatmap map(img.width, img.height, 0.0f);
  for (std::size_t i = 0; i < map.data.size(); ++i) {
    const unsigned v = (static_cast<unsigned>(img.rows[2 * i]) << 8) | img.rows[2 * i + 1];
    map.data[i] = static_cast<float>(v / 65535.0);
  }
  return map;
}

void write_heatmap_png(const Heatmap& heatmap, const std::string& path) {
  std::vector<std::uint8_t> rows(heatmap.data.size() * 2);
  for (std::size_t i = 0; i < heatmap.data.size(); ++i) {
    const double clamped = std::min(1.0, std::max(0.0, static_cast<double>(heatmap.data[i])));
    const unsigned v = static_cast<unsigned>(std::lround(65535.0 * clamped));
    rows[2 * i] = static_cast<std::uint8_t>(v >> 8);
    rows[2 * i + 1] = static_cast<std::uint8_t>(v & 0xff);
  }
  write_gray_png(path, heatmap.width, heatmap.height, 16, rows);
}

int png_bit_depth(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw std::runtime_error("cannot open PNG: " + path);
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("failed to read PNG header: " + path);
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const int depth = png_get_bit_depth(png, info);
  png_destroy_read_struct(&png, &info, nullptr);
  return depth;
}

}  // namespace polyforge
