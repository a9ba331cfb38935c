// Copyright 2026 The EgoDemo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "egodemo/png_io.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>

#include <png.h>

#include "egodemo/error.hpp"

namespace egodemo {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_png(const std::filesystem::path& path, int width, int height, int color_type, int bit_depth,
               const std::uint8_t* rows, std::size_t row_bytes) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed writing " + path.string());
  }
  png_init_io(png, file.get());
  // Fixed settings keep the byte stream, and so the checksums, reproducible.
  png_set_compression_level(png, 6);
  png_set_filter(png, 0, PNG_FILTER_NONE);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);  // rows are host little-endian
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(rows + static_cast<std::size_t>(y) * row_bytes));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// Reads into `out` (row-major, host byte order); returns width/height.
void read_png(const std::filesystem::path& path, int want_color, int want_depth, int& width, int& height,
              std::vector<std::uint8_t>& out) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw DataError("missing image file " + path.string());
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw DataError("not a PNG file: " + path.string());
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("corrupt PNG file " + path.string());
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color != want_color || depth != want_depth) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError(path.string() + ": unexpected PNG colour type " + std::to_string(color) + " / bit depth " +
                    std::to_string(depth));
  }
  if (depth == 16) png_set_swap(png);
  png_read_update_info(png, info);
  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  out.resize(row_bytes * height);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) rows[y] = out.data() + row_bytes * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
}

}  // namespace

void write_png_rgb(const std::filesystem::path& path, const RgbImage& image) {
  if (image.channels() != 3) throw InvalidArgument("rgb PNG needs 3 channels");
  write_png(path, image.width(), image.height(), PNG_COLOR_TYPE_RGB, 8, image.data().data(),
            static_cast<std::size_t>(image.width()) * 3);
}

void write_png_gray8(const std::filesystem::path& path, const Image<std::uint8_t>& image) {
  if (image.channels() != 1) throw InvalidArgument("grey PNG needs 1 channel");
  write_png(path, image.width(), image.height(), PNG_COLOR_TYPE_GRAY, 8, image.data().data(),
            static_cast<std::size_t>(image.width()));
}

void write_png_gray16(const std::filesystem::path& path, const DepthImage& image) {
  if (image.channels() != 1) throw InvalidArgument("depth PNG needs 1 channel");
  write_png(path, image.width(), image.height(), PNG_COLOR_TYPE_GRAY, 16,
            reinterpret_cast<const std::uint8_t*>(image.data().data()), static_cast<std::size_t>(image.width()) * 2);
}

RgbImage read_png_rgb(const std::filesystem::path& path) {
  int w = 0, h = 0;
  std::vector<std::uint8_t> bytes;
  read_png(path, PNG_COLOR_TYPE_RGB, 8, w, h, bytes);
  RgbImage img(w, h, 3);
  img.data() = std::move(bytes);
  return img;
}

Image<std::uint8_t> read_png_gray8(const std::filesystem::path& path) {
  int w = 0, h = 0;
  std::vector<std::uint8_t> bytes;
  read_png(path, PNG_COLOR_TYPE_GRAY, 8, w, h, bytes);
  Image<std::uint8_t> img(w, h, 1);
  img.data() = std::move(bytes);
  return img;
}

DepthImage read_png_gray16(const std::filesystem::path& path) {
  int w = 0, h = 0;
  std::vector<std::uint8_t> bytes;
  read_png(path, PNG_COLOR_TYPE_GRAY, 16, w, h, bytes);
  DepthImage img(w, h, 1);
  std::memcpy(img.data().data(), bytes.data(), bytes.size());
  return img;
}

void write_png_mask(const std::filesystem::path& path, const MaskImage& mask) {
  Image<std::uint8_t> g = mask;
  for (auto& v : g.data()) v = v ? 255 : 0;
  write_png_gray8(path, g);
}

MaskImage read_png_mask(const std::filesystem::path& path) {
  MaskImage m = read_png_gray8(path);
  for (auto& v : m.data()) v = v ? 1 : 0;
  return m;
}

}  // namespace egodemo
