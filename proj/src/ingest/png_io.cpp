// Copyright 2026 The RAL Authors. All Rights Reserved.
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

#include "ral/ingest/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>

#include "ral/data/errors.hpp"
#include "ral/data/image.hpp"

namespace ral::ingest {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_buffer(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

void flush_noop(png_structp) {}

// Row pointers must be prepared before setjmp so no C++ objects are
// constructed between setjmp and a potential longjmp.
bool write_png_impl(std::FILE* file, std::vector<std::uint8_t>* buffer, const Array2D<std::uint8_t>& pixels,
                    bool paletted, std::vector<png_bytep>& rows) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  if (file != nullptr) {
    png_init_io(png, file);
  } else {
    png_set_write_fn(png, buffer, write_buffer, flush_noop);
  }
  png_set_IHDR(png, info, static_cast<png_uint_32>(pixels.cols()), static_cast<png_uint_32>(pixels.rows()), 8,
               paletted ? PNG_COLOR_TYPE_PALETTE : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_color palette[2] = {{0, 0, 0}, {255, 0, 0}};
  if (paletted) png_set_PLTE(png, info, palette, 2);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

std::vector<png_bytep> row_pointers(const Array2D<std::uint8_t>& pixels) {
  std::vector<png_bytep> rows(static_cast<std::size_t>(pixels.rows()));
  for (int r = 0; r < pixels.rows(); ++r) {
    rows[r] = const_cast<png_bytep>(&pixels(r, 0));
  }
  return rows;
}

void write_file(const std::filesystem::path& path, const Array2D<std::uint8_t>& pixels, bool paletted) {
  if (pixels.empty()) throw InvalidArgument("write_png: empty image");
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw LoadError("cannot open " + path.string() + " for writing");
  auto rows = row_pointers(pixels);
  if (!write_png_impl(file.get(), nullptr, pixels, paletted, rows)) {
    throw LoadError("failed to encode PNG " + path.string());
  }
}

struct ReadHeader {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
};

bool read_png_impl(std::FILE* file, ReadHeader& header, std::vector<std::uint8_t>& data,
                   std::vector<png_bytep>& rows, std::string& error) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, file);
  png_read_info(png, info);
  header.width = png_get_image_width(png, info);
  header.height = png_get_image_height(png, info);
  header.bit_depth = png_get_bit_depth(png, info);
  header.color_type = png_get_color_type(png, info);
  const bool gray = header.color_type == PNG_COLOR_TYPE_GRAY;
  const bool palette = header.color_type == PNG_COLOR_TYPE_PALETTE;
  if ((!gray && !palette) || header.bit_depth > 8) {
    error = "unsupported PNG format (need 8-bit grayscale or paletted)";
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  if (gray && header.bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (palette && header.bit_depth < 8) png_set_packing(png);
  png_read_update_info(png, info);
  data.resize(static_cast<std::size_t>(header.width) * header.height);
  rows.resize(header.height);
  for (png_uint_32 r = 0; r < header.height; ++r) rows[r] = data.data() + static_cast<std::size_t>(r) * header.width;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

}  // namespace

void write_png_gray(const std::filesystem::path& path, const Array2D<std::uint8_t>& pixels) {
  write_file(path, pixels, false);
}

void write_png_mask(const std::filesystem::path& path, const Array2D<std::uint8_t>& mask) {
  validate_binary(mask);
  write_file(path, mask, true);
}

std::vector<std::uint8_t> encode_png_gray(const Array2D<std::uint8_t>& pixels) {
  if (pixels.empty()) throw InvalidArgument("encode_png: empty image");
  std::vector<std::uint8_t> out;
  auto rows = row_pointers(pixels);
  if (!write_png_impl(nullptr, &out, pixels, false, rows)) throw LoadError("failed to encode PNG");
  return out;
}

Array2D<std::uint8_t> read_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw LoadError("missing file: " + path.string());
  unsigned char sig[8] = {};
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw LoadError("not a PNG file: " + path.string());
  }
  std::rewind(file.get());
  ReadHeader header;
  std::vector<std::uint8_t> data;
  std::vector<png_bytep> rows;
  std::string error;
  if (!read_png_impl(file.get(), header, data, rows, error)) {
    throw LoadError((error.empty() ? std::string("corrupt PNG") : error) + ": " + path.string());
  }
  return Array2D<std::uint8_t>(static_cast<int>(header.height), static_cast<int>(header.width), std::move(data));
}

}  // namespace ral::ingest
