// Copyright 2026 The detbench Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "detbench/png_codec.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <string>

#include "detbench/error.hpp"

namespace detbench {

namespace {

// libpng reports errors by longjmp. The functions that call setjmp below
// keep only trivially destructible locals; everything with a destructor is
// owned by the caller.

struct ErrorSink {
  char message[256];
};

void OnError(png_structp png, png_const_charp msg) {
  auto* sink = static_cast<ErrorSink*>(png_get_error_ptr(png));
  if (sink != nullptr) {
    std::snprintf(sink->message, sizeof(sink->message), "%s", msg);
  }
  png_longjmp(png, 1);
}

void OnWarning(png_structp, png_const_charp) {}

void OnWrite(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void OnFlush(png_structp) {}

struct MemoryReader {
  const uint8_t* data;
  size_t size;
  size_t pos;
};

void OnRead(png_structp png, png_bytep out, png_size_t length) {
  auto* reader = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (reader->size - reader->pos < length) png_error(png, "truncated PNG stream");
  std::memcpy(out, reader->data + reader->pos, length);
  reader->pos += length;
}

bool EncodeImpl(const RasterImage& img, int level, std::vector<uint8_t>* out,
                ErrorSink* sink) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, sink, OnError, OnWarning);
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
  png_set_write_fn(png, out, OnWrite, OnFlush);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()),
               static_cast<png_uint_32>(img.height()), 8,
               img.channels() == 4 ? PNG_COLOR_TYPE_RGBA : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, level);
  png_write_info(png, info);
  for (int64_t y = 0; y < img.height(); ++y) {
    png_write_row(png, const_cast<png_bytep>(img.row(y).data()));
  }
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
  return true;
}

// Applies the 8-bit RGB(A) expansion transforms after png_read_info.
void ConfigureRead(png_structp png, png_infop info) {
  const png_byte color = png_get_color_type(png, info);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_expand_gray_1_2_4_to_8(png);
    png_set_gray_to_rgb(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
}

bool DecodeImpl(MemoryReader* reader, std::vector<uint8_t>* pixels,
                std::vector<png_bytep>* rows, PngInfo* shape, ErrorSink* sink) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, sink, OnError, OnWarning);
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
  png_set_read_fn(png, reader, OnRead);
  png_read_info(png, info);
  ConfigureRead(png, info);
  shape->width = png_get_image_width(png, info);
  shape->height = png_get_image_height(png, info);
  shape->channels = png_get_channels(png, info);
  if (shape->channels != 3 && shape->channels != 4) png_error(png, "unsupported channel count");
  const size_t stride = static_cast<size_t>(shape->width) * shape->channels;
  pixels->resize(stride * shape->height);
  rows->resize(shape->height);
  for (int64_t y = 0; y < shape->height; ++y) (*rows)[y] = pixels->data() + y * stride;
  png_read_image(png, rows->data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool ProbeImpl(std::FILE* file, PngInfo* shape, ErrorSink* sink) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, sink, OnError, OnWarning);
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
  ConfigureRead(png, info);
  shape->width = png_get_image_width(png, info);
  shape->height = png_get_image_height(png, info);
  shape->channels = png_get_channels(png, info);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

}  // namespace

std::vector<uint8_t> EncodePng(const RasterImage& img, int level) {
  if (level < 0 || level > 9) {
    throw Error(ErrorKind::kInvalidArgument, "PNG effort must be 0-9, got " + std::to_string(level));
  }
  std::vector<uint8_t> out;
  ErrorSink sink{};
  if (!EncodeImpl(img, level, &out, &sink)) {
    throw Error(ErrorKind::kIo, std::string("PNG encode failed: ") + sink.message);
  }
  return out;
}

RasterImage DecodePng(std::span<const uint8_t> bytes) {
  MemoryReader reader{bytes.data(), bytes.size(), 0};
  std::vector<uint8_t> pixels;
  std::vector<png_bytep> rows;
  PngInfo shape;
  ErrorSink sink{};
  if (!DecodeImpl(&reader, &pixels, &rows, &shape, &sink)) {
    throw Error(ErrorKind::kIo, std::string("PNG decode failed: ") + sink.message);
  }
  return RasterImage(shape.width, shape.height, shape.channels, std::move(pixels));
}

PngInfo ProbePngFile(const std::filesystem::path& path) {
  std::FILE* file = std::fopen(path.c_str(), "rb");
  if (file == nullptr) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  PngInfo shape;
  ErrorSink sink{};
  const bool ok = ProbeImpl(file, &shape, &sink);
  std::fclose(file);
  if (!ok) {
    throw Error(ErrorKind::kIo, "cannot read PNG header of " + path.string() + ": " + sink.message);
  }
  return shape;
}

RasterImage ReadPngFile(const std::filesystem::path& path) {
  std::FILE* file = std::fopen(path.c_str(), "rb");
  if (file == nullptr) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<uint8_t> bytes;
  uint8_t buf[1 << 16];
  size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof(buf), file)) > 0) bytes.insert(bytes.end(), buf, buf + n);
  std::fclose(file);
  return DecodePng(bytes);
}

uint64_t WritePngFile(const std::filesystem::path& path, const RasterImage& img, int level) {
  const std::vector<uint8_t> bytes = EncodePng(img, level);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::FILE* file = std::fopen(path.c_str(), "wb");
  if (file == nullptr) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  const size_t written = std::fwrite(bytes.data(), 1, bytes.size(), file);
  const bool closed = std::fclose(file) == 0;
  if (written != bytes.size() || !closed) {
    throw Error(ErrorKind::kIo, "short write to " + path.string());
  }
  return bytes.size();
}

}  // namespace detbench
