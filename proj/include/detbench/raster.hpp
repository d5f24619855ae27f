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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace detbench {

// 8-bit interleaved RGB or RGBA pixels, row-major, no padding.
class RasterImage {
 public:
  RasterImage() = default;
  // Zero-filled. Throws kInvalidArgument on bad dimensions or channels.
  RasterImage(int64_t width, int64_t height, int channels);
  RasterImage(int64_t width, int64_t height, int channels, std::vector<uint8_t> pixels);

  int64_t width() const { return width_; }
  int64_t height() const { return height_; }
  int channels() const { return channels_; }
  size_t row_bytes() const { return static_cast<size_t>(width_) * channels_; }

  std::span<const uint8_t> pixels() const { return pixels_; }
  std::span<uint8_t> mutable_pixels() { return pixels_; }
  std::span<const uint8_t> row(int64_t y) const {
    return std::span<const uint8_t>(pixels_).subspan(y * row_bytes(), row_bytes());
  }
  std::span<uint8_t> mutable_row(int64_t y) {
    return std::span<uint8_t>(pixels_).subspan(y * row_bytes(), row_bytes());
  }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int64_t width_ = 0;
  int64_t height_ = 0;
  int channels_ = 3;
  std::vector<uint8_t> pixels_;
};

}  // namespace detbench
