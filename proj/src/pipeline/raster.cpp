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

#include "detbench/raster.hpp"

#include <string>

#include "detbench/error.hpp"

namespace detbench {

namespace {
void CheckShape(int64_t width, int64_t height, int channels) {
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::kInvalidArgument, "image dimensions must be >= 1, got " +
                                                 std::to_string(width) + "x" +
                                                 std::to_string(height));
  }
  if (channels != 3 && channels != 4) {
    throw Error(ErrorKind::kInvalidArgument,
                "channels must be 3 or 4, got " + std::to_string(channels));
  }
}
}  // namespace

RasterImage::RasterImage(int64_t width, int64_t height, int channels)
    : width_(width), height_(height), channels_(channels) {
  CheckShape(width, height, channels);
  pixels_.assign(static_cast<size_t>(width) * height * channels, 0);
}

RasterImage::RasterImage(int64_t width, int64_t height, int channels, std::vector<uint8_t> pixels)
    : width_(width), height_(height), channels_(channels), pixels_(std::move(pixels)) {
  CheckShape(width, height, channels);
  if (pixels_.size() != static_cast<size_t>(width) * height * channels) {
    throw Error(ErrorKind::kInvalidArgument, "pixel buffer length does not match dimensions");
  }
}

}  // namespace detbench
