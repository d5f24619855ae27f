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
#include <filesystem>
#include <span>
#include <vector>

#include "detbench/raster.hpp"

namespace detbench {

struct PngInfo {
  int64_t width = 0;
  int64_t height = 0;
  int channels = 0;  // after expansion to 8-bit RGB/RGBA
};

// PNG/DEFLATE encoding. `level` is the zlib effort 0-9. Output is
// deterministic for a given image and level.
std::vector<uint8_t> EncodePng(const RasterImage& img, int level);

// Decodes to 8-bit RGB or RGBA. Palette and grayscale inputs are expanded
// to RGB(A); 16-bit samples are reduced to 8 bits.
RasterImage DecodePng(std::span<const uint8_t> bytes);

PngInfo ProbePngFile(const std::filesystem::path& path);
RasterImage ReadPngFile(const std::filesystem::path& path);
// Returns the number of bytes written.
uint64_t WritePngFile(const std::filesystem::path& path, const RasterImage& img, int level);

}  // namespace detbench
