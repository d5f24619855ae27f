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
#include <vector>

#include "detbench/raster.hpp"
#include "detbench/simd/kernels.hpp"
#include "detbench/types.hpp"

namespace detbench {

struct ScaleSpec {
  double percent = 100;  // linear, per axis, in (0, 100]
  ScaleAlgorithm algorithm = ScaleAlgorithm::kBilinear;
};

struct TileSpec {
  int64_t tile_side = 1;
  double overlap_fraction = 0.10;
};

struct Tile {
  RasterImage image;
  int64_t offset_x = 0;
  int64_t offset_y = 0;
};

// round_half_away_from_zero(dim * percent / 100), at least 1.
int64_t ScaledDimension(int64_t dim, double percent);

RasterImage ScaleImage(const RasterImage& img, const ScaleSpec& spec,
                       const simd::KernelTable& kernels = simd::Active());

// RGBA -> RGB; RGB input is returned unchanged.
RasterImage DropAlpha(const RasterImage& img, const simd::KernelTable& kernels = simd::Active());

// Lossless PNG re-encode at zlib effort 0-9. Input must be RGB.
std::vector<uint8_t> RecompressLossless(const RasterImage& img, int effort);

// Tile origins along one axis of length `extent`: multiples of the stride,
// with the last tile shifted back to end on the edge.
std::vector<int64_t> TileOffsets(int64_t extent, int64_t tile_side, double overlap_fraction);
int64_t TileStride(int64_t tile_side, double overlap_fraction);

// Square tiles, row-major. An image smaller than tile_side on either axis
// yields a single whole-image tile.
std::vector<Tile> SplitIntoSquares(const RasterImage& img, const TileSpec& spec);

std::vector<GroundTruthBox> TransformAnnotationsScale(const std::vector<GroundTruthBox>& boxes,
                                                      double percent);

// Intersects each box with the tile rectangle and shifts it into tile
// coordinates. Boxes keeping less than keep_fraction of their area, or not
// touching the tile, are dropped.
std::vector<GroundTruthBox> ClipAnnotationsToTile(const std::vector<GroundTruthBox>& boxes,
                                                  int64_t origin_x, int64_t origin_y,
                                                  int64_t tile_width, int64_t tile_height,
                                                  double keep_fraction = 0.5);

}  // namespace detbench
