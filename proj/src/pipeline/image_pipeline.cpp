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

#include "detbench/image_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "detbench/error.hpp"
#include "detbench/png_codec.hpp"

namespace detbench {

namespace {

void CheckPercent(double percent) {
  if (!(percent > 0.0) || !(percent <= 100.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "scale percent must be in (0, 100], got " + std::to_string(percent));
  }
}

struct Tap {
  int64_t lo;
  int64_t hi;
  int32_t weight;  // of `hi`, in 1/kWeightOne units
};

// Center-aligned mapping src = (dst + 0.5) * src_dim / dst_dim - 0.5,
// clamped to the source range.
std::vector<Tap> BilinearTaps(int64_t src_dim, int64_t dst_dim) {
  std::vector<Tap> taps(dst_dim);
  const double ratio = static_cast<double>(src_dim) / static_cast<double>(dst_dim);
  for (int64_t d = 0; d < dst_dim; ++d) {
    double s = (static_cast<double>(d) + 0.5) * ratio - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src_dim - 1));
    const int64_t lo = static_cast<int64_t>(std::floor(s));
    const int64_t hi = std::min(lo + 1, src_dim - 1);
    const auto w = static_cast<int32_t>(std::lround((s - static_cast<double>(lo)) * simd::kWeightOne));
    taps[d] = Tap{lo, hi, std::clamp(w, 0, simd::kWeightOne)};
  }
  return taps;
}

// Nearest source index: floor((dst + 0.5) * src_dim / dst_dim), exact in
// integers.
std::vector<int64_t> NearestTaps(int64_t src_dim, int64_t dst_dim) {
  std::vector<int64_t> taps(dst_dim);
  for (int64_t d = 0; d < dst_dim; ++d) {
    taps[d] = std::min(src_dim - 1, ((2 * d + 1) * src_dim) / (2 * dst_dim));
  }
  return taps;
}

void HorizontalPass(std::span<const uint8_t> src_row, const std::vector<Tap>& taps, int channels,
                    std::vector<int32_t>* out) {
  out->resize(taps.size() * channels);
  int32_t* dst = out->data();
  for (const Tap& t : taps) {
    const uint8_t* a = src_row.data() + t.lo * channels;
    const uint8_t* b = src_row.data() + t.hi * channels;
    const int32_t inv = simd::kWeightOne - t.weight;
    for (int c = 0; c < channels; ++c) *dst++ = a[c] * inv + b[c] * t.weight;
  }
}

RasterImage ScaleBilinear(const RasterImage& img, int64_t dst_w, int64_t dst_h,
                          const simd::KernelTable& kernels) {
  RasterImage out(dst_w, dst_h, img.channels());
  const std::vector<Tap> xs = BilinearTaps(img.width(), dst_w);
  const std::vector<Tap> ys = BilinearTaps(img.height(), dst_h);
  std::vector<int32_t> top;
  std::vector<int32_t> bottom;
  int64_t top_row = -1;
  int64_t bottom_row = -1;
  for (int64_t y = 0; y < dst_h; ++y) {
    const Tap& ty = ys[y];
    if (ty.lo != top_row) {
      if (ty.lo == bottom_row) {
        std::swap(top, bottom);
        std::swap(top_row, bottom_row);
      } else {
        HorizontalPass(img.row(ty.lo), xs, img.channels(), &top);
        top_row = ty.lo;
      }
    }
    if (ty.hi != bottom_row) {
      HorizontalPass(img.row(ty.hi), xs, img.channels(), &bottom);
      bottom_row = ty.hi;
    }
    simd::BlendRows(top, bottom, ty.weight, out.mutable_row(y), kernels);
  }
  return out;
}

RasterImage ScaleNearest(const RasterImage& img, int64_t dst_w, int64_t dst_h) {
  RasterImage out(dst_w, dst_h, img.channels());
  const std::vector<int64_t> xs = NearestTaps(img.width(), dst_w);
  const std::vector<int64_t> ys = NearestTaps(img.height(), dst_h);
  const int ch = img.channels();
  for (int64_t y = 0; y < dst_h; ++y) {
    std::span<const uint8_t> src = img.row(ys[y]);
    uint8_t* dst = out.mutable_row(y).data();
    for (int64_t x = 0; x < dst_w; ++x) {
      std::copy_n(src.data() + xs[x] * ch, ch, dst + x * ch);
    }
  }
  return out;
}

}  // namespace

int64_t ScaledDimension(int64_t dim, double percent) {
  CheckPercent(percent);
  const double scaled = static_cast<double>(dim) * percent / 100.0;
  return std::max<int64_t>(1, static_cast<int64_t>(std::llround(scaled)));
}

RasterImage ScaleImage(const RasterImage& img, const ScaleSpec& spec,
                       const simd::KernelTable& kernels) {
  const int64_t dst_w = ScaledDimension(img.width(), spec.percent);
  const int64_t dst_h = ScaledDimension(img.height(), spec.percent);
  if (spec.algorithm == ScaleAlgorithm::kNearest) return ScaleNearest(img, dst_w, dst_h);
  return ScaleBilinear(img, dst_w, dst_h, kernels);
}

RasterImage DropAlpha(const RasterImage& img, const simd::KernelTable& kernels) {
  if (img.channels() == 3) return img;
  RasterImage out(img.width(), img.height(), 3);
  simd::RgbaToRgb(img.pixels(), out.mutable_pixels(), kernels);
  return out;
}

std::vector<uint8_t> RecompressLossless(const RasterImage& img, int effort) {
  if (img.channels() != 3) {
    throw Error(ErrorKind::kInvalidArgument, "recompression expects 24-bit RGB; drop alpha first");
  }
  return EncodePng(img, effort);
}

int64_t TileStride(int64_t tile_side, double overlap_fraction) {
  if (tile_side < 1) {
    throw Error(ErrorKind::kInvalidArgument, "tile side must be >= 1");
  }
  if (!(overlap_fraction >= 0.0) || !(overlap_fraction < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "overlap fraction must be in [0, 1)");
  }
  // The epsilon keeps products such as 10 * 0.9 from landing just below an
  // integer.
  const double raw = static_cast<double>(tile_side) * (1.0 - overlap_fraction);
  return std::max<int64_t>(1, static_cast<int64_t>(std::floor(raw + 1e-9)));
}

std::vector<int64_t> TileOffsets(int64_t extent, int64_t tile_side, double overlap_fraction) {
  const int64_t stride = TileStride(tile_side, overlap_fraction);
  if (tile_side >= extent) return {0};
  std::vector<int64_t> offsets;
  for (int64_t pos = 0;; pos += stride) {
    if (pos + tile_side >= extent) {
      offsets.push_back(extent - tile_side);
      break;
    }
    offsets.push_back(pos);
  }
  return offsets;
}

std::vector<Tile> SplitIntoSquares(const RasterImage& img, const TileSpec& spec) {
  TileStride(spec.tile_side, spec.overlap_fraction);  // validates
  if (spec.tile_side > img.width() || spec.tile_side > img.height()) {
    return {Tile{img, 0, 0}};
  }
  const int64_t side = spec.tile_side;
  const int ch = img.channels();
  std::vector<Tile> tiles;
  for (int64_t oy : TileOffsets(img.height(), side, spec.overlap_fraction)) {
    for (int64_t ox : TileOffsets(img.width(), side, spec.overlap_fraction)) {
      RasterImage tile(side, side, ch);
      for (int64_t y = 0; y < side; ++y) {
        std::span<const uint8_t> src = img.row(oy + y).subspan(ox * ch, side * ch);
        std::copy(src.begin(), src.end(), tile.mutable_row(y).begin());
      }
      tiles.push_back(Tile{std::move(tile), ox, oy});
    }
  }
  return tiles;
}

std::vector<GroundTruthBox> TransformAnnotationsScale(const std::vector<GroundTruthBox>& boxes,
                                                      double percent) {
  CheckPercent(percent);
  const double f = percent / 100.0;
  std::vector<GroundTruthBox> out = boxes;
  if (percent == 100.0) return out;
  for (GroundTruthBox& b : out) {
    for (Point& p : b.quad) {
      p.x *= f;
      p.y *= f;
    }
    b.hbb = Hbb{b.hbb.xmin * f, b.hbb.ymin * f, b.hbb.xmax * f, b.hbb.ymax * f};
  }
  return out;
}

std::vector<GroundTruthBox> ClipAnnotationsToTile(const std::vector<GroundTruthBox>& boxes,
                                                  int64_t origin_x, int64_t origin_y,
                                                  int64_t tile_width, int64_t tile_height,
                                                  double keep_fraction) {
  const Hbb tile{static_cast<double>(origin_x), static_cast<double>(origin_y),
                 static_cast<double>(origin_x + tile_width),
                 static_cast<double>(origin_y + tile_height)};
  std::vector<GroundTruthBox> out;
  for (const GroundTruthBox& b : boxes) {
    Hbb clipped;
    if (!Intersect(b.hbb, tile, &clipped)) continue;
    if (clipped.area() < keep_fraction * b.hbb.area()) continue;
    const Hbb local{clipped.xmin - tile.xmin, clipped.ymin - tile.ymin, clipped.xmax - tile.xmin,
                    clipped.ymax - tile.ymin};
    GroundTruthBox kept = b;
    kept.hbb = local;
    if (clipped == b.hbb) {
      for (Point& p : kept.quad) {
        p.x -= tile.xmin;
        p.y -= tile.ymin;
      }
    } else {
      kept.quad = QuadFromHbb(local);
    }
    out.push_back(std::move(kept));
  }
  return out;
}

}  // namespace detbench
