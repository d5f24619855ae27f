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

#include <algorithm>

#include "tables.hpp"

namespace detbench::simd::internal {

void IouRowScalar(const Hbb& a, const double* xmin, const double* ymin, const double* xmax,
                  const double* ymax, size_t n, double* out) {
  for (size_t i = 0; i < n; ++i) {
    out[i] = Iou(a, Hbb{xmin[i], ymin[i], xmax[i], ymax[i]});
  }
}

void RgbaToRgbScalar(const uint8_t* rgba, size_t pixels, uint8_t* rgb) {
  for (size_t i = 0; i < pixels; ++i) {
    rgb[3 * i + 0] = rgba[4 * i + 0];
    rgb[3 * i + 1] = rgba[4 * i + 1];
    rgb[3 * i + 2] = rgba[4 * i + 2];
  }
}

void BlendRowsScalar(const int32_t* top, const int32_t* bottom, int32_t weight, size_t n,
                     uint8_t* out) {
  constexpr int kShift = 2 * kWeightBits;
  constexpr int32_t kHalf = 1 << (kShift - 1);
  const int32_t inv = kWeightOne - weight;
  for (size_t i = 0; i < n; ++i) {
    const int32_t v = (top[i] * inv + bottom[i] * weight + kHalf) >> kShift;
    out[i] = static_cast<uint8_t>(std::clamp(v, 0, 255));
  }
}

const KernelTable& ScalarTable() {
  static const KernelTable table{Isa::kScalar, &IouRowScalar, &RgbaToRgbScalar,
                                 &BlendRowsScalar};
  return table;
}

}  // namespace detbench::simd::internal
