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

// Data-parallel inner loops used by the image pipeline and the matcher.
// Every kernel has a scalar reference; AVX2 and NEON variants must produce
// identical results and are selected once at runtime.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "detbench/geometry.hpp"

namespace detbench::simd {

enum class Isa { kScalar, kAvx2, kNeon };

const char* IsaName(Isa isa);

// Fixed-point weights used by the bilinear resampler: 11 fractional bits
// per axis, so a two-axis blend carries 22 bits.
inline constexpr int kWeightBits = 11;
inline constexpr int32_t kWeightOne = 1 << kWeightBits;

struct KernelTable {
  Isa isa;
  // out[i] = Iou(a, box i) for boxes stored column-wise.
  void (*iou_row)(const Hbb& a, const double* xmin, const double* ymin, const double* xmax,
                  const double* ymax, size_t n, double* out);
  // Packs `pixels` RGBA quadruplets into RGB triplets.
  void (*rgba_to_rgb)(const uint8_t* rgba, size_t pixels, uint8_t* rgb);
  // out[i] = (top[i] * (kWeightOne - weight) + bottom[i] * weight + half) >> 22,
  // where top/bottom are horizontally blended rows (value * kWeightOne scale).
  void (*blend_rows)(const int32_t* top, const int32_t* bottom, int32_t weight, size_t n,
                     uint8_t* out);
};

// Table for one ISA, or nullptr when it was not compiled in or the CPU
// lacks it.
const KernelTable* Table(Isa isa);

std::vector<Isa> AvailableIsas();

// Best available table. DETBENCH_SIMD=scalar|avx2|neon overrides the choice
// when the requested ISA is available.
const KernelTable& Active();

// Column layout for batched IoU.
struct BoxColumns {
  std::vector<double> xmin, ymin, xmax, ymax;

  BoxColumns() = default;
  explicit BoxColumns(std::span<const Hbb> boxes);
  void push_back(const Hbb& box);
  size_t size() const { return xmin.size(); }
};

void IouRow(const Hbb& a, const BoxColumns& boxes, std::span<double> out,
            const KernelTable& table = Active());
void RgbaToRgb(std::span<const uint8_t> rgba, std::span<uint8_t> rgb,
               const KernelTable& table = Active());
void BlendRows(std::span<const int32_t> top, std::span<const int32_t> bottom, int32_t weight,
               std::span<uint8_t> out, const KernelTable& table = Active());

}  // namespace detbench::simd
