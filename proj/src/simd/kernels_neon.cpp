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

#include "tables.hpp"

#if defined(DETBENCH_HAVE_NEON)
#include <arm_neon.h>
#endif

namespace detbench::simd::internal {

#if defined(DETBENCH_HAVE_NEON)

namespace {

void IouRowNeon(const Hbb& a, const double* xmin, const double* ymin, const double* xmax,
                const double* ymax, size_t n, double* out) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t ax0 = vdupq_n_f64(a.xmin);
  const float64x2_t ay0 = vdupq_n_f64(a.ymin);
  const float64x2_t ax1 = vdupq_n_f64(a.xmax);
  const float64x2_t ay1 = vdupq_n_f64(a.ymax);
  const float64x2_t area_a = vdupq_n_f64((a.xmax - a.xmin) * (a.ymax - a.ymin));
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t bx0 = vld1q_f64(xmin + i);
    const float64x2_t by0 = vld1q_f64(ymin + i);
    const float64x2_t bx1 = vld1q_f64(xmax + i);
    const float64x2_t by1 = vld1q_f64(ymax + i);
    const float64x2_t iw = vmaxq_f64(vsubq_f64(vminq_f64(ax1, bx1), vmaxq_f64(ax0, bx0)), zero);
    const float64x2_t ih = vmaxq_f64(vsubq_f64(vminq_f64(ay1, by1), vmaxq_f64(ay0, by0)), zero);
    const float64x2_t inter = vmulq_f64(iw, ih);
    const float64x2_t area_b = vmulq_f64(vsubq_f64(bx1, bx0), vsubq_f64(by1, by0));
    const float64x2_t uni = vsubq_f64(vaddq_f64(area_a, area_b), inter);
    const uint64x2_t positive = vcgtq_f64(uni, zero);
    vst1q_f64(out + i, vbslq_f64(positive, vdivq_f64(inter, uni), zero));
  }
  IouRowScalar(a, xmin + i, ymin + i, xmax + i, ymax + i, n - i, out + i);
}

void RgbaToRgbNeon(const uint8_t* rgba, size_t pixels, uint8_t* rgb) {
  size_t i = 0;
  for (; i + 16 <= pixels; i += 16) {
    const uint8x16x4_t px = vld4q_u8(rgba + 4 * i);
    uint8x16x3_t dst;
    dst.val[0] = px.val[0];
    dst.val[1] = px.val[1];
    dst.val[2] = px.val[2];
    vst3q_u8(rgb + 3 * i, dst);
  }
  RgbaToRgbScalar(rgba + 4 * i, pixels - i, rgb + 3 * i);
}

void BlendRowsNeon(const int32_t* top, const int32_t* bottom, int32_t weight, size_t n,
                   uint8_t* out) {
  const int32x4_t inv = vdupq_n_s32(kWeightOne - weight);
  const int32x4_t w = vdupq_n_s32(weight);
  const int32x4_t half = vdupq_n_s32(1 << (2 * kWeightBits - 1));
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    int32x4_t lo = vmlaq_s32(vmulq_s32(vld1q_s32(top + i), inv), vld1q_s32(bottom + i), w);
    int32x4_t hi =
        vmlaq_s32(vmulq_s32(vld1q_s32(top + i + 4), inv), vld1q_s32(bottom + i + 4), w);
    lo = vshrq_n_s32(vaddq_s32(lo, half), 2 * kWeightBits);
    hi = vshrq_n_s32(vaddq_s32(hi, half), 2 * kWeightBits);
    const uint16x8_t narrow = vcombine_u16(vqmovun_s32(lo), vqmovun_s32(hi));
    vst1_u8(out + i, vqmovn_u16(narrow));
  }
  BlendRowsScalar(top + i, bottom + i, weight, n - i, out + i);
}

}  // namespace

const KernelTable* NeonTable() {
  static const KernelTable table{Isa::kNeon, &IouRowNeon, &RgbaToRgbNeon, &BlendRowsNeon};
  return &table;
}

#else

const KernelTable* NeonTable() { return nullptr; }

#endif

}  // namespace detbench::simd::internal
