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

#if defined(DETBENCH_HAVE_AVX2)
#include <immintrin.h>
#endif

namespace detbench::simd::internal {

#if defined(DETBENCH_HAVE_AVX2)

namespace {

void IouRowAvx2(const Hbb& a, const double* xmin, const double* ymin, const double* xmax,
                const double* ymax, size_t n, double* out) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d ax0 = _mm256_set1_pd(a.xmin);
  const __m256d ay0 = _mm256_set1_pd(a.ymin);
  const __m256d ax1 = _mm256_set1_pd(a.xmax);
  const __m256d ay1 = _mm256_set1_pd(a.ymax);
  const __m256d area_a = _mm256_set1_pd((a.xmax - a.xmin) * (a.ymax - a.ymin));
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d bx0 = _mm256_loadu_pd(xmin + i);
    const __m256d by0 = _mm256_loadu_pd(ymin + i);
    const __m256d bx1 = _mm256_loadu_pd(xmax + i);
    const __m256d by1 = _mm256_loadu_pd(ymax + i);
    // max(diff, 0) returns the second operand for NaN and signed zeros,
    // which matches std::max(0.0, diff).
    const __m256d iw = _mm256_max_pd(
        _mm256_sub_pd(_mm256_min_pd(ax1, bx1), _mm256_max_pd(ax0, bx0)), zero);
    const __m256d ih = _mm256_max_pd(
        _mm256_sub_pd(_mm256_min_pd(ay1, by1), _mm256_max_pd(ay0, by0)), zero);
    const __m256d inter = _mm256_mul_pd(iw, ih);
    const __m256d area_b = _mm256_mul_pd(_mm256_sub_pd(bx1, bx0), _mm256_sub_pd(by1, by0));
    const __m256d uni = _mm256_sub_pd(_mm256_add_pd(area_a, area_b), inter);
    const __m256d positive = _mm256_cmp_pd(uni, zero, _CMP_GT_OQ);
    const __m256d ratio = _mm256_div_pd(inter, uni);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(zero, ratio, positive));
  }
  IouRowScalar(a, xmin + i, ymin + i, xmax + i, ymax + i, n - i, out + i);
}

void RgbaToRgbAvx2(const uint8_t* rgba, size_t pixels, uint8_t* rgb) {
  // Per 128-bit lane: 4 RGBA pixels -> 12 packed bytes in dwords 0..2.
  const __m256i pack = _mm256_setr_epi8(0, 1, 2, 4, 5, 6, 8, 9, 10, 12, 13, 14, -1, -1, -1, -1,
                                        0, 1, 2, 4, 5, 6, 8, 9, 10, 12, 13, 14, -1, -1, -1, -1);
  const __m256i gather = _mm256_setr_epi32(0, 1, 2, 4, 5, 6, 3, 7);
  size_t i = 0;
  for (; i + 8 <= pixels; i += 8) {
    __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(rgba + 4 * i));
    v = _mm256_shuffle_epi8(v, pack);
    v = _mm256_permutevar8x32_epi32(v, gather);
    uint8_t* dst = rgb + 3 * i;
    _mm_storeu_si128(reinterpret_cast<__m128i*>(dst), _mm256_castsi256_si128(v));
    _mm_storel_epi64(reinterpret_cast<__m128i*>(dst + 16), _mm256_extracti128_si256(v, 1));
  }
  RgbaToRgbScalar(rgba + 4 * i, pixels - i, rgb + 3 * i);
}

inline __m256i BlendEight(const int32_t* top, const int32_t* bottom, __m256i inv, __m256i w,
                          __m256i half) {
  const __m256i t = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(top));
  const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bottom));
  __m256i v = _mm256_add_epi32(_mm256_mullo_epi32(t, inv), _mm256_mullo_epi32(b, w));
  v = _mm256_add_epi32(v, half);
  return _mm256_srai_epi32(v, 2 * kWeightBits);
}

void BlendRowsAvx2(const int32_t* top, const int32_t* bottom, int32_t weight, size_t n,
                   uint8_t* out) {
  const __m256i inv = _mm256_set1_epi32(kWeightOne - weight);
  const __m256i w = _mm256_set1_epi32(weight);
  const __m256i half = _mm256_set1_epi32(1 << (2 * kWeightBits - 1));
  size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i a = BlendEight(top + i, bottom + i, inv, w, half);
    const __m256i b = BlendEight(top + i + 8, bottom + i + 8, inv, w, half);
    const __m256i c = BlendEight(top + i + 16, bottom + i + 16, inv, w, half);
    const __m256i d = BlendEight(top + i + 24, bottom + i + 24, inv, w, half);
    const __m256i ab = _mm256_permute4x64_epi64(_mm256_packus_epi32(a, b), 0xD8);
    const __m256i cd = _mm256_permute4x64_epi64(_mm256_packus_epi32(c, d), 0xD8);
    const __m256i bytes = _mm256_permute4x64_epi64(_mm256_packus_epi16(ab, cd), 0xD8);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), bytes);
  }
  BlendRowsScalar(top + i, bottom + i, weight, n - i, out + i);
}

}  // namespace

const KernelTable* Avx2Table() {
  static const KernelTable table{Isa::kAvx2, &IouRowAvx2, &RgbaToRgbAvx2, &BlendRowsAvx2};
  return &table;
}

#else

const KernelTable* Avx2Table() { return nullptr; }

#endif

}  // namespace detbench::simd::internal
