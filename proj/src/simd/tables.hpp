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

#include "detbench/simd/kernels.hpp"

namespace detbench::simd::internal {

const KernelTable& ScalarTable();
// nullptr when the variant was not built for this target.
const KernelTable* Avx2Table();
const KernelTable* NeonTable();

// Scalar tails shared by the vector variants.
void IouRowScalar(const Hbb& a, const double* xmin, const double* ymin, const double* xmax,
                  const double* ymax, size_t n, double* out);
void RgbaToRgbScalar(const uint8_t* rgba, size_t pixels, uint8_t* rgb);
void BlendRowsScalar(const int32_t* top, const int32_t* bottom, int32_t weight, size_t n,
                     uint8_t* out);

}  // namespace detbench::simd::internal
