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

#include <cstdlib>
#include <string>

#include "detbench/error.hpp"
#include "tables.hpp"

namespace detbench::simd {

const char* IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

namespace {

bool CpuHas(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return true;
    case Isa::kAvx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::kNeon:
      // NEON is mandatory on aarch64.
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& Select() {
  const char* forced = std::getenv("DETBENCH_SIMD");
  if (forced != nullptr) {
    const std::string name(forced);
    for (Isa isa : AvailableIsas()) {
      if (name == IsaName(isa)) return *Table(isa);
    }
  }
  if (const KernelTable* t = Table(Isa::kAvx2)) return *t;
  if (const KernelTable* t = Table(Isa::kNeon)) return *t;
  return internal::ScalarTable();
}

}  // namespace

const KernelTable* Table(Isa isa) {
  if (!CpuHas(isa)) return nullptr;
  switch (isa) {
    case Isa::kScalar: return &internal::ScalarTable();
    case Isa::kAvx2: return internal::Avx2Table();
    case Isa::kNeon: return internal::NeonTable();
  }
  return nullptr;
}

std::vector<Isa> AvailableIsas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
    if (Table(isa) != nullptr) out.push_back(isa);
  }
  return out;
}

const KernelTable& Active() {
  static const KernelTable& table = Select();
  return table;
}

BoxColumns::BoxColumns(std::span<const Hbb> boxes) {
  xmin.reserve(boxes.size());
  ymin.reserve(boxes.size());
  xmax.reserve(boxes.size());
  ymax.reserve(boxes.size());
  for (const Hbb& b : boxes) push_back(b);
}

void BoxColumns::push_back(const Hbb& box) {
  xmin.push_back(box.xmin);
  ymin.push_back(box.ymin);
  xmax.push_back(box.xmax);
  ymax.push_back(box.ymax);
}

void IouRow(const Hbb& a, const BoxColumns& boxes, std::span<double> out,
            const KernelTable& table) {
  if (out.size() < boxes.size()) {
    throw Error(ErrorKind::kInvalidArgument, "iou row output too small");
  }
  table.iou_row(a, boxes.xmin.data(), boxes.ymin.data(), boxes.xmax.data(), boxes.ymax.data(),
                boxes.size(), out.data());
}

void RgbaToRgb(std::span<const uint8_t> rgba, std::span<uint8_t> rgb, const KernelTable& table) {
  if (rgba.size() % 4 != 0 || rgb.size() < rgba.size() / 4 * 3) {
    throw Error(ErrorKind::kInvalidArgument, "rgba/rgb buffer size mismatch");
  }
  table.rgba_to_rgb(rgba.data(), rgba.size() / 4, rgb.data());
}

void BlendRows(std::span<const int32_t> top, std::span<const int32_t> bottom, int32_t weight,
               std::span<uint8_t> out, const KernelTable& table) {
  if (top.size() != bottom.size() || out.size() < top.size()) {
    throw Error(ErrorKind::kInvalidArgument, "blend row size mismatch");
  }
  if (weight < 0 || weight > kWeightOne) {
    throw Error(ErrorKind::kInvalidArgument, "blend weight out of range");
  }
  table.blend_rows(top.data(), bottom.data(), weight, top.size(), out.data());
}

}  // namespace detbench::simd
