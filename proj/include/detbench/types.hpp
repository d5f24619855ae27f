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
#include <string>
#include <variant>

#include "detbench/geometry.hpp"

namespace detbench {

struct GroundTruthBox {
  Quad quad{};
  Hbb hbb{};
  std::string category;
  bool difficult = false;

  friend bool operator==(const GroundTruthBox&, const GroundTruthBox&) = default;
};

struct Detection {
  Hbb hbb{};
  std::string category;
  double confidence = 0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

enum class ScaleAlgorithm { kBilinear, kNearest };

const char* ScaleAlgorithmName(ScaleAlgorithm algorithm);
ScaleAlgorithm ParseScaleAlgorithm(const std::string& name);

namespace provenance {
struct Original {};
struct Scaled {
  std::string parent_id;
  double percent = 100;
  ScaleAlgorithm algorithm = ScaleAlgorithm::kBilinear;
};
struct Recompressed {
  std::string parent_id;
  int level = 6;
};
struct Tile {
  std::string parent_id;
  int64_t offset_x = 0;
  int64_t offset_y = 0;
};
}  // namespace provenance

using Provenance = std::variant<provenance::Original, provenance::Scaled,
                                provenance::Recompressed, provenance::Tile>;

std::string DescribeProvenance(const Provenance& p);

struct ImageRecord {
  std::string id;
  int64_t width = 1;
  int64_t height = 1;
  uint64_t file_size = 0;
  int bit_depth = 24;
  Provenance provenance = provenance::Original{};

  bool is_original() const {
    return std::holds_alternative<provenance::Original>(provenance);
  }
};

inline int64_t TotalPixels(const ImageRecord& rec) { return rec.width * rec.height; }

}  // namespace detbench
