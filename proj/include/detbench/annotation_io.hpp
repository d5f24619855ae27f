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

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "detbench/types.hpp"

namespace detbench {

// id -> class name, ids contiguous from 1.
class LabelMap {
 public:
  struct Entry {
    int id;
    std::string name;
  };

  LabelMap() = default;
  // Validates uniqueness and contiguity; throws kLabelMap.
  explicit LabelMap(std::vector<Entry> entries);

  // The 15 DOTA-v1.0 categories in the devkit's order.
  static LabelMap Dota();

  size_t size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }
  bool contains(std::string_view name) const;
  std::optional<int> id_of(std::string_view name) const;
  const std::string& name_of(int id) const;

 private:
  std::vector<Entry> entries_;
};

// Accepts both the `item { id: N name: 'x' }` block format and plain
// "id name" / "id<TAB>name" lines.
LabelMap LoadLabelMap(std::string_view text);

struct AnnotationIssue {
  size_t line = 0;  // 1-based
  std::string message;
};

struct GroundTruthParse {
  std::vector<GroundTruthBox> boxes;
  std::vector<AnnotationIssue> issues;
  size_t header_lines = 0;
  size_t blank_lines = 0;
};

// DOTA v1.0 label file: `x1 y1 x2 y2 x3 y3 x4 y4 category difficulty` per
// record; `token:value` header lines are skipped. Throws on the first bad
// record (kMalformedAnnotation naming the line, or kUnknownCategory).
std::vector<GroundTruthBox> ParseGroundTruth(std::string_view text, const LabelMap& labels);

// Same grammar, but collects every bad line instead of throwing.
GroundTruthParse ParseGroundTruthLenient(std::string_view text, const LabelMap& labels);

std::string WriteGroundTruth(const std::vector<GroundTruthBox>& boxes);

// Detection files: `category confidence xmin ymin xmax ymax` per line,
// shortest round-trip decimal, '#' comments ignored.
std::string WriteDetections(const std::vector<Detection>& dets, const LabelMap& labels);
std::vector<Detection> ParseDetections(std::string_view text);

// Shortest decimal that parses back to the same double.
std::string FormatDouble(double v);

struct DatasetIndex {
  std::vector<ImageRecord> images;
  std::map<std::string, std::vector<GroundTruthBox>> annotations;
  // Images found without a label file (DOTA layout only).
  std::vector<std::string> missing_labels;

  const ImageRecord* find(std::string_view id) const;
  // Ascending total pixels, ties broken by id.
  std::vector<std::string> ids_by_pixels() const;
};

// Loads a DOTA-style tree: <root>/images/*.png and <root>/labelTxt/<id>.txt.
// Image dimensions come from the PNG header only.
DatasetIndex LoadDataset(const std::filesystem::path& root, const LabelMap& labels);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view data);

}  // namespace detbench
