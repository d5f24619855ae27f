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

#include "detbench/types.hpp"

#include <sstream>

#include "detbench/error.hpp"

namespace detbench {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kMalformedAnnotation: return "malformed-annotation";
    case ErrorKind::kUnknownCategory: return "unknown-category";
    case ErrorKind::kLabelMap: return "label-map";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kBackend: return "backend-error";
    case ErrorKind::kEvaluation: return "evaluation";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message), kind_(kind) {}

const char* ScaleAlgorithmName(ScaleAlgorithm algorithm) {
  return algorithm == ScaleAlgorithm::kBilinear ? "bilinear" : "nearest";
}

ScaleAlgorithm ParseScaleAlgorithm(const std::string& name) {
  if (name == "bilinear") return ScaleAlgorithm::kBilinear;
  if (name == "nearest" || name == "nearest-neighbor") return ScaleAlgorithm::kNearest;
  throw Error(ErrorKind::kInvalidArgument, "unknown scaling algorithm '" + name + "'");
}

namespace {
struct Describer {
  std::string operator()(const provenance::Original&) const { return "original"; }
  std::string operator()(const provenance::Scaled& s) const {
    std::ostringstream out;
    out << "scaled(" << s.parent_id << "," << s.percent << ","
        << ScaleAlgorithmName(s.algorithm) << ")";
    return out.str();
  }
  std::string operator()(const provenance::Recompressed& r) const {
    return "recompressed(" + r.parent_id + "," + std::to_string(r.level) + ")";
  }
  std::string operator()(const provenance::Tile& t) const {
    return "tile(" + t.parent_id + "," + std::to_string(t.offset_x) + "," +
           std::to_string(t.offset_y) + ")";
  }
};
}  // namespace

std::string DescribeProvenance(const Provenance& p) { return std::visit(Describer{}, p); }

}  // namespace detbench
