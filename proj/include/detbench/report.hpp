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

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "detbench/annotation_io.hpp"
#include "detbench/bench.hpp"
#include "detbench/eval.hpp"

namespace detbench {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct PipelineConfig {
  std::vector<double> scale_percents{80, 50, 30};
  ScaleAlgorithm algorithm = ScaleAlgorithm::kBilinear;
  // Effort levels standing in for the 80/50/30 compression settings.
  std::vector<int> effort_levels{3, 6, 9};
  int scaled_effort = 6;  // effort used when writing scaled images and tiles
  int64_t tile_side = 0;  // 0 disables tiling
  double tile_overlap = 0.10;
  double keep_fraction = 0.5;
};

struct BenchConfig {
  std::optional<int> repetitions;
  int repetitions_baseline = 5;
  int repetitions_modified = 3;
  std::optional<std::string> warmup_image;
  ImageOrder order = ImageOrder::kByTotalPixelsAsc;
  ExternalOptions external;
};

struct ToolkitConfig {
  EvalConfig eval;
  PipelineConfig pipeline;
  BenchConfig bench;
  std::string labels_path;  // empty: built-in DOTA map
};

// JSON config; every key optional, defaults as above. Unknown keys are
// rejected so typos do not silently fall back to defaults.
ToolkitConfig ParseConfig(const nlohmann::json& j);
ToolkitConfig LoadConfig(const std::filesystem::path& path);
nlohmann::json ConfigToJson(const ToolkitConfig& cfg);

LabelMap LoadLabels(const ToolkitConfig& cfg);

// Fingerprint of the inputs that produced a report.
nlohmann::json MakeManifest(const ToolkitConfig& cfg, const std::vector<ImageRecord>& images,
                            const std::string& command, const std::string& backend_id = "");

struct IndexStats {
  size_t images = 0;
  size_t instances = 0;
  double mean_boxes_per_image = 0;  // over images with labels
  std::string smallest_id;
  int64_t smallest_pixels = 0;
  std::string largest_id;
  int64_t largest_pixels = 0;
  std::vector<std::string> missing_labels;
};

IndexStats ComputeIndexStats(const DatasetIndex& index);

// --- preprocess ------------------------------------------------------------

struct DerivedImage {
  std::string variant;  // e.g. scale_30, recompress_9, tiles_4287
  ImageRecord record;
  std::filesystem::path path;
  std::string operation;
  std::string parameters;
};

// Writes <out>/<variant>/images/<id>.png and <out>/<variant>/labelTxt/<id>.txt
// for each configured variant plus <out>/manifest.tsv.
std::vector<DerivedImage> RunPreprocess(const std::filesystem::path& dataset_root,
                                        const DatasetIndex& index, const PipelineConfig& cfg,
                                        const std::filesystem::path& out_dir);

std::string WritePipelineManifest(const std::vector<DerivedImage>& derived);

// Inverse of DescribeProvenance.
Provenance ParseProvenance(const std::string& text);

// <variant>/provenance.tsv: `id<TAB>provenance` per derived image. Missing
// file gives an empty map.
std::map<std::string, Provenance> LoadProvenanceFile(const std::filesystem::path& path);

// --- reports ---------------------------------------------------------------

// Fixed-width table; OOM images show a literal X in the time column.
std::string FormatBenchTable(const std::vector<ImageSummary>& summaries);

std::string WriteEvalReport(const DatasetEval& eval, const GroundTruthSet& gts,
                            const DetectionSet& dets, const nlohmann::json& manifest);
nlohmann::json EvalSummaryJson(const DatasetEval& eval, const nlohmann::json& manifest);

struct ScatterSeries {
  std::string label;
  std::string color;
  std::vector<ImageSummary> points;
};

// Total pixels vs mean time; OOM images drawn as a red "X" along the top.
std::string RenderScatterSvg(const std::vector<ScatterSeries>& series, const std::string& title,
                             const nlohmann::json& manifest);

struct CompareRow {
  std::string image_id;
  int64_t pixels_a = 0;
  int64_t pixels_b = 0;
  std::optional<double> time_a, time_b;
  std::optional<double> rss_a, rss_b;
  std::optional<double> accuracy_a, accuracy_b;
  bool oom_a = false;
  bool oom_b = false;

  std::optional<double> time_delta() const;
  std::optional<double> rss_delta() const;
  std::optional<double> accuracy_delta() const;
};

struct ReportData {
  std::vector<ImageSummary> summaries;
  std::map<std::string, double> accuracy;  // per image, from eval_summary.json
};

ReportData LoadReportDir(const std::filesystem::path& dir);

// Rows for shared image ids, sorted by id. Throws kInvalidArgument when the
// reports have no image in common.
std::vector<CompareRow> CompareReports(const ReportData& a, const ReportData& b);
std::string WriteCompareTable(const std::vector<CompareRow>& rows, const nlohmann::json& manifest);

// --- commands --------------------------------------------------------------
// Each returns a process exit code and writes human output to `out`.

int CmdIndex(const std::filesystem::path& root, const ToolkitConfig& cfg,
             const std::optional<std::filesystem::path>& out_dir, std::ostream& out);
int CmdPreprocess(const std::filesystem::path& root, const ToolkitConfig& cfg,
                  const std::filesystem::path& out_dir, std::ostream& out);
int CmdBench(const std::filesystem::path& root, const ToolkitConfig& cfg,
             const std::string& backend_spec, const std::filesystem::path& out_dir,
             std::ostream& out);
int CmdEval(const std::filesystem::path& root, const std::filesystem::path& detections_dir,
            const ToolkitConfig& cfg, const std::filesystem::path& out_dir, std::ostream& out);
int CmdCompare(const std::filesystem::path& report_a, const std::filesystem::path& report_b,
               const std::filesystem::path& out_dir, std::ostream& out);

}  // namespace detbench
