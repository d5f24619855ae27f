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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "detbench/annotation_io.hpp"
#include "detbench/types.hpp"

namespace detbench {

struct MatchConfig {
  double iou_threshold = 0.5;
  // Detections below this score are dropped before matching.
  double min_confidence = 0.5;
  bool require_class_match = true;
  // Pairs below this IoU are never candidates.
  double iou_floor = 0.1;
  // When false, difficult ground truths are not counted and detections
  // matched to them are ignored.
  bool include_difficult = true;

  void Validate() const;
};

enum class DetOutcome { kFiltered, kTruePositive, kFalsePositive, kIgnored };

struct MatchedPair {
  size_t gt = 0;
  size_t det = 0;
  double iou = 0;
  double confidence = 0;
  bool class_match = true;
  bool true_positive = false;
};

struct ClassCounts {
  size_t tp = 0;
  size_t fp = 0;
  size_t fn = 0;
  // Ground truths whose winning detection clears the IoU threshold but
  // carries another class. Only possible with require_class_match = false;
  // these are also counted in fn.
  size_t fn_misclassified = 0;

  ClassCounts& operator+=(const ClassCounts& o);
};

struct MatchResult {
  std::vector<MatchedPair> pairs;  // sorted by gt index
  std::vector<size_t> unmatched_gt;
  std::vector<size_t> unmatched_det;  // retained detections without a pair
  std::vector<DetOutcome> det_outcome;  // indexed like the input detections
  std::map<std::string, ClassCounts> per_class;

  ClassCounts total() const;
};

// One-to-one assignment between ground truths and detections. Candidates
// are pairs with iou >= iou_floor (and equal classes when required); the
// pair with the largest iou * confidence wins first, ties going to the
// higher confidence, then the lower detection index, then the lower ground
// truth index. Winners at or above iou_threshold are true positives.
MatchResult MatchDetections(const std::vector<GroundTruthBox>& gts,
                            const std::vector<Detection>& dets, const MatchConfig& cfg);

// Re-scores an existing assignment at another IoU threshold.
MatchResult ClassifyAtThreshold(const MatchResult& assignment,
                                const std::vector<GroundTruthBox>& gts,
                                const std::vector<Detection>& dets, const MatchConfig& cfg,
                                double iou_threshold);

double Precision(size_t tp, size_t fp);
double Recall(size_t tp, size_t fn);

struct PRPoint {
  double confidence = 0;
  size_t tp = 0;  // cumulative
  size_t fp = 0;  // cumulative
  double precision = 0;
  double recall = 0;
};

struct PRCurve {
  std::string category;
  size_t num_gt = 0;
  std::vector<PRPoint> points;  // one per ranked detection
};

struct RankedDetection {
  double confidence = 0;
  bool true_positive = false;
};

// Ranks by descending confidence (stable for equal scores) and accumulates.
PRCurve BuildPRCurve(std::string category, size_t num_gt,
                     std::vector<RankedDetection> detections);

// Eleven-point interpolated AP. nullopt when the class has no ground truth.
std::optional<double> InterpolatedAp(const PRCurve& curve);

// Unweighted mean over defined entries; throws kEvaluation if none.
double MeanAp(const std::vector<std::optional<double>>& aps);

// IoU thresholds 0.50, 0.55, ..., 0.95.
std::vector<double> CocoIouLadder();

struct CocoSuite {
  double ap_ladder = 0;  // mean over the ladder
  double ap50 = 0;
  double ap75 = 0;
  std::vector<std::pair<double, double>> per_threshold;  // (iou, mAP)
};

struct AccuracyCount {
  size_t accurate = 0;
  size_t total = 0;
  double ratio() const { return total == 0 ? 0.0 : static_cast<double>(accurate) / total; }
};

// True positives (all classes pooled) under cfg, usually min_confidence 0.5,
// over the number of counted ground truths.
AccuracyCount CountAccurate(const std::vector<GroundTruthBox>& gts,
                            const std::vector<Detection>& dets, const MatchConfig& cfg);

struct EvalConfig {
  MatchConfig match{.iou_threshold = 0.5, .min_confidence = 0.01};
  double accuracy_min_confidence = 0.5;
  std::vector<double> iou_ladder = CocoIouLadder();
};

struct ClassReport {
  std::string category;
  size_t num_gt = 0;
  size_t num_det = 0;
  ClassCounts counts;
  std::optional<double> ap;
  PRCurve curve;
};

struct ImageReport {
  std::string id;
  AccuracyCount accuracy;
  ClassCounts counts;
  std::vector<MatchedPair> pairs;
};

struct DatasetEval {
  std::vector<ClassReport> classes;  // label map order
  double map = 0;
  CocoSuite coco;
  AccuracyCount accuracy;
  ClassCounts totals;
  std::vector<ImageReport> images;  // sorted by id
};

using GroundTruthSet = std::map<std::string, std::vector<GroundTruthBox>>;
using DetectionSet = std::map<std::string, std::vector<Detection>>;

// Images absent from `dets` are evaluated with zero detections. Throws
// kEvaluation when no class has ground truth.
DatasetEval EvaluateDataset(const GroundTruthSet& gts, const DetectionSet& dets,
                            const LabelMap& labels, const EvalConfig& cfg);

CocoSuite CocoApSuite(const GroundTruthSet& gts, const DetectionSet& dets, const LabelMap& labels,
                      const EvalConfig& cfg);

}  // namespace detbench
