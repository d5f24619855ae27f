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

#include "detbench/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "detbench/error.hpp"
#include "detbench/simd/kernels.hpp"

namespace detbench {

void MatchConfig::Validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "iou_threshold must be in (0, 1]");
  }
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "min_confidence must be in [0, 1]");
  }
  if (!(iou_floor >= 0.0 && iou_floor <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "iou_floor must be in [0, 1]");
  }
}

ClassCounts& ClassCounts::operator+=(const ClassCounts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  fn_misclassified += o.fn_misclassified;
  return *this;
}

ClassCounts MatchResult::total() const {
  ClassCounts sum;
  for (const auto& [name, counts] : per_class) sum += counts;
  return sum;
}

namespace {

struct Candidate {
  size_t gt;
  size_t det;
  double iou;
  double confidence;
  double product;
};

bool Precedes(const Candidate& a, const Candidate& b) {
  return std::make_tuple(-a.product, -a.confidence, a.det, a.gt) <
         std::make_tuple(-b.product, -b.confidence, b.det, b.gt);
}

}  // namespace

MatchResult MatchDetections(const std::vector<GroundTruthBox>& gts,
                            const std::vector<Detection>& dets, const MatchConfig& cfg) {
  cfg.Validate();
  MatchResult assignment;
  assignment.det_outcome.assign(dets.size(), DetOutcome::kFiltered);

  std::vector<size_t> retained;
  simd::BoxColumns columns;
  for (size_t d = 0; d < dets.size(); ++d) {
    if (dets[d].confidence >= cfg.min_confidence) {
      retained.push_back(d);
      columns.push_back(dets[d].hbb);
      assignment.det_outcome[d] = DetOutcome::kFalsePositive;
    }
  }

  std::vector<Candidate> candidates;
  std::vector<double> ious(retained.size());
  for (size_t g = 0; g < gts.size(); ++g) {
    simd::IouRow(gts[g].hbb, columns, ious);
    for (size_t k = 0; k < retained.size(); ++k) {
      const size_t d = retained[k];
      if (ious[k] < cfg.iou_floor || ious[k] <= 0.0) continue;
      if (cfg.require_class_match && dets[d].category != gts[g].category) continue;
      candidates.push_back({g, d, ious[k], dets[d].confidence, ious[k] * dets[d].confidence});
    }
  }
  std::sort(candidates.begin(), candidates.end(), Precedes);

  std::vector<bool> gt_used(gts.size(), false);
  std::vector<bool> det_used(dets.size(), false);
  for (const Candidate& c : candidates) {
    if (gt_used[c.gt] || det_used[c.det]) continue;
    gt_used[c.gt] = true;
    det_used[c.det] = true;
    assignment.pairs.push_back({c.gt, c.det, c.iou, c.confidence,
                                dets[c.det].category == gts[c.gt].category, false});
  }
  std::sort(assignment.pairs.begin(), assignment.pairs.end(),
            [](const MatchedPair& a, const MatchedPair& b) { return a.gt < b.gt; });
  return ClassifyAtThreshold(assignment, gts, dets, cfg, cfg.iou_threshold);
}

MatchResult ClassifyAtThreshold(const MatchResult& assignment,
                                const std::vector<GroundTruthBox>& gts,
                                const std::vector<Detection>& dets, const MatchConfig& cfg,
                                double iou_threshold) {
  MatchResult out;
  out.pairs = assignment.pairs;
  out.det_outcome = assignment.det_outcome;
  for (DetOutcome& o : out.det_outcome) {
    if (o != DetOutcome::kFiltered) o = DetOutcome::kFalsePositive;
  }
  for (const GroundTruthBox& g : gts) out.per_class[g.category];
  for (size_t d = 0; d < dets.size(); ++d) {
    if (out.det_outcome[d] != DetOutcome::kFiltered) out.per_class[dets[d].category];
  }

  auto counted = [&](size_t g) { return cfg.include_difficult || !gts[g].difficult; };
  std::vector<bool> gt_paired(gts.size(), false);
  std::vector<bool> det_paired(dets.size(), false);
  for (MatchedPair& p : out.pairs) {
    gt_paired[p.gt] = true;
    det_paired[p.det] = true;
    const bool above = p.iou >= iou_threshold;
    ClassCounts& gt_class = out.per_class[gts[p.gt].category];
    ClassCounts& det_class = out.per_class[dets[p.det].category];
    p.true_positive = false;
    if (above && p.class_match) {
      if (counted(p.gt)) {
        p.true_positive = true;
        ++gt_class.tp;
        out.det_outcome[p.det] = DetOutcome::kTruePositive;
      } else {
        out.det_outcome[p.det] = DetOutcome::kIgnored;
      }
      continue;
    }
    ++det_class.fp;
    if (counted(p.gt)) {
      ++gt_class.fn;
      if (above) ++gt_class.fn_misclassified;
    }
  }
  for (size_t g = 0; g < gts.size(); ++g) {
    if (gt_paired[g]) continue;
    out.unmatched_gt.push_back(g);
    if (counted(g)) ++out.per_class[gts[g].category].fn;
  }
  for (size_t d = 0; d < dets.size(); ++d) {
    if (out.det_outcome[d] == DetOutcome::kFiltered || det_paired[d]) continue;
    out.unmatched_det.push_back(d);
    ++out.per_class[dets[d].category].fp;
  }
  return out;
}

double Precision(size_t tp, size_t fp) {
  return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double Recall(size_t tp, size_t fn) {
  return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

PRCurve BuildPRCurve(std::string category, size_t num_gt,
                     std::vector<RankedDetection> detections) {
  std::stable_sort(detections.begin(), detections.end(),
                   [](const RankedDetection& a, const RankedDetection& b) {
                     return a.confidence > b.confidence;
                   });
  PRCurve curve{std::move(category), num_gt, {}};
  curve.points.reserve(detections.size());
  size_t tp = 0;
  size_t fp = 0;
  for (const RankedDetection& d : detections) {
    (d.true_positive ? tp : fp) += 1;
    curve.points.push_back({d.confidence, tp, fp, Precision(tp, fp),
                            num_gt == 0 ? 0.0 : static_cast<double>(tp) / num_gt});
  }
  return curve;
}

std::optional<double> InterpolatedAp(const PRCurve& curve) {
  if (curve.num_gt == 0) return std::nullopt;
  double sum = 0;
  for (size_t k = 0; k <= 10; ++k) {
    // recall >= k/10, compared exactly in integers.
    double best = 0;
    for (const PRPoint& p : curve.points) {
      if (10 * p.tp >= k * curve.num_gt) best = std::max(best, p.precision);
    }
    sum += best;
  }
  return sum / 11.0;
}

double MeanAp(const std::vector<std::optional<double>>& aps) {
  double sum = 0;
  size_t n = 0;
  for (const auto& ap : aps) {
    if (!ap) continue;
    sum += *ap;
    ++n;
  }
  if (n == 0) throw Error(ErrorKind::kEvaluation, "no class has ground truth; mAP undefined");
  return sum / static_cast<double>(n);
}

std::vector<double> CocoIouLadder() {
  std::vector<double> ladder;
  for (int k = 0; k < 10; ++k) ladder.push_back((50 + 5 * k) / 100.0);
  return ladder;
}

AccuracyCount CountAccurate(const std::vector<GroundTruthBox>& gts,
                            const std::vector<Detection>& dets, const MatchConfig& cfg) {
  const MatchResult m = MatchDetections(gts, dets, cfg);
  AccuracyCount acc;
  acc.accurate = m.total().tp;
  for (const GroundTruthBox& g : gts) {
    if (cfg.include_difficult || !g.difficult) ++acc.total;
  }
  return acc;
}

namespace {

const std::vector<GroundTruthBox> kNoBoxes;
const std::vector<Detection> kNoDetections;

struct ImageWork {
  std::string id;
  const std::vector<GroundTruthBox>* gts;
  const std::vector<Detection>* dets;
  MatchResult assignment;
};

std::vector<ImageWork> AssignAll(const GroundTruthSet& gts, const DetectionSet& dets,
                                 const MatchConfig& cfg) {
  std::set<std::string> ids;
  for (const auto& [id, _] : gts) ids.insert(id);
  for (const auto& [id, _] : dets) ids.insert(id);
  std::vector<ImageWork> work;
  for (const std::string& id : ids) {
    auto g = gts.find(id);
    auto d = dets.find(id);
    ImageWork w{id, g == gts.end() ? &kNoBoxes : &g->second,
                d == dets.end() ? &kNoDetections : &d->second, {}};
    w.assignment = MatchDetections(*w.gts, *w.dets, cfg);
    work.push_back(std::move(w));
  }
  return work;
}

std::vector<ClassReport> ClassReports(const std::vector<ImageWork>& work,
                                      const std::vector<MatchResult>& classified,
                                      const LabelMap& labels, const MatchConfig& cfg) {
  std::vector<ClassReport> reports;
  for (const LabelMap::Entry& entry : labels.entries()) {
    ClassReport r;
    r.category = entry.name;
    std::vector<RankedDetection> ranked;
    for (size_t i = 0; i < work.size(); ++i) {
      for (const GroundTruthBox& g : *work[i].gts) {
        if (g.category == entry.name && (cfg.include_difficult || !g.difficult)) ++r.num_gt;
      }
      const auto& dets = *work[i].dets;
      for (size_t d = 0; d < dets.size(); ++d) {
        const DetOutcome o = classified[i].det_outcome[d];
        if (dets[d].category != entry.name) continue;
        if (o != DetOutcome::kTruePositive && o != DetOutcome::kFalsePositive) continue;
        ranked.push_back({dets[d].confidence, o == DetOutcome::kTruePositive});
      }
      auto it = classified[i].per_class.find(entry.name);
      if (it != classified[i].per_class.end()) r.counts += it->second;
    }
    r.num_det = ranked.size();
    r.curve = BuildPRCurve(entry.name, r.num_gt, std::move(ranked));
    r.ap = InterpolatedAp(r.curve);
    reports.push_back(std::move(r));
  }
  return reports;
}

double MapAtThreshold(const std::vector<ImageWork>& work, const LabelMap& labels,
                      const MatchConfig& cfg, double threshold) {
  std::vector<MatchResult> classified;
  for (const ImageWork& w : work) {
    classified.push_back(ClassifyAtThreshold(w.assignment, *w.gts, *w.dets, cfg, threshold));
  }
  std::vector<std::optional<double>> aps;
  for (const ClassReport& r : ClassReports(work, classified, labels, cfg)) aps.push_back(r.ap);
  return MeanAp(aps);
}

CocoSuite Ladder(const std::vector<ImageWork>& work, const LabelMap& labels,
                 const EvalConfig& cfg) {
  CocoSuite suite;
  double sum = 0;
  for (double t : cfg.iou_ladder) {
    const double m = MapAtThreshold(work, labels, cfg.match, t);
    suite.per_threshold.emplace_back(t, m);
    sum += m;
  }
  suite.ap_ladder = cfg.iou_ladder.empty() ? 0.0 : sum / static_cast<double>(cfg.iou_ladder.size());
  suite.ap50 = MapAtThreshold(work, labels, cfg.match, 0.50);
  suite.ap75 = MapAtThreshold(work, labels, cfg.match, 0.75);
  return suite;
}

}  // namespace

CocoSuite CocoApSuite(const GroundTruthSet& gts, const DetectionSet& dets, const LabelMap& labels,
                      const EvalConfig& cfg) {
  return Ladder(AssignAll(gts, dets, cfg.match), labels, cfg);
}

DatasetEval EvaluateDataset(const GroundTruthSet& gts, const DetectionSet& dets,
                            const LabelMap& labels, const EvalConfig& cfg) {
  for (const auto& [id, dlist] : dets) {
    for (const Detection& d : dlist) {
      if (!labels.contains(d.category)) {
        throw Error(ErrorKind::kUnknownCategory,
                    "detection for " + id + " has unknown category '" + d.category + "'");
      }
    }
  }
  const std::vector<ImageWork> work = AssignAll(gts, dets, cfg.match);
  MatchConfig accuracy_cfg = cfg.match;
  accuracy_cfg.min_confidence = cfg.accuracy_min_confidence;

  DatasetEval result;
  std::vector<MatchResult> classified;
  for (const ImageWork& w : work) {
    classified.push_back(
        ClassifyAtThreshold(w.assignment, *w.gts, *w.dets, cfg.match, cfg.match.iou_threshold));
    ImageReport img;
    img.id = w.id;
    img.counts = classified.back().total();
    img.pairs = classified.back().pairs;
    img.accuracy = CountAccurate(*w.gts, *w.dets, accuracy_cfg);
    result.accuracy.accurate += img.accuracy.accurate;
    result.accuracy.total += img.accuracy.total;
    result.totals += img.counts;
    result.images.push_back(std::move(img));
  }
  result.classes = ClassReports(work, classified, labels, cfg.match);
  std::vector<std::optional<double>> aps;
  for (const ClassReport& r : result.classes) aps.push_back(r.ap);
  result.map = MeanAp(aps);
  result.coco = Ladder(work, labels, cfg);
  return result;
}

}  // namespace detbench
