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

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "detbench/error.hpp"
#include "detbench/eval.hpp"
#include "oracles.hpp"

namespace detbench {
namespace {

GroundTruthBox Gt(double x0, double y0, double x1, double y1, const char* cat = "plane",
                  bool difficult = false) {
  GroundTruthBox g;
  g.hbb = Hbb{x0, y0, x1, y1};
  g.quad = QuadFromHbb(g.hbb);
  g.category = cat;
  g.difficult = difficult;
  return g;
}

Detection Det(double x0, double y0, double x1, double y1, double conf, const char* cat = "plane") {
  return Detection{Hbb{x0, y0, x1, y1}, cat, conf};
}

MatchConfig Cfg() { return MatchConfig{}; }

TEST(MatchTest, IdenticalBoxIsTruePositive) {
  const auto m = MatchDetections({Gt(0, 0, 10, 10)}, {Det(0, 0, 10, 10, 0.9)}, Cfg());
  const ClassCounts c = m.total();
  EXPECT_EQ(c.tp, 1u);
  EXPECT_EQ(c.fp, 0u);
  EXPECT_EQ(c.fn, 0u);
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_EQ(m.pairs[0].iou, 1.0);
}

TEST(MatchTest, DuplicateResolvedByProduct) {
  // Both detections overlap the gt at IoU 0.8; products 0.72 and 0.48.
  const auto m = MatchDetections({Gt(0, 0, 10, 10)},
                                 {Det(0, 0, 10, 8, 0.6), Det(0, 2, 10, 10, 0.9)}, Cfg());
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_EQ(m.pairs[0].det, 1u);
  EXPECT_EQ(m.total().tp, 1u);
  EXPECT_EQ(m.total().fp, 1u);
  EXPECT_EQ(m.det_outcome[0], DetOutcome::kFalsePositive);
  EXPECT_EQ(m.det_outcome[1], DetOutcome::kTruePositive);
}

TEST(MatchTest, ProductBeatsRawIou) {
  // IoU 1.0 at conf 0.55 (0.55) loses to IoU 0.8 at conf 0.9 (0.72).
  const auto m = MatchDetections({Gt(0, 0, 10, 10)},
                                 {Det(0, 0, 10, 10, 0.55), Det(0, 0, 10, 8, 0.9)}, Cfg());
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_EQ(m.pairs[0].det, 1u);
}

TEST(MatchTest, TieBreaksByConfidenceThenIndex) {
  // Equal products: 1.0*0.5 vs 0.5*1.0.
  MatchConfig cfg = Cfg();
  cfg.min_confidence = 0;
  auto m = MatchDetections({Gt(0, 0, 100, 100)},
                           {Det(0, 0, 100, 100, 0.5), Det(0, 0, 100, 50, 1.0)}, cfg);
  EXPECT_EQ(m.pairs[0].det, 1u);
  m = MatchDetections({Gt(0, 0, 10, 10)}, {Det(0, 0, 10, 10, 0.7), Det(0, 0, 10, 10, 0.7)}, Cfg());
  EXPECT_EQ(m.pairs[0].det, 0u);
}

TEST(MatchTest, SubThresholdWinnerIsFalsePositiveAndFalseNegative) {
  const auto m = MatchDetections({Gt(0, 0, 10, 10)}, {Det(6, 0, 16, 10, 0.9)}, Cfg());
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_FALSE(m.pairs[0].true_positive);
  EXPECT_EQ(m.total().tp, 0u);
  EXPECT_EQ(m.total().fp, 1u);
  EXPECT_EQ(m.total().fn, 1u);
}

TEST(MatchTest, BelowFloorNeverPairs) {
  // IoU 1/19 < 0.1
  const auto m = MatchDetections({Gt(0, 0, 10, 10)}, {Det(9, 0, 19, 10, 0.9)}, Cfg());
  EXPECT_TRUE(m.pairs.empty());
  EXPECT_EQ(m.unmatched_det, std::vector<size_t>{0});
  EXPECT_EQ(m.unmatched_gt, std::vector<size_t>{0});
}

TEST(MatchTest, ConfidenceFilter) {
  const auto m = MatchDetections({Gt(0, 0, 10, 10)}, {Det(0, 0, 10, 10, 0.4)}, Cfg());
  EXPECT_EQ(m.det_outcome[0], DetOutcome::kFiltered);
  EXPECT_EQ(m.total().fn, 1u);
  EXPECT_EQ(m.total().fp, 0u);
}

TEST(MatchTest, ClassMismatch) {
  auto m = MatchDetections({Gt(0, 0, 10, 10, "plane")}, {Det(0, 0, 10, 10, 0.9, "ship")}, Cfg());
  EXPECT_TRUE(m.pairs.empty());
  EXPECT_EQ(m.per_class["plane"].fn, 1u);
  EXPECT_EQ(m.per_class["ship"].fp, 1u);

  MatchConfig loose = Cfg();
  loose.require_class_match = false;
  m = MatchDetections({Gt(0, 0, 10, 10, "plane")}, {Det(0, 0, 10, 10, 0.9, "ship")}, loose);
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_FALSE(m.pairs[0].class_match);
  EXPECT_FALSE(m.pairs[0].true_positive);
  EXPECT_EQ(m.per_class["plane"].fn, 1u);
  EXPECT_EQ(m.per_class["plane"].fn_misclassified, 1u);
  EXPECT_EQ(m.total().tp, 0u);
}

TEST(MatchTest, DifficultIgnoredWhenExcluded) {
  MatchConfig cfg = Cfg();
  cfg.include_difficult = false;
  const auto m = MatchDetections({Gt(0, 0, 10, 10, "plane", true), Gt(50, 50, 60, 60)},
                                 {Det(0, 0, 10, 10, 0.9), Det(50, 50, 60, 60, 0.9)}, cfg);
  EXPECT_EQ(m.det_outcome[0], DetOutcome::kIgnored);
  EXPECT_EQ(m.total().tp, 1u);
  EXPECT_EQ(m.total().fp, 0u);
  EXPECT_EQ(m.total().fn, 0u);
  const auto all = MatchDetections({Gt(0, 0, 10, 10, "plane", true)}, {}, Cfg());
  EXPECT_EQ(all.total().fn, 1u);
}

TEST(MatchTest, ConfigValidation) {
  MatchConfig bad = Cfg();
  bad.iou_threshold = 0;
  EXPECT_THROW(bad.Validate(), Error);
  bad = Cfg();
  bad.min_confidence = 1.5;
  EXPECT_THROW(bad.Validate(), Error);
}

TEST(MatchTest, AgreesWithExhaustiveOracle) {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 500; ++trial) {
    const oracle::IntInstance in = oracle::RandomInstance(rng, 6, 6);
    MatchConfig cfg = Cfg();
    cfg.min_confidence = (trial % 3 == 0) ? 0.0 : 0.3;
    cfg.require_class_match = trial % 4 != 0;
    const auto expect = oracle::BruteForceMatch(in, cfg);
    const auto m = MatchDetections(oracle::ToGroundTruth(in), oracle::ToDetections(in), cfg);
    std::vector<oracle::OraclePair> got;
    for (const MatchedPair& p : m.pairs) {
      got.push_back({p.gt, p.det, p.iou, p.true_positive});
    }
    ASSERT_EQ(got, expect) << "trial " << trial;
  }
}

TEST(MatchTest, StructuralInvariants) {
  std::mt19937_64 rng(556);
  for (int trial = 0; trial < 300; ++trial) {
    const oracle::IntInstance in = oracle::RandomInstance(rng, 12, 12);
    const auto gts = oracle::ToGroundTruth(in);
    const auto dets = oracle::ToDetections(in);
    const MatchConfig cfg = Cfg();
    const auto m = MatchDetections(gts, dets, cfg);
    std::set<size_t> g_used, d_used;
    for (const MatchedPair& p : m.pairs) {
      EXPECT_TRUE(g_used.insert(p.gt).second);
      EXPECT_TRUE(d_used.insert(p.det).second);
      EXPECT_GE(p.iou, cfg.iou_floor);
    }
    std::map<std::string, size_t> n_gt, n_det;
    for (const auto& g : gts) ++n_gt[g.category];
    for (const auto& d : dets) {
      if (d.confidence >= cfg.min_confidence) ++n_det[d.category];
    }
    for (const auto& [cat, c] : m.per_class) {
      EXPECT_EQ(c.tp + c.fn, n_gt[cat]) << cat;
      EXPECT_EQ(c.tp + c.fp, n_det[cat]) << cat;
    }
  }
}

TEST(MatchTest, ConfidenceScalingLeavesPairsUnchanged) {
  std::mt19937_64 rng(557);
  MatchConfig cfg = Cfg();
  cfg.min_confidence = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const oracle::IntInstance in = oracle::RandomInstance(rng, 8, 8);
    const auto gts = oracle::ToGroundTruth(in);
    auto dets = oracle::ToDetections(in);
    const auto before = MatchDetections(gts, dets, cfg);
    for (auto& d : dets) d.confidence *= 0.5;
    const auto after = MatchDetections(gts, dets, cfg);
    ASSERT_EQ(before.pairs.size(), after.pairs.size());
    for (size_t i = 0; i < before.pairs.size(); ++i) {
      EXPECT_EQ(before.pairs[i].gt, after.pairs[i].gt);
      EXPECT_EQ(before.pairs[i].det, after.pairs[i].det);
    }
  }
}

TEST(PrecisionRecallTest, Ratios) {
  EXPECT_EQ(Precision(0, 0), 0.0);
  EXPECT_EQ(Recall(0, 0), 0.0);
  EXPECT_EQ(Precision(5, 5), 0.5);
  EXPECT_DOUBLE_EQ(Recall(25, 29), 25.0 / 54.0);
}

PRCurve Ranked(const std::vector<bool>& outcomes, size_t num_gt) {
  std::vector<RankedDetection> r;
  for (size_t i = 0; i < outcomes.size(); ++i) {
    r.push_back({1.0 - 0.01 * static_cast<double>(i), outcomes[i]});
  }
  return BuildPRCurve("plane", num_gt, r);
}

TEST(ApTest, PerfectAndEmpty) {
  EXPECT_EQ(*InterpolatedAp(Ranked({true, true, true}, 3)), 1.0);
  EXPECT_EQ(*InterpolatedAp(Ranked({false, false}, 3)), 0.0);
  EXPECT_EQ(*InterpolatedAp(Ranked({}, 3)), 0.0);
  EXPECT_FALSE(InterpolatedAp(Ranked({false}, 0)).has_value());
}

TEST(ApTest, HandEnumeratedRanking) {
  // Cut-offs give (precision, recall): (1, .2) (1/2, .2) (2/3, .4) (1/2, .4) (3/5, .6).
  // Interpolated: r in {0,.1,.2} -> 1; {.3,.4} -> 2/3; {.5,.6} -> 3/5; rest 0.
  const double expected = (3.0 + 2.0 * (2.0 / 3.0) + 2.0 * (3.0 / 5.0)) / 11.0;
  const std::vector<bool> outcomes{true, false, true, false, true};
  const double ap = *InterpolatedAp(Ranked(outcomes, 5));
  EXPECT_NEAR(ap, expected, 1e-12);
  EXPECT_NEAR(ap, oracle::ElevenPointApOracle(outcomes, 5), 1e-12);
}

TEST(ApTest, AgreesWithBruteForceOracle) {
  std::mt19937_64 rng(91);
  for (int trial = 0; trial < 500; ++trial) {
    std::uniform_int_distribution<size_t> len(0, 25), gts(0, 20);
    std::vector<bool> outcomes(len(rng));
    size_t tp = 0;
    for (size_t i = 0; i < outcomes.size(); ++i) {
      outcomes[i] = rng() % 2;
      tp += outcomes[i];
    }
    const size_t num_gt = std::max(tp, gts(rng));
    if (num_gt == 0) continue;
    EXPECT_NEAR(*InterpolatedAp(Ranked(outcomes, num_gt)),
                oracle::ElevenPointApOracle(outcomes, num_gt), 1e-12);
  }
}

TEST(ApTest, CurveInvariants) {
  const PRCurve c = Ranked({true, false, true, true, false, false, true}, 6);
  double last_recall = 0;
  for (const PRPoint& p : c.points) {
    EXPECT_GE(p.recall, last_recall);
    EXPECT_GE(p.precision, 0.0);
    EXPECT_LE(p.precision, 1.0);
    EXPECT_LE(p.recall, 1.0);
    last_recall = p.recall;
  }
}

TEST(ApTest, StableForEqualScores) {
  std::vector<RankedDetection> r{{0.5, true}, {0.5, false}};
  const PRCurve c = BuildPRCurve("plane", 1, r);
  EXPECT_EQ(c.points[0].tp, 1u);
  EXPECT_EQ(*InterpolatedAp(c), 1.0);
}

TEST(MeanApTest, Basics) {
  EXPECT_EQ(MeanAp({1.0, 0.0}), 0.5);
  EXPECT_EQ(MeanAp({0.25}), 0.25);
  EXPECT_EQ(MeanAp({0.5, std::nullopt}), 0.5);
  EXPECT_THROW(MeanAp({std::nullopt}), Error);
  EXPECT_THROW(MeanAp({}), Error);
}

TEST(CocoTest, LadderValues) {
  const auto ladder = CocoIouLadder();
  ASSERT_EQ(ladder.size(), 10u);
  EXPECT_EQ(ladder.front(), 0.5);
  EXPECT_EQ(ladder[5], 0.75);
  EXPECT_EQ(ladder.back(), 0.95);
}

TEST(CocoTest, PerfectDetections) {
  GroundTruthSet gts{{"a", {Gt(0, 0, 10, 10), Gt(20, 20, 40, 40, "ship")}}};
  DetectionSet dets{{"a", {Det(0, 0, 10, 10, 0.9), Det(20, 20, 40, 40, 0.8, "ship")}}};
  const CocoSuite s = CocoApSuite(gts, dets, LabelMap::Dota(), EvalConfig{});
  EXPECT_EQ(s.ap_ladder, 1.0);
  EXPECT_EQ(s.ap50, 1.0);
  EXPECT_EQ(s.ap75, 1.0);
}

TEST(CocoTest, UniformIou06) {
  // Each detection has IoU exactly 0.6 with its gt: 60/100.
  GroundTruthSet gts{{"a", {Gt(0, 0, 10, 10), Gt(100, 0, 110, 10)}}};
  DetectionSet dets{{"a", {Det(0, 0, 6, 10, 0.9), Det(100, 0, 106, 10, 0.8)}}};
  const CocoSuite s = CocoApSuite(gts, dets, LabelMap::Dota(), EvalConfig{});
  EXPECT_GT(s.ap50, 0.0);
  EXPECT_EQ(s.ap75, 0.0);
}

TEST(CocoTest, LadderMeanAndMonotonicity) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    GroundTruthSet gts;
    DetectionSet dets;
    for (int img = 0; img < 3; ++img) {
      const oracle::IntInstance in = oracle::RandomInstance(rng, 6, 8);
      gts[std::to_string(img)] = oracle::ToGroundTruth(in);
      dets[std::to_string(img)] = oracle::ToDetections(in);
    }
    bool any_gt = false;
    for (const auto& [_, g] : gts) any_gt |= !g.empty();
    if (!any_gt) continue;
    const CocoSuite s = CocoApSuite(gts, dets, LabelMap::Dota(), EvalConfig{});
    double sum = 0;
    double prev = 2.0;
    for (const auto& [iou, ap] : s.per_threshold) {
      sum += ap;
      EXPECT_LE(ap, prev + 1e-15) << "iou " << iou;
      prev = ap;
    }
    EXPECT_NEAR(s.ap_ladder, sum / static_cast<double>(s.per_threshold.size()), 1e-15);
    EXPECT_EQ(s.ap50, s.per_threshold[0].second);
    EXPECT_EQ(s.ap75, s.per_threshold[5].second);
  }
}

TEST(AccuracyTest, ZeroDetections) {
  const AccuracyCount a = CountAccurate({Gt(0, 0, 1, 1), Gt(5, 5, 6, 6)}, {}, Cfg());
  EXPECT_EQ(a.accurate, 0u);
  EXPECT_EQ(a.total, 2u);
  EXPECT_EQ(a.ratio(), 0.0);
}

TEST(AccuracyTest, ConfidenceAtHalfCounts) {
  const AccuracyCount a =
      CountAccurate({Gt(0, 0, 10, 10), Gt(20, 0, 30, 10)},
                    {Det(0, 0, 10, 10, 0.5), Det(20, 0, 30, 10, 0.49)}, Cfg());
  EXPECT_EQ(a.accurate, 1u);
}

TEST(DatasetEvalTest, PerfectDetectionsGiveMapOne) {
  GroundTruthSet gts{{"x", {Gt(0, 0, 10, 10)}}, {"y", {Gt(0, 0, 5, 5, "ship")}}};
  DetectionSet dets{{"x", {Det(0, 0, 10, 10, 0.99)}}, {"y", {Det(0, 0, 5, 5, 0.7, "ship")}}};
  const DatasetEval e = EvaluateDataset(gts, dets, LabelMap::Dota(), EvalConfig{});
  EXPECT_EQ(e.map, 1.0);
  EXPECT_EQ(e.accuracy.accurate, 2u);
  EXPECT_EQ(e.images.size(), 2u);
}

TEST(DatasetEvalTest, EmptyDetectionsGiveZero) {
  GroundTruthSet gts{{"x", {Gt(0, 0, 10, 10), Gt(20, 20, 30, 30)}}};
  const DatasetEval e = EvaluateDataset(gts, {}, LabelMap::Dota(), EvalConfig{});
  EXPECT_EQ(e.map, 0.0);
  EXPECT_EQ(e.totals.fn, 2u);
}

TEST(DatasetEvalTest, RejectsUnknownCategoryAndNoGroundTruth) {
  GroundTruthSet gts{{"x", {Gt(0, 0, 10, 10)}}};
  DetectionSet bad{{"x", {Det(0, 0, 10, 10, 0.9, "car")}}};
  EXPECT_THROW(EvaluateDataset(gts, bad, LabelMap::Dota(), EvalConfig{}), Error);
  EXPECT_THROW(EvaluateDataset({}, {}, LabelMap::Dota(), EvalConfig{}), Error);
}

TEST(DatasetEvalTest, MapRatioFixture) {
  // Two classes, ten objects each, detections ranked perfectly. A stronger
  // detector recalls 7 of 10 per class (AP 8/11), a weaker one 3 of 10
  // (AP 4/11).
  GroundTruthSet gts;
  DetectionSet strong, weak;
  for (int i = 0; i < 10; ++i) {
    const double x = 20.0 * i;
    gts["img"].push_back(Gt(x, 0, x + 10, 10, "plane"));
    gts["img"].push_back(Gt(x, 100, x + 10, 110, "ship"));
    if (i < 7) {
      strong["img"].push_back(Det(x, 0, x + 10, 10, 0.9 - 0.01 * i, "plane"));
      strong["img"].push_back(Det(x, 100, x + 10, 110, 0.9 - 0.01 * i, "ship"));
    }
    if (i < 3) {
      weak["img"].push_back(Det(x, 0, x + 10, 10, 0.9 - 0.01 * i, "plane"));
      weak["img"].push_back(Det(x, 100, x + 10, 110, 0.9 - 0.01 * i, "ship"));
    }
  }
  const double a = EvaluateDataset(gts, strong, LabelMap::Dota(), EvalConfig{}).map;
  const double b = EvaluateDataset(gts, weak, LabelMap::Dota(), EvalConfig{}).map;
  EXPECT_NEAR(a, 8.0 / 11.0, 1e-12);
  EXPECT_NEAR(b, 4.0 / 11.0, 1e-12);
  EXPECT_NEAR(a / b, 2.0, 1e-12);
}

TEST(DatasetEvalTest, InvariantToInsertionOrder) {
  std::mt19937_64 rng(111);
  std::vector<std::pair<std::string, oracle::IntInstance>> images;
  for (int i = 0; i < 6; ++i) images.push_back({"P" + std::to_string(i), oracle::RandomInstance(rng, 6, 6)});
  images[0].second.gt_boxes.push_back({0, 0, 5, 5});
  images[0].second.gt_cats.push_back("plane");
  images[0].second.gt_difficult.push_back(false);
  auto build = [&](bool reverse) {
    GroundTruthSet g;
    DetectionSet d;
    auto order = images;
    if (reverse) std::reverse(order.begin(), order.end());
    for (const auto& [id, in] : order) {
      g.emplace(id, oracle::ToGroundTruth(in));
      d.emplace(id, oracle::ToDetections(in));
    }
    return EvaluateDataset(g, d, LabelMap::Dota(), EvalConfig{});
  };
  const DatasetEval a = build(false), b = build(true);
  EXPECT_EQ(a.map, b.map);
  EXPECT_EQ(a.coco.ap_ladder, b.coco.ap_ladder);
  EXPECT_EQ(a.accuracy.accurate, b.accuracy.accurate);
}

}  // namespace
}  // namespace detbench
