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

// Independent reference implementations used to check the library. They
// favour brute force and exact integer arithmetic over speed.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <tuple>
#include <vector>

#include "detbench/eval.hpp"
#include "detbench/geometry.hpp"

namespace detbench::oracle {

struct IntBox {
  int64_t x0, y0, x1, y1;
};

struct Rational {
  int64_t num = 0;
  int64_t den = 1;
};

inline int64_t Overlap(int64_t a0, int64_t a1, int64_t b0, int64_t b1) {
  const int64_t lo = a0 > b0 ? a0 : b0;
  const int64_t hi = a1 < b1 ? a1 : b1;
  return hi > lo ? hi - lo : 0;
}

// Interval-overlap IoU as a reduced fraction; 0/1 for an empty union.
inline Rational ExactIou(const IntBox& a, const IntBox& b) {
  const int64_t inter = Overlap(a.x0, a.x1, b.x0, b.x1) * Overlap(a.y0, a.y1, b.y0, b.y1);
  const int64_t area_a = (a.x1 - a.x0) * (a.y1 - a.y0);
  const int64_t area_b = (b.x1 - b.x0) * (b.y1 - b.y0);
  const int64_t uni = area_a + area_b - inter;
  if (uni <= 0 || inter == 0) return {0, 1};
  const int64_t g = std::gcd(inter, uni);
  return {inter / g, uni / g};
}

// Both parts stay below 2^53, so IEEE division yields the correctly rounded
// value of the fraction.
inline double ToDouble(const Rational& r) {
  return static_cast<double>(r.num) / static_cast<double>(r.den);
}

inline Hbb ToHbb(const IntBox& b) {
  return Hbb{static_cast<double>(b.x0), static_cast<double>(b.y0), static_cast<double>(b.x1),
             static_cast<double>(b.y1)};
}

inline IntBox RandomBox(std::mt19937_64& rng, int64_t extent, int64_t max_side) {
  std::uniform_int_distribution<int64_t> pos(0, extent);
  std::uniform_int_distribution<int64_t> side(1, max_side);
  const int64_t x = pos(rng), y = pos(rng);
  return {x, y, x + side(rng), y + side(rng)};
}

// ---------------------------------------------------------------------------
// Matching: enumerate every one-to-one assignment over the candidate pairs
// and keep the one whose descending key sequence is lexicographically
// largest. With a strict total order on keys that is the greedy result.

struct OraclePair {
  size_t gt;
  size_t det;
  double iou;
  bool tp;
  friend bool operator==(const OraclePair&, const OraclePair&) = default;
};

struct IntInstance {
  std::vector<IntBox> gt_boxes;
  std::vector<std::string> gt_cats;
  std::vector<bool> gt_difficult;
  std::vector<IntBox> det_boxes;
  std::vector<std::string> det_cats;
  std::vector<double> det_conf;
};

using Key = std::tuple<double, double, int64_t, int64_t>;  // product, conf, -det, -gt

inline std::vector<OraclePair> BruteForceMatch(const IntInstance& in, const MatchConfig& cfg) {
  const size_t ng = in.gt_boxes.size(), nd = in.det_boxes.size();
  struct Cand {
    size_t gt, det;
    double iou;
    Key key;
  };
  std::vector<std::vector<Cand>> by_gt(ng);
  for (size_t g = 0; g < ng; ++g) {
    for (size_t d = 0; d < nd; ++d) {
      if (in.det_conf[d] < cfg.min_confidence) continue;
      if (cfg.require_class_match && in.gt_cats[g] != in.det_cats[d]) continue;
      const double iou = ToDouble(ExactIou(in.gt_boxes[g], in.det_boxes[d]));
      if (iou <= 0 || iou < cfg.iou_floor) continue;
      by_gt[g].push_back({g, d, iou,
                          Key{iou * in.det_conf[d], in.det_conf[d], -static_cast<int64_t>(d),
                              -static_cast<int64_t>(g)}});
    }
  }

  std::vector<Key> best_keys;
  std::vector<Cand> best, current;
  std::vector<bool> used(nd, false);
  auto better = [](std::vector<Key> a, std::vector<Key> b) {
    std::sort(a.rbegin(), a.rend());
    std::sort(b.rbegin(), b.rend());
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
  };
  auto recurse = [&](auto&& self, size_t g) -> void {
    if (g == ng) {
      std::vector<Key> keys;
      for (const Cand& c : current) keys.push_back(c.key);
      if (better(keys, best_keys)) {
        best_keys = keys;
        best = current;
      }
      return;
    }
    self(self, g + 1);
    for (const Cand& c : by_gt[g]) {
      if (used[c.det]) continue;
      used[c.det] = true;
      current.push_back(c);
      self(self, g + 1);
      current.pop_back();
      used[c.det] = false;
    }
  };
  recurse(recurse, 0);

  std::vector<OraclePair> out;
  for (const Cand& c : best) {
    out.push_back({c.gt, c.det, c.iou,
                   c.iou >= cfg.iou_threshold && in.gt_cats[c.gt] == in.det_cats[c.det]});
  }
  std::sort(out.begin(), out.end(),
            [](const OraclePair& a, const OraclePair& b) { return a.gt < b.gt; });
  return out;
}

inline std::vector<GroundTruthBox> ToGroundTruth(const IntInstance& in) {
  std::vector<GroundTruthBox> out;
  for (size_t i = 0; i < in.gt_boxes.size(); ++i) {
    GroundTruthBox g;
    g.hbb = ToHbb(in.gt_boxes[i]);
    g.quad = QuadFromHbb(g.hbb);
    g.category = in.gt_cats[i];
    g.difficult = in.gt_difficult.empty() ? false : static_cast<bool>(in.gt_difficult[i]);
    out.push_back(g);
  }
  return out;
}

inline std::vector<Detection> ToDetections(const IntInstance& in) {
  std::vector<Detection> out;
  for (size_t i = 0; i < in.det_boxes.size(); ++i) {
    out.push_back({ToHbb(in.det_boxes[i]), in.det_cats[i], in.det_conf[i]});
  }
  return out;
}

// Clustered boxes so that many pairs overlap; confidences from a coarse grid
// so that ties occur.
inline IntInstance RandomInstance(std::mt19937_64& rng, size_t max_gts, size_t max_dets) {
  static const std::vector<std::string> kCats{"plane", "ship", "harbor"};
  std::uniform_int_distribution<size_t> ng(0, max_gts), nd(0, max_dets);
  std::uniform_int_distribution<size_t> cat(0, kCats.size() - 1);
  std::uniform_int_distribution<int> conf(1, 20);
  IntInstance in;
  const size_t g = ng(rng), d = nd(rng);
  for (size_t i = 0; i < g; ++i) {
    in.gt_boxes.push_back(RandomBox(rng, 30, 25));
    in.gt_cats.push_back(kCats[cat(rng)]);
    in.gt_difficult.push_back(false);
  }
  for (size_t i = 0; i < d; ++i) {
    in.det_boxes.push_back(RandomBox(rng, 30, 25));
    in.det_cats.push_back(kCats[cat(rng)]);
    in.det_conf.push_back(conf(rng) / 20.0);
  }
  return in;
}

// ---------------------------------------------------------------------------
// 11-point AP straight from the definition: for every recall level r, the
// best precision over all confidence cut-offs whose recall reaches r.

inline double ElevenPointApOracle(const std::vector<bool>& ranked_tp, size_t num_gt) {
  double sum = 0;
  for (int k = 0; k <= 10; ++k) {
    double best = 0;
    for (size_t cut = 1; cut <= ranked_tp.size(); ++cut) {
      const size_t tp = static_cast<size_t>(
          std::count(ranked_tp.begin(), ranked_tp.begin() + static_cast<std::ptrdiff_t>(cut), true));
      if (tp * 10 < static_cast<size_t>(k) * num_gt) continue;
      best = std::max(best, static_cast<double>(tp) / static_cast<double>(cut));
    }
    sum += best;
  }
  return sum / 11.0;
}

}  // namespace detbench::oracle
