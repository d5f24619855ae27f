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

#include "detbench/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "detbench/error.hpp"

namespace detbench {

Hbb Hbb::Make(double xmin, double ymin, double xmax, double ymax) {
  Hbb box{xmin, ymin, xmax, ymax};
  if (!box.valid()) {
    std::ostringstream msg;
    msg << "invalid box (" << xmin << ", " << ymin << ", " << xmax << ", " << ymax
        << ")";
    throw Error(ErrorKind::kInvalidArgument, msg.str());
  }
  return box;
}

bool Hbb::valid() const {
  return std::isfinite(xmin) && std::isfinite(ymin) && std::isfinite(xmax) &&
         std::isfinite(ymax) && xmin <= xmax && ymin <= ymax;
}

Hbb HbbFromQuad(const Quad& quad) {
  for (const Point& p : quad) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorKind::kMalformedAnnotation, "non-finite quad coordinate");
    }
  }
  Hbb box{quad[0].x, quad[0].y, quad[0].x, quad[0].y};
  for (const Point& p : quad) {
    box.xmin = std::min(box.xmin, p.x);
    box.xmax = std::max(box.xmax, p.x);
    box.ymin = std::min(box.ymin, p.y);
    box.ymax = std::max(box.ymax, p.y);
  }
  return box;
}

Quad QuadFromHbb(const Hbb& box) {
  return {Point{box.xmin, box.ymin}, Point{box.xmax, box.ymin},
          Point{box.xmax, box.ymax}, Point{box.xmin, box.ymax}};
}

// Keep the arithmetic order in sync with the simd iou_row kernels; the
// equivalence tests compare bit patterns.
double Iou(const Hbb& a, const Hbb& b) {
  const double iw = std::max(0.0, std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin));
  const double ih = std::max(0.0, std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin));
  const double inter = iw * ih;
  const double area_a = (a.xmax - a.xmin) * (a.ymax - a.ymin);
  const double area_b = (b.xmax - b.xmin) * (b.ymax - b.ymin);
  const double uni = (area_a + area_b) - inter;
  if (!(uni > 0)) return 0.0;
  return inter / uni;
}

bool Intersect(const Hbb& a, const Hbb& b, Hbb* out) {
  Hbb r{std::max(a.xmin, b.xmin), std::max(a.ymin, b.ymin), std::min(a.xmax, b.xmax),
        std::min(a.ymax, b.ymax)};
  if (r.xmin > r.xmax || r.ymin > r.ymax) return false;
  if (out != nullptr) *out = r;
  return true;
}

}  // namespace detbench
