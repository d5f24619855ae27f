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

#include <array>
#include <cstdint>

namespace detbench {

// Axis-aligned box over continuous pixel coordinates. Field order is
// always (xmin, ymin, xmax, ymax); serializers convert at the boundary.
struct Hbb {
  double xmin = 0;
  double ymin = 0;
  double xmax = 0;
  double ymax = 0;

  // Throws kInvalidArgument when xmin > xmax, ymin > ymax or a value is
  // not finite.
  static Hbb Make(double xmin, double ymin, double xmax, double ymax);

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
  bool valid() const;

  friend bool operator==(const Hbb&, const Hbb&) = default;
};

struct Point {
  double x = 0;
  double y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

// Four source corners of a DOTA instance, in file order.
using Quad = std::array<Point, 4>;

// Envelope of the quadrilateral. Throws kMalformedAnnotation on a
// non-finite coordinate.
Hbb HbbFromQuad(const Quad& quad);

Quad QuadFromHbb(const Hbb& box);

// Intersection over union; 0 when the union is empty.
double Iou(const Hbb& a, const Hbb& b);

// Intersection rectangle, or false when the boxes do not touch.
bool Intersect(const Hbb& a, const Hbb& b, Hbb* out);

}  // namespace detbench
