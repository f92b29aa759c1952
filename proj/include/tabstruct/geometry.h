// Copyright 2026 The TabStruct Authors. All Rights Reserved.
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
#ifndef TABSTRUCT_GEOMETRY_H_
#define TABSTRUCT_GEOMETRY_H_

#include <optional>
#include <string>

namespace tabstruct {

// Axis-aligned box in continuous pixel coordinates, origin top-left.
// Construction enforces x2 >= x1 and y2 >= y1.
class BBox {
 public:
  BBox() = default;
  BBox(double x1, double y1, double x2, double y2);

  double x1() const { return x1_; }
  double y1() const { return y1_; }
  double x2() const { return x2_; }
  double y2() const { return y2_; }

  double width() const { return x2_ - x1_; }
  double height() const { return y2_ - y1_; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x1_ + x2_); }
  double center_y() const { return 0.5 * (y1_ + y2_); }

  BBox Translated(double dx, double dy) const;
  // Moves every side outward by `margin` (inward when negative). Throws a
  // geometry error if the result would be inverted.
  BBox Expanded(double margin) const;

  bool Contains(double x, double y) const {
    return x >= x1_ && x <= x2_ && y >= y1_ && y <= y2_;
  }

  std::string ToString() const;

  friend bool operator==(const BBox&, const BBox&) = default;

 private:
  double x1_ = 0.0;
  double y1_ = 0.0;
  double x2_ = 0.0;
  double y2_ = 0.0;
};

enum class SizeBucket { kSmall, kMedium, kLarge };

inline constexpr double kSmallAreaLimit = 32.0 * 32.0;
inline constexpr double kMediumAreaLimit = 64.0 * 64.0;

std::optional<BBox> Intersection(const BBox& a, const BBox& b);
double IntersectionArea(const BBox& a, const BBox& b);
// Smallest box containing both.
BBox Hull(const BBox& a, const BBox& b);

// Intersection over union. Zero when the union has zero area, which includes
// two identical zero-area boxes.
double Iou(const BBox& a, const BBox& b);

// Small below 32^2, Medium in [32^2, 64^2), Large from 64^2 up.
SizeBucket ClassifySize(const BBox& box);

// Height over width. Throws a geometry error for zero-width boxes.
double AspectRatio(const BBox& box);

// True when all four coordinates differ by at most `tolerance`.
bool BoxesMatch(const BBox& a, const BBox& b, double tolerance);

}  // namespace tabstruct

#endif  // TABSTRUCT_GEOMETRY_H_
