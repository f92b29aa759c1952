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
#include "tabstruct/geometry.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "tabstruct/error.h"

namespace tabstruct {

BBox::BBox(double x1, double y1, double x2, double y2)
    : x1_(x1), y1_(y1), x2_(x2), y2_(y2) {
  if (!(std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
        std::isfinite(y2))) {
    throw Error(ErrorCategory::kGeometry, "box has non-finite coordinates");
  }
  if (x2 < x1 || y2 < y1) {
    throw Error(ErrorCategory::kGeometry,
                fmt::format("inverted box ({}, {}, {}, {})", x1, y1, x2, y2));
  }
}

BBox BBox::Translated(double dx, double dy) const {
  return BBox(x1_ + dx, y1_ + dy, x2_ + dx, y2_ + dy);
}

BBox BBox::Expanded(double margin) const {
  return BBox(x1_ - margin, y1_ - margin, x2_ + margin, y2_ + margin);
}

std::string BBox::ToString() const {
  return fmt::format("[{}, {}, {}, {}]", x1_, y1_, x2_, y2_);
}

std::optional<BBox> Intersection(const BBox& a, const BBox& b) {
  const double x1 = std::max(a.x1(), b.x1());
  const double y1 = std::max(a.y1(), b.y1());
  const double x2 = std::min(a.x2(), b.x2());
  const double y2 = std::min(a.y2(), b.y2());
  if (x2 < x1 || y2 < y1) return std::nullopt;
  return BBox(x1, y1, x2, y2);
}

double IntersectionArea(const BBox& a, const BBox& b) {
  const double w = std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1());
  const double h = std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1());
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

BBox Hull(const BBox& a, const BBox& b) {
  return BBox(std::min(a.x1(), b.x1()), std::min(a.y1(), b.y1()),
              std::max(a.x2(), b.x2()), std::max(a.y2(), b.y2()));
}

double Iou(const BBox& a, const BBox& b) {
  const double inter = IntersectionArea(a, b);
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

SizeBucket ClassifySize(const BBox& box) {
  const double area = box.area();
  if (area < kSmallAreaLimit) return SizeBucket::kSmall;
  if (area < kMediumAreaLimit) return SizeBucket::kMedium;
  return SizeBucket::kLarge;
}

double AspectRatio(const BBox& box) {
  if (box.width() <= 0.0) {
    throw Error(ErrorCategory::kGeometry,
                "aspect ratio of zero-width box " + box.ToString());
  }
  return box.height() / box.width();
}

bool BoxesMatch(const BBox& a, const BBox& b, double tolerance) {
  return std::abs(a.x1() - b.x1()) <= tolerance &&
         std::abs(a.y1() - b.y1()) <= tolerance &&
         std::abs(a.x2() - b.x2()) <= tolerance &&
         std::abs(a.y2() - b.y2()) <= tolerance;
}

}  // namespace tabstruct
