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
#ifndef TABSTRUCT_LABELSPACE_H_
#define TABSTRUCT_LABELSPACE_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tabstruct/geometry.h"

namespace tabstruct {

// Table component classes. Indices 0-5 form the multi-label vocabulary;
// kPseudoHeaderRow only exists in the single-label vocabulary, where it
// stands for a Row and a ColumnHeader sharing one box.
enum class ComponentClass : int {
  kTable = 0,
  kColumn = 1,
  kRow = 2,
  kSpanningCell = 3,
  kProjectedRowHeader = 4,
  kColumnHeader = 5,
  kPseudoHeaderRow = 6,
};

inline constexpr int kNumMultiLabelClasses = 6;
inline constexpr int kNumSingleLabelClasses = 7;

inline constexpr std::array<ComponentClass, kNumMultiLabelClasses>
    kMultiLabelClasses = {
        ComponentClass::kTable,        ComponentClass::kColumn,
        ComponentClass::kRow,          ComponentClass::kSpanningCell,
        ComponentClass::kProjectedRowHeader, ComponentClass::kColumnHeader,
};

std::string_view ClassName(ComponentClass cls);
// Throws an input error for ids outside 0-6.
ComponentClass ClassFromId(int id);
inline int ClassId(ComponentClass cls) { return static_cast<int>(cls); }

enum class LabelMode { kMultiLabel, kSingleLabel };

std::string_view ModeName(LabelMode mode);

struct ComponentInstance {
  BBox box;
  ComponentClass cls = ComponentClass::kTable;
  // Absent for ground truth. Lies in [0, 1] when present.
  std::optional<double> confidence;

  friend bool operator==(const ComponentInstance&,
                         const ComponentInstance&) = default;
};

struct AnnotationSet {
  std::string image_id;
  std::vector<ComponentInstance> instances;
  LabelMode mode = LabelMode::kMultiLabel;
};

inline constexpr double kDefaultBoxMatchTolerance = 1.0;

// Multi-label ground truth to single-label ground truth:
//  1. every Row coinciding with a ProjectedRowHeader is dropped;
//  2. every remaining Row coinciding with a ColumnHeader is fused with it
//     into one PseudoHeaderRow carrying the Row's box;
//  3. everything else passes through in input order.
// Throws a mode error on single-label input and a consistency error when any
// two output instances of different classes still share a box.
AnnotationSet EncodePseudo(const AnnotationSet& gt,
                           double box_match_tolerance = kDefaultBoxMatchTolerance);

// Single-label predictions back to the multi-label vocabulary:
// ProjectedRowHeader -> itself + Row, PseudoHeaderRow -> Row + ColumnHeader.
// Throws a mode error on multi-label input and an input error when only some
// instances carry confidences.
AnnotationSet DecodePseudo(const AnnotationSet& pred);

// Checks the single-label invariant: no two instances with different classes
// share a box within `tolerance`. Returns a description of the first clash.
std::optional<std::string> FindSharedBox(
    const std::vector<ComponentInstance>& instances, double tolerance);

}  // namespace tabstruct

#endif  // TABSTRUCT_LABELSPACE_H_
