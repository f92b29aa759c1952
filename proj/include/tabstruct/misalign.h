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
#ifndef TABSTRUCT_MISALIGN_H_
#define TABSTRUCT_MISALIGN_H_

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tabstruct/formats.h"
#include "tabstruct/labelspace.h"

namespace tabstruct {

enum class PerturbationMode { kDilate, kShrink, kSnapToMinimal, kMergeAdjacent };

std::string_view PerturbationModeName(PerturbationMode mode);

enum class MagnitudeUnit { kPixels, kFraction };

// Dilate(m) moves every side of a targeted box outward by m; Shrink(m) moves
// every side inward by m. In kFraction units m is relative to the box width
// (left/right) and height (top/bottom). SnapToMinimal replaces a targeted
// box with its content extent and ignores the magnitude. MergeAdjacent
// replaces m disjoint pairs of neighbouring targeted boxes with their union.
struct PerturbationSpec {
  PerturbationMode mode = PerturbationMode::kDilate;
  double magnitude = 0.0;
  MagnitudeUnit unit = MagnitudeUnit::kPixels;
  std::set<ComponentClass> target_classes = {ComponentClass::kColumn};
  std::uint64_t seed = 0;

  // Throws a config error for a negative or non-finite magnitude, a
  // fractional merge count or an empty target set.
  void Validate() const;

  // "shrink:35%:column", "dilate:2:column+row", "snap:0:column".
  std::string Label() const;
};

// Parses mode:magnitude[:class+class...] with modes dilate, shrink, snap and
// merge. A trailing '%' marks a fractional magnitude. Classes default to
// column, or row for merge. Throws a config error on malformed text.
PerturbationSpec ParsePerturbationSpec(std::string_view text);

// Perturbed copy of multi-label ground truth with every confidence set to
// 1.0. `content_extents` runs parallel to `gt.instances` and may be empty
// unless the mode is SnapToMinimal. Shrinking a box to nothing throws a
// geometry error.
AnnotationSet Perturb(const AnnotationSet& gt,
                      const std::vector<BBox>& content_extents,
                      const PerturbationSpec& spec);

struct MisalignmentRow {
  std::string label;
  double mean_ap = 0.0;
  double teds = 0.0;
};

// For each spec in order: perturb every image, score the perturbed set with
// COCO mAP against the ground truth, and reconstruct it into HTML scored by
// TEDS against the ground-truth HTML. Images whose prediction cannot be
// reconstructed score TEDS 0.
std::vector<MisalignmentRow> MisalignmentReport(
    const CorpusFile& ground_truth, const std::vector<PerturbationSpec>& specs);

// "spec,mAP,TEDS" with six decimals.
std::string MisalignmentCsv(const std::vector<MisalignmentRow>& rows);

// Ground truth whose boxes are larger than the content they enclose, with
// the content extents recorded per component.
CorpusFile OversizedBoxFixture();

// Identity, Shrink(35%) on columns, SnapToMinimal on columns, Dilate(2px) on
// columns, and MergeAdjacent(1) on rows.
std::vector<PerturbationSpec> OversizedBoxSpecs();

}  // namespace tabstruct

#endif  // TABSTRUCT_MISALIGN_H_
