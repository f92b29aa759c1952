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
#include "tabstruct/misalign.h"

#include <gtest/gtest.h>

#include "tabstruct/error.h"
#include "tabstruct/fixtures.h"
#include "tabstruct/reconstruct.h"

namespace tabstruct {
namespace {

using CC = ComponentClass;

AnnotationSet Sample() {
  return {"img",
          {{BBox(0, 0, 100, 40), CC::kTable, {}},
           {BBox(0, 0, 50, 40), CC::kColumn, {}},
           {BBox(50, 0, 100, 40), CC::kColumn, {}},
           {BBox(0, 0, 100, 20), CC::kRow, {}},
           {BBox(0, 20, 100, 40), CC::kRow, {}}},
          LabelMode::kMultiLabel};
}

TEST(PerturbationSpecTest, ParseAndLabel) {
  const PerturbationSpec shrink = ParsePerturbationSpec("shrink:35%");
  EXPECT_EQ(shrink.mode, PerturbationMode::kShrink);
  EXPECT_EQ(shrink.unit, MagnitudeUnit::kFraction);
  EXPECT_DOUBLE_EQ(shrink.magnitude, 0.35);
  EXPECT_EQ(shrink.target_classes, std::set<CC>{CC::kColumn});
  EXPECT_EQ(shrink.Label(), "shrink:35%:column");

  const PerturbationSpec dilate = ParsePerturbationSpec("dilate:2:row+column");
  EXPECT_EQ(dilate.unit, MagnitudeUnit::kPixels);
  EXPECT_EQ(dilate.Label(), "dilate:2:column+row");
  EXPECT_EQ(ParsePerturbationSpec("merge:1").target_classes,
            std::set<CC>{CC::kRow});
  EXPECT_EQ(ParsePerturbationSpec("snap:0:spanning_cell").Label(),
            "snap:0:spanning_cell");

  for (const char* bad : {"", "dilate", "blur:2", "dilate:x", "dilate:-1",
                          "merge:1.5", "merge:1%", "dilate:2:cell",
                          "dilate:2:row:extra"}) {
    EXPECT_THROW(ParsePerturbationSpec(bad), Error) << bad;
  }
}

TEST(PerturbTest, DilateAndShrink) {
  const AnnotationSet gt = Sample();
  const AnnotationSet dilated =
      Perturb(gt, {}, ParsePerturbationSpec("dilate:2:column"));
  EXPECT_EQ(dilated.instances[1].box, BBox(-2, -2, 52, 42));
  EXPECT_EQ(dilated.instances[3].box, gt.instances[3].box);
  for (const auto& inst : dilated.instances) EXPECT_EQ(inst.confidence, 1.0);

  const AnnotationSet shrunk =
      Perturb(gt, {}, ParsePerturbationSpec("shrink:10%:row"));
  EXPECT_EQ(shrunk.instances[3].box, BBox(10, 2, 90, 18));

  EXPECT_THROW(Perturb(gt, {}, ParsePerturbationSpec("shrink:50%:row")), Error);
  try {
    Perturb(gt, {}, ParsePerturbationSpec("shrink:20:row"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kGeometry);
  }
}

TEST(PerturbTest, IdentityKeepsScores) {
  FixtureSpec spec;
  spec.n_images = 6;
  spec.span_probability = 0.5;
  const FixtureSet set = GenerateFixtures(spec);
  const auto rows = MisalignmentReport(
      set.ground_truth, {ParsePerturbationSpec("dilate:0")});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].mean_ap, 1.0);
  EXPECT_EQ(rows[0].teds, 1.0);
}

TEST(PerturbTest, SnapNeedsExtents) {
  const AnnotationSet gt = Sample();
  const PerturbationSpec snap = ParsePerturbationSpec("snap:0:column");
  EXPECT_THROW(Perturb(gt, {}, snap), Error);
  std::vector<BBox> extents;
  for (const auto& inst : gt.instances) extents.push_back(inst.box.Expanded(-3));
  const AnnotationSet snapped = Perturb(gt, extents, snap);
  EXPECT_EQ(snapped.instances[1].box, BBox(3, 3, 47, 37));
  EXPECT_LT(Iou(snapped.instances[1].box, gt.instances[1].box), 1.0);
  EXPECT_EQ(snapped.instances[0].box, gt.instances[0].box);
  EXPECT_EQ(ReconstructHtml(snapped), ReconstructHtml(gt));
}

TEST(PerturbTest, MergeReplacesPairWithUnion) {
  const AnnotationSet gt = Sample();
  const AnnotationSet merged =
      Perturb(gt, {}, ParsePerturbationSpec("merge:1:row"));
  ASSERT_EQ(merged.instances.size(), gt.instances.size() - 1);
  int rows = 0;
  for (const auto& inst : merged.instances) {
    if (inst.cls != CC::kRow) continue;
    ++rows;
    EXPECT_EQ(inst.box, BBox(0, 0, 100, 40));
  }
  EXPECT_EQ(rows, 1);
  // More pairs than available merges what it can.
  const AnnotationSet many =
      Perturb(gt, {}, ParsePerturbationSpec("merge:5:column"));
  EXPECT_EQ(many.instances.size(), gt.instances.size() - 1);
}

TEST(PerturbTest, MergeIsDeterministicAndDisjoint) {
  FixtureSpec spec;
  spec.n_images = 10;
  spec.min_rows = 6;
  spec.max_rows = 10;
  const FixtureSet set = GenerateFixtures(spec);
  PerturbationSpec merge = ParsePerturbationSpec("merge:2:row");
  for (const auto& record : set.ground_truth.images) {
    const AnnotationSet gt = ToAnnotationSet(record, LabelMode::kMultiLabel);
    const AnnotationSet a = Perturb(gt, {}, merge);
    const AnnotationSet b = Perturb(gt, {}, merge);
    EXPECT_EQ(a.instances, b.instances);
    EXPECT_EQ(a.instances.size(), gt.instances.size() - 2);
    // Merged rows still tile the table without overlap.
    double covered = 0.0;
    double table_height = 0.0;
    for (const auto& inst : a.instances) {
      if (inst.cls == CC::kRow) covered += inst.box.height();
      if (inst.cls == CC::kTable) table_height = inst.box.height();
    }
    EXPECT_DOUBLE_EQ(covered, table_height);
  }
}

TEST(MisalignmentReportTest, OversizedBoxPattern) {
  const CorpusFile fixture = OversizedBoxFixture();
  const std::vector<PerturbationSpec> specs = OversizedBoxSpecs();
  ASSERT_EQ(specs.size(), 5u);
  const auto rows = MisalignmentReport(fixture, specs);
  ASSERT_EQ(rows.size(), 5u);
  const auto& identity = rows[0];
  const auto& shrink = rows[1];
  const auto& snap = rows[2];
  const auto& dilate = rows[3];
  const auto& merge = rows[4];
  EXPECT_EQ(identity.mean_ap, 1.0);
  EXPECT_EQ(identity.teds, 1.0);
  EXPECT_GT(dilate.mean_ap, snap.mean_ap);
  EXPECT_EQ(dilate.teds, snap.teds);
  EXPECT_LT(merge.teds, snap.teds);
  EXPECT_EQ(shrink.teds, 1.0);
  // Boxes tighter than the annotation lose mAP but keep structure; merging
  // loses structure at a smaller mAP cost.
  EXPECT_LT(shrink.mean_ap, merge.mean_ap);
  EXPECT_GT(shrink.teds, merge.teds);

  const std::string csv = MisalignmentCsv(rows);
  EXPECT_EQ(csv.rfind("spec,mAP,TEDS\n", 0), 0u);
  EXPECT_NE(csv.find("shrink:35%:column,"), std::string::npos);
  EXPECT_NE(csv.find("1.000000,1.000000"), std::string::npos);
}

TEST(MisalignmentReportTest, Errors) {
  CorpusFile no_html = OversizedBoxFixture();
  no_html.images[0].html.reset();
  EXPECT_THROW(MisalignmentReport(no_html, OversizedBoxSpecs()), Error);
  CorpusFile single = OversizedBoxFixture();
  single.label_mode = LabelMode::kSingleLabel;
  EXPECT_THROW(MisalignmentReport(single, OversizedBoxSpecs()), Error);
}

}  // namespace
}  // namespace tabstruct
