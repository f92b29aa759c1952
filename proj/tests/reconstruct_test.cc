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
#include "tabstruct/reconstruct.h"

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "tabstruct/error.h"
#include "tabstruct/fixtures.h"
#include "tabstruct/teds.h"

namespace tabstruct {
namespace {

using CC = ComponentClass;

// 2 x 2 lattice on a 100 x 40 table.
std::vector<ComponentInstance> TwoByTwo() {
  return {{BBox(0, 0, 100, 40), CC::kTable, 0.9},
          {BBox(0, 0, 50, 40), CC::kColumn, 0.9},
          {BBox(50, 0, 100, 40), CC::kColumn, 0.9},
          {BBox(0, 0, 100, 20), CC::kRow, 0.9},
          {BBox(0, 20, 100, 40), CC::kRow, 0.9}};
}

AnnotationSet Multi(std::vector<ComponentInstance> instances) {
  return {"img", std::move(instances), LabelMode::kMultiLabel};
}

constexpr char kPlain[] =
    "<table><tbody><tr><td></td><td></td></tr><tr><td></td><td></td></tr>"
    "</tbody></table>";

TEST(ReconstructTest, PlainGrid) {
  EXPECT_EQ(ReconstructHtml(Multi(TwoByTwo())), kPlain);
}

TEST(ReconstructTest, SpanningCell) {
  auto in = TwoByTwo();
  in.push_back({BBox(0, 0, 100, 20), CC::kSpanningCell, 0.9});
  EXPECT_EQ(ReconstructHtml(Multi(in)),
            "<table><tbody><tr><td colspan=\"2\"></td></tr>"
            "<tr><td></td><td></td></tr></tbody></table>");
  auto vertical = TwoByTwo();
  vertical.push_back({BBox(1, 1, 49, 39), CC::kSpanningCell, 0.9});
  EXPECT_EQ(ReconstructHtml(Multi(vertical)),
            "<table><tbody><tr><td rowspan=\"2\"></td><td></td></tr>"
            "<tr><td></td></tr></tbody></table>");
}

TEST(ReconstructTest, HeaderAndProjectedRow) {
  auto in = TwoByTwo();
  in.push_back({BBox(0, 0, 100, 20), CC::kColumnHeader, 0.9});
  in.push_back({BBox(0, 20, 100, 40), CC::kProjectedRowHeader, 0.9});
  const TableGrid grid = BuildGrid(Multi(in));
  EXPECT_EQ(grid.header_rows(), std::set<int>{0});
  EXPECT_EQ(grid.projected_rows(), std::set<int>{1});
  EXPECT_EQ(ClassifyComplexity(grid), TableComplexity::kComplex);
  EXPECT_EQ(GridToHtml(grid),
            "<table><thead><tr><td></td><td></td></tr></thead>"
            "<tbody><tr><td colspan=\"2\"></td></tr></tbody></table>");
}

TEST(ReconstructTest, SingleLabelInputIsDecoded) {
  std::vector<ComponentInstance> in = {
      {BBox(0, 0, 100, 40), CC::kTable, 0.9},
      {BBox(0, 0, 50, 40), CC::kColumn, 0.9},
      {BBox(50, 0, 100, 40), CC::kColumn, 0.9},
      {BBox(0, 0, 100, 20), CC::kPseudoHeaderRow, 0.9},
      {BBox(0, 20, 100, 40), CC::kRow, 0.9}};
  EXPECT_EQ(ReconstructHtml({"img", in, LabelMode::kSingleLabel}),
            "<table><thead><tr><td></td><td></td></tr></thead>"
            "<tbody><tr><td></td><td></td></tr></tbody></table>");
  EXPECT_THROW(BuildGrid({"img", in, LabelMode::kSingleLabel}), Error);
}

TEST(ReconstructTest, ThresholdAndNms) {
  auto in = TwoByTwo();
  in.push_back({BBox(0, 20, 100, 30), CC::kRow, 0.2});  // below threshold
  in.push_back({BBox(0, 1, 100, 21), CC::kRow, 0.8});   // duplicate of row 0
  EXPECT_EQ(ReconstructHtml(Multi(in)), kPlain);

  ReconstructionConfig cfg;
  cfg.score_thresholds[ClassId(CC::kRow)] = 0.1;
  cfg.nms_iou = 1.0;
  EXPECT_EQ(BuildGrid(Multi(in), cfg).n_rows(), 4);
}

TEST(ReconstructTest, Errors) {
  std::vector<ComponentInstance> no_rows = {
      {BBox(0, 0, 100, 40), CC::kTable, 0.9},
      {BBox(0, 0, 50, 40), CC::kColumn, 0.9}};
  try {
    BuildGrid(Multi(no_rows));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kEmptyStructure);
  }
  ReconstructionConfig bad;
  bad.nms_iou = 1.5;
  EXPECT_THROW(bad.Validate(), Error);
  EXPECT_THROW(BuildGrid(Multi(TwoByTwo()), bad), Error);
}

TEST(TableGridTest, RejectsBrokenInvariants) {
  EXPECT_THROW(TableGrid::Create(0, 2, {}), Error);
  EXPECT_THROW(TableGrid::Create(2, 2, {{1, 1, 2, 1}}), Error);
  EXPECT_THROW(TableGrid::Create(3, 3, {{0, 0, 2, 2}, {1, 1, 2, 2}}), Error);
  EXPECT_THROW(TableGrid::Create(3, 3, {{0, 0, 2, 1}}, {}, {1}), Error);
  const TableGrid ok = TableGrid::Create(3, 3, {{0, 0, 2, 2}}, {}, {2});
  EXPECT_EQ(ok.cell(1, 1).anchor_row, 0);
  EXPECT_EQ(ok.cell(1, 1).anchor_col, 0);
  EXPECT_EQ(ok.cell(2, 2).anchor_col, 0);
}

FixtureSet Tables(std::uint64_t seed, int n) {
  FixtureSpec spec;
  spec.n_images = n;
  spec.span_probability = 0.6;
  spec.header_probability = 0.6;
  spec.projected_row_probability = 0.3;
  spec.seed = seed;
  return GenerateFixtures(spec);
}

TEST(ReconstructPropertyTest, HtmlRoundTripsToLattice) {
  const FixtureSet set = Tables(31, 120);
  for (const TableGrid& grid : set.grids) {
    const std::string html = GridToHtml(grid);
    const CellLattice lattice = ExpandTableTree(ParseTableHtml(html));
    EXPECT_EQ(lattice, grid.Lattice()) << html;
    int area = 0;
    for (const auto& cell : lattice.cells) area += cell.row_span * cell.col_span;
    EXPECT_EQ(area, grid.n_rows() * grid.n_cols()) << html;
    EXPECT_EQ(IsComplexTree(ParseTableHtml(html)),
              ClassifyComplexity(grid) == TableComplexity::kComplex);
  }
}

TEST(ReconstructPropertyTest, PerfectDetectionsReproduceHtml) {
  const FixtureSet set = Tables(32, 120);
  std::mt19937_64 rng(33);
  for (std::size_t i = 0; i < set.predictions.images.size(); ++i) {
    AnnotationSet pred =
        ToAnnotationSet(set.predictions.images[i], LabelMode::kMultiLabel);
    const std::string& expected = *set.ground_truth.images[i].html;
    EXPECT_EQ(ReconstructHtml(pred), expected);
    std::shuffle(pred.instances.begin(), pred.instances.end(), rng);
    EXPECT_EQ(ReconstructHtml(pred), expected);
    EXPECT_EQ(ReconstructHtml(EncodePseudo(pred)), expected);
  }
}

TEST(ExpandTableTreeTest, RejectsRaggedLayouts) {
  EXPECT_THROW(ExpandTableTree(ParseTableHtml(
                   "<table><tr><td></td><td></td></tr><tr><td></td></tr>"
                   "</table>")),
               Error);
  EXPECT_THROW(ExpandTableTree(ParseTableHtml(
                   "<table><tr><td rowspan=\"3\"></td></tr><tr></tr></table>")),
               Error);
}

}  // namespace
}  // namespace tabstruct
