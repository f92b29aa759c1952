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
#ifndef TABSTRUCT_RECONSTRUCT_H_
#define TABSTRUCT_RECONSTRUCT_H_

#include <array>
#include <compare>
#include <set>
#include <string>
#include <vector>

#include "tabstruct/labelspace.h"
#include "tabstruct/teds.h"

namespace tabstruct {

struct MergedCell {
  int row_start = 0;
  int col_start = 0;
  int row_span = 1;
  int col_span = 1;

  friend auto operator<=>(const MergedCell&, const MergedCell&) = default;
};

// One logical cell of the lattice, anchored at its top-left position.
struct LogicalCell {
  int row = 0;
  int col = 0;
  int row_span = 1;
  int col_span = 1;

  friend auto operator<=>(const LogicalCell&, const LogicalCell&) = default;
};

// Flattened cell layout; the common ground for comparing a TableGrid with a
// parsed HTML tree.
struct CellLattice {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<LogicalCell> cells;  // sorted
  std::set<int> header_rows;

  friend bool operator==(const CellLattice&, const CellLattice&) = default;
};

struct CellRef {
  int anchor_row = 0;
  int anchor_col = 0;
};

// Logical r x c lattice. Merged regions are rectangular, disjoint and inside
// the grid. A projected row is a single full-width cell and may not overlap
// a merge.
class TableGrid {
 public:
  // Throws a consistency error when the invariants above do not hold.
  static TableGrid Create(int n_rows, int n_cols,
                          std::vector<MergedCell> merges,
                          std::set<int> header_rows = {},
                          std::set<int> projected_rows = {});

  int n_rows() const { return n_rows_; }
  int n_cols() const { return n_cols_; }
  const std::vector<MergedCell>& merges() const { return merges_; }
  const std::set<int>& header_rows() const { return header_rows_; }
  const std::set<int>& projected_rows() const { return projected_rows_; }

  const CellRef& cell(int row, int col) const {
    return cells_[static_cast<std::size_t>(row) * n_cols_ + col];
  }

  CellLattice Lattice() const;

 private:
  TableGrid() = default;

  int n_rows_ = 0;
  int n_cols_ = 0;
  std::vector<CellRef> cells_;
  std::vector<MergedCell> merges_;
  std::set<int> header_rows_;
  std::set<int> projected_rows_;
};

struct ReconstructionConfig {
  // Indexed by class id; instances without a confidence always pass.
  std::array<double, kNumSingleLabelClasses> score_thresholds = {
      0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  // Fraction of a grid cell's area a spanning cell must cover to absorb it.
  double span_overlap_threshold = 0.5;
  double nms_iou = 0.5;
  double box_match_tolerance = kDefaultBoxMatchTolerance;

  // Throws a config error when any threshold leaves [0, 1].
  void Validate() const;
};

// Assembles the lattice from multi-label components: thresholding, class-wise
// NMS, clipping to the table box, rows by top edge, columns by left edge,
// spanning cells absorbed by overlap and rectangularized, header rows by
// center containment, projected rows by matching a ProjectedRowHeader.
// Throws a mode error for single-label input and an empty-structure error
// when no Row or no Column survives. Non-fatal issues go to `warnings`.
TableGrid BuildGrid(const AnnotationSet& detections,
                    const ReconstructionConfig& cfg = {},
                    std::vector<std::string>* warnings = nullptr);

// Structure-only HTML: lowercase tags, no whitespace, span attributes only
// when greater than one.
std::string GridToHtml(const TableGrid& grid);

enum class TableComplexity { kSimple, kComplex };

TableComplexity ClassifyComplexity(const TableGrid& grid);

// Expands rowspans/colspans of a parsed table into its cell lattice. Throws a
// consistency error for overlapping or ragged layouts.
CellLattice ExpandTableTree(const TableTree& tree);

// Detections in either label mode to structure HTML.
std::string ReconstructHtml(const AnnotationSet& detections,
                            const ReconstructionConfig& cfg = {},
                            std::vector<std::string>* warnings = nullptr);

}  // namespace tabstruct

#endif  // TABSTRUCT_RECONSTRUCT_H_
