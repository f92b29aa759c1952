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
#ifndef TABSTRUCT_FIXTURES_H_
#define TABSTRUCT_FIXTURES_H_

#include <cstdint>
#include <vector>

#include "tabstruct/formats.h"
#include "tabstruct/reconstruct.h"

namespace tabstruct {

// Synthetic table generator settings.
//
// Rows tile the table height and columns tile its width. A one-row header
// produces a ColumnHeader box coinciding with that Row; two-row headers do
// not. Spanning cells and projected rows are placed only in tables drawn
// with `span_probability`, so a probability of 0 yields simple tables.
struct FixtureSpec {
  int n_images = 20;
  int min_rows = 3;
  int max_rows = 8;
  int min_cols = 2;
  int max_cols = 6;
  double span_probability = 0.3;
  double header_probability = 0.5;
  // Per eligible body row of a spanning table.
  double projected_row_probability = 0.25;
  std::uint64_t seed = 1;

  // Throws a config error for empty ranges, fewer than 3 rows or 2 columns,
  // or probabilities outside [0, 1].
  void Validate() const;
};

struct FixtureSet {
  // Multi-label components with HTML and content extents.
  CorpusFile ground_truth;
  // Perfect copies of the ground-truth components with score 1.0.
  CorpusFile predictions;
  // The lattice each table was generated from, parallel to the images.
  std::vector<TableGrid> grids;
};

// Deterministic for a given spec.
FixtureSet GenerateFixtures(const FixtureSpec& spec);

}  // namespace tabstruct

#endif  // TABSTRUCT_FIXTURES_H_
