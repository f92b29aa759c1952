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
#include "tabstruct/fixtures.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <fmt/format.h>

#include "tabstruct/error.h"

namespace tabstruct {

void FixtureSpec::Validate() const {
  if (n_images < 1) throw Error(ErrorCategory::kConfig, "n_images must be >= 1");
  if (min_rows < 3 || max_rows < min_rows) {
    throw Error(ErrorCategory::kConfig,
                fmt::format("row range [{}, {}] must start at 3 or more",
                            min_rows, max_rows));
  }
  if (min_cols < 2 || max_cols < min_cols) {
    throw Error(ErrorCategory::kConfig,
                fmt::format("column range [{}, {}] must start at 2 or more",
                            min_cols, max_cols));
  }
  for (double p : {span_probability, header_probability,
                   projected_row_probability}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCategory::kConfig, "probabilities must lie in [0, 1]");
    }
  }
}

namespace {

class TableSynth {
 public:
  TableSynth(const FixtureSpec& spec, std::mt19937_64& rng)
      : spec_(spec), rng_(rng) {}

  // Image `index` selects the scale, cycling so every size bucket appears.
  void Generate(int index, ImageRecord& gt, std::vector<TableGrid>& grids) {
    static constexpr double kScales[] = {0.5, 1.0, 2.0};
    const double scale = kScales[index % 3];

    n_rows_ = Int(spec_.min_rows, spec_.max_rows);
    n_cols_ = Int(spec_.min_cols, spec_.max_cols);
    header_ = 0;
    if (Chance(spec_.header_probability)) {
      header_ = std::min(Int(1, 2), n_rows_ - 2);
    }
    merges_.clear();
    projected_.clear();
    if (Chance(spec_.span_probability)) PlaceSpans();

    const double x0 = Scaled(Int(5, 40), scale, 1.0);
    const double y0 = Scaled(Int(5, 40), scale, 1.0);
    col_edges_ = {x0};
    for (int c = 0; c < n_cols_; ++c) {
      col_edges_.push_back(col_edges_.back() + Scaled(Int(30, 120), scale, 8.0));
    }
    row_edges_ = {y0};
    for (int r = 0; r < n_rows_; ++r) {
      row_edges_.push_back(row_edges_.back() + Scaled(Int(14, 30), scale, 6.0));
    }
    const BBox table(col_edges_.front(), row_edges_.front(), col_edges_.back(),
                     row_edges_.back());

    gt.width = table.x2() + Scaled(Int(5, 40), scale, 1.0);
    gt.height = table.y2() + Scaled(Int(5, 40), scale, 1.0);
    gt.instances.clear();
    gt.content_extents.clear();

    Add(gt, table, ComponentClass::kTable);
    for (int c = 0; c < n_cols_; ++c) {
      Add(gt, BBox(col_edges_[c], table.y1(), col_edges_[c + 1], table.y2()),
          ComponentClass::kColumn);
    }
    std::vector<BBox> row_extents;
    for (int r = 0; r < n_rows_; ++r) {
      Add(gt, RowBox(r), ComponentClass::kRow);
      row_extents.push_back(gt.content_extents.back());
    }
    for (const auto& m : merges_) {
      Add(gt,
          BBox(col_edges_[m.col_start], row_edges_[m.row_start],
               col_edges_[m.col_start + m.col_span],
               row_edges_[m.row_start + m.row_span]),
          ComponentClass::kSpanningCell);
    }
    for (int r : projected_) {
      Add(gt, RowBox(r), ComponentClass::kProjectedRowHeader, row_extents[r]);
    }
    if (header_ > 0) {
      const BBox header(table.x1(), table.y1(), table.x2(), row_edges_[header_]);
      if (header_ == 1) {
        Add(gt, header, ComponentClass::kColumnHeader, row_extents[0]);
      } else {
        Add(gt, header, ComponentClass::kColumnHeader);
      }
    }

    std::set<int> header_rows;
    for (int r = 0; r < header_; ++r) header_rows.insert(r);
    grids.push_back(TableGrid::Create(n_rows_, n_cols_, merges_,
                                      std::move(header_rows), projected_));
    gt.html = GridToHtml(grids.back());
  }

 private:
  int Int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  bool Chance(double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p;
  }
  static double Scaled(int value, double scale, double floor) {
    return std::max(floor, std::round(value * scale));
  }

  BBox RowBox(int r) const {
    return BBox(col_edges_.front(), row_edges_[r], col_edges_.back(),
                row_edges_[r + 1]);
  }

  // Insets each side by 10-30% of the box extent, at least one pixel.
  BBox ContentExtent(const BBox& b) {
    const auto inset = [&](double extent) {
      const double frac = std::uniform_real_distribution<double>(0.1, 0.3)(rng_);
      return std::max(1.0, std::floor(frac * extent));
    };
    const double l = inset(b.width());
    const double r = inset(b.width());
    const double t = inset(b.height());
    const double d = inset(b.height());
    return BBox(b.x1() + l, b.y1() + t, b.x2() - r, b.y2() - d);
  }

  void Add(ImageRecord& gt, const BBox& box, ComponentClass cls) {
    Add(gt, box, cls, ContentExtent(box));
  }
  void Add(ImageRecord& gt, const BBox& box, ComponentClass cls,
           const BBox& extent) {
    gt.instances.push_back({box, cls, std::nullopt});
    gt.content_extents.push_back(extent);
  }

  bool Free(const MergedCell& m) const {
    for (const auto& other : merges_) {
      if (m.row_start < other.row_start + other.row_span &&
          other.row_start < m.row_start + m.row_span &&
          m.col_start < other.col_start + other.col_span &&
          other.col_start < m.col_start + m.col_span) {
        return false;
      }
    }
    return true;
  }

  // Spans live in the body. Horizontal spans never cover every column;
  // vertical spans cover two rows, so never a whole column.
  void PlaceSpans() {
    const bool horizontal_ok = n_cols_ >= 3;
    const int wanted = Int(1, 2);
    for (int attempt = 0; attempt < 20 && static_cast<int>(merges_.size()) < wanted;
         ++attempt) {
      const bool vertical = !horizontal_ok || Chance(0.5);
      MergedCell m;
      if (vertical) {
        m = {Int(header_, n_rows_ - 2), Int(0, n_cols_ - 1), 2, 1};
      } else {
        const int span = Int(2, n_cols_ - 1);
        m = {Int(header_, n_rows_ - 1), Int(0, n_cols_ - span), 1, span};
      }
      if (Free(m)) merges_.push_back(m);
    }
    for (int r = header_; r < n_rows_; ++r) {
      const bool touched = std::any_of(merges_.begin(), merges_.end(),
                                       [&](const MergedCell& m) {
                                         return r >= m.row_start &&
                                                r < m.row_start + m.row_span;
                                       });
      if (!touched && Chance(spec_.projected_row_probability)) {
        projected_.insert(r);
      }
    }
  }

  const FixtureSpec& spec_;
  std::mt19937_64& rng_;
  int n_rows_ = 0;
  int n_cols_ = 0;
  int header_ = 0;
  std::vector<MergedCell> merges_;
  std::set<int> projected_;
  std::vector<double> col_edges_;
  std::vector<double> row_edges_;
};

}  // namespace

FixtureSet GenerateFixtures(const FixtureSpec& spec) {
  spec.Validate();
  std::mt19937_64 rng(spec.seed);
  TableSynth synth(spec, rng);
  FixtureSet set;
  set.ground_truth.label_mode = LabelMode::kMultiLabel;
  set.predictions.label_mode = LabelMode::kMultiLabel;
  for (int i = 0; i < spec.n_images; ++i) {
    ImageRecord gt;
    gt.image_id = fmt::format("table_{:04d}", i);
    synth.Generate(i, gt, set.grids);

    ImageRecord pred;
    pred.image_id = gt.image_id;
    pred.width = gt.width;
    pred.height = gt.height;
    pred.instances = gt.instances;
    for (auto& inst : pred.instances) inst.confidence = 1.0;

    set.ground_truth.images.push_back(std::move(gt));
    set.predictions.images.push_back(std::move(pred));
  }
  return set;
}

}  // namespace tabstruct
