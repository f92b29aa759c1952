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
#include <optional>
#include <tuple>

#include <fmt/format.h>

#include "tabstruct/error.h"

namespace tabstruct {

TableGrid TableGrid::Create(int n_rows, int n_cols,
                            std::vector<MergedCell> merges,
                            std::set<int> header_rows,
                            std::set<int> projected_rows) {
  if (n_rows < 1 || n_cols < 1) {
    throw Error(ErrorCategory::kConsistency,
                fmt::format("grid must be at least 1x1, got {}x{}", n_rows,
                            n_cols));
  }
  for (int r : header_rows) {
    if (r < 0 || r >= n_rows) {
      throw Error(ErrorCategory::kConsistency,
                  fmt::format("header row {} outside grid", r));
    }
  }
  for (int r : projected_rows) {
    if (r < 0 || r >= n_rows) {
      throw Error(ErrorCategory::kConsistency,
                  fmt::format("projected row {} outside grid", r));
    }
  }

  TableGrid grid;
  grid.n_rows_ = n_rows;
  grid.n_cols_ = n_cols;
  grid.cells_.resize(static_cast<std::size_t>(n_rows) * n_cols);
  std::vector<bool> owned(grid.cells_.size(), false);
  for (int r = 0; r < n_rows; ++r) {
    for (int c = 0; c < n_cols; ++c) {
      const bool projected = projected_rows.count(r) > 0;
      grid.cells_[static_cast<std::size_t>(r) * n_cols + c] = {r,
                                                              projected ? 0 : c};
    }
  }

  std::sort(merges.begin(), merges.end());
  for (const auto& m : merges) {
    if (m.row_span < 1 || m.col_span < 1 || m.row_start < 0 ||
        m.col_start < 0 || m.row_start + m.row_span > n_rows ||
        m.col_start + m.col_span > n_cols) {
      throw Error(ErrorCategory::kConsistency,
                  fmt::format("merge {{{},{},{},{}}} outside {}x{} grid",
                              m.row_start, m.col_start, m.row_span, m.col_span,
                              n_rows, n_cols));
    }
    for (int r = m.row_start; r < m.row_start + m.row_span; ++r) {
      if (projected_rows.count(r)) {
        throw Error(ErrorCategory::kConsistency,
                    fmt::format("merge at ({},{}) overlaps projected row {}",
                                m.row_start, m.col_start, r));
      }
      for (int c = m.col_start; c < m.col_start + m.col_span; ++c) {
        const std::size_t index = static_cast<std::size_t>(r) * n_cols + c;
        if (owned[index]) {
          throw Error(ErrorCategory::kConsistency,
                      fmt::format("merges overlap at ({},{})", r, c));
        }
        owned[index] = true;
        grid.cells_[index] = {m.row_start, m.col_start};
      }
    }
  }
  grid.merges_ = std::move(merges);
  grid.header_rows_ = std::move(header_rows);
  grid.projected_rows_ = std::move(projected_rows);
  return grid;
}

CellLattice TableGrid::Lattice() const {
  CellLattice lattice{n_rows_, n_cols_, {}, header_rows_};
  for (int r = 0; r < n_rows_; ++r) {
    if (projected_rows_.count(r)) {
      lattice.cells.push_back({r, 0, 1, n_cols_});
      continue;
    }
    for (int c = 0; c < n_cols_; ++c) {
      const CellRef& ref = cell(r, c);
      if (ref.anchor_row == r && ref.anchor_col == c) {
        lattice.cells.push_back({r, c, 1, 1});
      }
    }
  }
  for (const auto& m : merges_) {
    auto it = std::find_if(
        lattice.cells.begin(), lattice.cells.end(), [&](const LogicalCell& l) {
          return l.row == m.row_start && l.col == m.col_start;
        });
    it->row_span = m.row_span;
    it->col_span = m.col_span;
  }
  std::sort(lattice.cells.begin(), lattice.cells.end());
  return lattice;
}

void ReconstructionConfig::Validate() const {
  const auto check = [](double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw Error(ErrorCategory::kConfig,
                  fmt::format("{} = {} is outside [0, 1]", name, value));
    }
  };
  for (double t : score_thresholds) check(t, "score threshold");
  check(span_overlap_threshold, "span_overlap_threshold");
  check(nms_iou, "nms_iou");
  if (!(box_match_tolerance >= 0.0)) {
    throw Error(ErrorCategory::kConfig, "box_match_tolerance must be >= 0");
  }
}

namespace {

double Confidence(const ComponentInstance& inst) {
  return inst.confidence.value_or(1.0);
}

// Total order on instances that does not depend on input position, so the
// whole assembly is invariant to permutations of the detection list.
bool RanksBefore(const ComponentInstance& a, const ComponentInstance& b) {
  const auto key = [](const ComponentInstance& i) {
    return std::make_tuple(-Confidence(i), i.box.x1(), i.box.y1(), i.box.x2(),
                           i.box.y2());
  };
  return key(a) < key(b);
}

std::vector<BBox> NmsBoxes(std::vector<ComponentInstance> instances,
                           double iou_threshold) {
  std::sort(instances.begin(), instances.end(), RanksBefore);
  std::vector<BBox> kept;
  for (const auto& inst : instances) {
    const bool suppressed =
        std::any_of(kept.begin(), kept.end(), [&](const BBox& k) {
          return Iou(k, inst.box) > iou_threshold;
        });
    if (!suppressed) kept.push_back(inst.box);
  }
  return kept;
}

std::vector<BBox> ClipAll(const std::vector<BBox>& boxes,
                          const std::optional<BBox>& table) {
  if (!table) return boxes;
  std::vector<BBox> clipped;
  for (const auto& b : boxes) {
    if (auto inter = Intersection(b, *table); inter && inter->area() > 0.0) {
      clipped.push_back(*inter);
    }
  }
  return clipped;
}

}  // namespace

TableGrid BuildGrid(const AnnotationSet& detections,
                    const ReconstructionConfig& cfg,
                    std::vector<std::string>* warnings) {
  if (detections.mode != LabelMode::kMultiLabel) {
    throw Error(ErrorCategory::kMode,
                "grid assembly expects multi-label components; decode image '" +
                    detections.image_id + "' first");
  }
  cfg.Validate();
  const auto warn = [&](std::string message) {
    if (warnings) warnings->push_back(std::move(message));
  };

  std::array<std::vector<ComponentInstance>, kNumMultiLabelClasses> by_class;
  for (const auto& inst : detections.instances) {
    const int id = ClassId(inst.cls);
    if (id >= kNumMultiLabelClasses) {
      throw Error(ErrorCategory::kInput,
                  fmt::format("image '{}': class {} in multi-label input",
                              detections.image_id, ClassName(inst.cls)));
    }
    if (inst.confidence && *inst.confidence < cfg.score_thresholds[id]) {
      continue;
    }
    by_class[id].push_back(inst);
  }
  std::array<std::vector<BBox>, kNumMultiLabelClasses> boxes;
  for (int id = 0; id < kNumMultiLabelClasses; ++id) {
    boxes[id] = NmsBoxes(by_class[id], cfg.nms_iou);
  }

  std::optional<BBox> table;
  const auto& tables = boxes[ClassId(ComponentClass::kTable)];
  if (tables.empty()) {
    warn(fmt::format("image '{}': no Table box, components left unclipped",
                     detections.image_id));
  } else {
    table = tables.front();
  }

  std::vector<BBox> rows = ClipAll(boxes[ClassId(ComponentClass::kRow)], table);
  std::vector<BBox> cols =
      ClipAll(boxes[ClassId(ComponentClass::kColumn)], table);
  const std::vector<BBox> spans =
      ClipAll(boxes[ClassId(ComponentClass::kSpanningCell)], table);
  const std::vector<BBox> projected_headers =
      ClipAll(boxes[ClassId(ComponentClass::kProjectedRowHeader)], table);
  const std::vector<BBox> column_headers =
      ClipAll(boxes[ClassId(ComponentClass::kColumnHeader)], table);

  if (rows.empty() || cols.empty()) {
    throw Error(ErrorCategory::kEmptyStructure,
                fmt::format("image '{}': {} rows and {} columns survive",
                            detections.image_id, rows.size(), cols.size()));
  }
  std::sort(rows.begin(), rows.end(), [](const BBox& a, const BBox& b) {
    return std::make_tuple(a.y1(), a.y2(), a.x1(), a.x2()) <
           std::make_tuple(b.y1(), b.y2(), b.x1(), b.x2());
  });
  std::sort(cols.begin(), cols.end(), [](const BBox& a, const BBox& b) {
    return std::make_tuple(a.x1(), a.x2(), a.y1(), a.y2()) <
           std::make_tuple(b.x1(), b.x2(), b.y1(), b.y2());
  });
  const int n_rows = static_cast<int>(rows.size());
  const int n_cols = static_cast<int>(cols.size());

  std::set<int> projected_rows;
  std::set<int> header_rows;
  for (int r = 0; r < n_rows; ++r) {
    for (const auto& prh : projected_headers) {
      if (BoxesMatch(rows[r], prh, cfg.box_match_tolerance) ||
          Iou(rows[r], prh) >= 0.5) {
        projected_rows.insert(r);
        break;
      }
    }
    for (const auto& header : column_headers) {
      if (header.Contains(rows[r].center_x(), rows[r].center_y())) {
        header_rows.insert(r);
        break;
      }
    }
  }

  const auto cell_box = [&](int r, int c) {
    return BBox(cols[c].x1(), rows[r].y1(), cols[c].x2(), rows[r].y2());
  };

  std::vector<MergedCell> merges;
  std::vector<bool> taken(static_cast<std::size_t>(n_rows) * n_cols, false);
  // Spanning cells are visited in rank order; NMS already ranked them.
  for (const auto& span : spans) {
    int r0 = n_rows, r1 = -1, c0 = n_cols, c1 = -1;
    for (int r = 0; r < n_rows; ++r) {
      if (projected_rows.count(r)) continue;
      for (int c = 0; c < n_cols; ++c) {
        const BBox cell = cell_box(r, c);
        if (cell.area() <= 0.0) continue;
        if (IntersectionArea(cell, span) / cell.area() >=
            cfg.span_overlap_threshold) {
          r0 = std::min(r0, r);
          r1 = std::max(r1, r);
          c0 = std::min(c0, c);
          c1 = std::max(c1, c);
        }
      }
    }
    if (r1 < 0) continue;
    if (r0 == r1 && c0 == c1) continue;
    bool conflict = false;
    for (int r = r0; r <= r1 && !conflict; ++r) {
      if (projected_rows.count(r)) conflict = true;
      for (int c = c0; c <= c1 && !conflict; ++c) {
        if (taken[static_cast<std::size_t>(r) * n_cols + c]) conflict = true;
      }
    }
    if (conflict) {
      warn(fmt::format("image '{}': spanning cell {} conflicts with an earlier "
                       "span or projected row, dropped",
                       detections.image_id, span.ToString()));
      continue;
    }
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        taken[static_cast<std::size_t>(r) * n_cols + c] = true;
      }
    }
    merges.push_back({r0, c0, r1 - r0 + 1, c1 - c0 + 1});
  }

  return TableGrid::Create(n_rows, n_cols, std::move(merges),
                           std::move(header_rows), std::move(projected_rows));
}

namespace {

void AppendCell(std::string& out, int col_span, int row_span) {
  out += "<td";
  if (col_span > 1) out += fmt::format(" colspan=\"{}\"", col_span);
  if (row_span > 1) out += fmt::format(" rowspan=\"{}\"", row_span);
  out += "></td>";
}

void AppendRow(std::string& out, const TableGrid& grid, int r) {
  out += "<tr>";
  if (grid.projected_rows().count(r)) {
    AppendCell(out, grid.n_cols(), 1);
  } else {
    for (int c = 0; c < grid.n_cols(); ++c) {
      const CellRef& ref = grid.cell(r, c);
      if (ref.anchor_row != r || ref.anchor_col != c) continue;
      int col_span = 1;
      int row_span = 1;
      for (const auto& m : grid.merges()) {
        if (m.row_start == r && m.col_start == c) {
          col_span = m.col_span;
          row_span = m.row_span;
          break;
        }
      }
      AppendCell(out, col_span, row_span);
    }
  }
  out += "</tr>";
}

}  // namespace

std::string GridToHtml(const TableGrid& grid) {
  std::string out = "<table>";
  if (!grid.header_rows().empty()) {
    out += "<thead>";
    for (int r : grid.header_rows()) AppendRow(out, grid, r);
    out += "</thead>";
  }
  out += "<tbody>";
  for (int r = 0; r < grid.n_rows(); ++r) {
    if (!grid.header_rows().count(r)) AppendRow(out, grid, r);
  }
  out += "</tbody></table>";
  return out;
}

TableComplexity ClassifyComplexity(const TableGrid& grid) {
  if (!grid.merges().empty()) return TableComplexity::kComplex;
  if (!grid.projected_rows().empty() && grid.n_cols() > 1) {
    return TableComplexity::kComplex;
  }
  return TableComplexity::kSimple;
}

CellLattice ExpandTableTree(const TableTree& tree) {
  CellLattice lattice;
  if (tree.empty()) return lattice;
  // Rows in document order, remembering which section holds them.
  std::vector<std::pair<int, bool>> rows;
  for (int section : tree.nodes[0].children) {
    const TreeNode& s = tree.nodes[section];
    for (int tr : s.children) rows.push_back({tr, s.tag == TableTag::kThead});
  }
  lattice.n_rows = static_cast<int>(rows.size());
  std::vector<std::vector<bool>> occupied(rows.size());
  for (int r = 0; r < lattice.n_rows; ++r) {
    if (rows[r].second) lattice.header_rows.insert(r);
    int c = 0;
    for (int td : tree.nodes[rows[r].first].children) {
      const TreeNode& cell = tree.nodes[td];
      while (c < static_cast<int>(occupied[r].size()) && occupied[r][c]) ++c;
      if (r + cell.rowspan > lattice.n_rows) {
        throw Error(ErrorCategory::kConsistency,
                    fmt::format("rowspan at row {} runs past the table", r));
      }
      for (int dr = 0; dr < cell.rowspan; ++dr) {
        auto& line = occupied[r + dr];
        if (static_cast<int>(line.size()) < c + cell.colspan) {
          line.resize(c + cell.colspan, false);
        }
        for (int dc = 0; dc < cell.colspan; ++dc) {
          if (line[c + dc]) {
            throw Error(ErrorCategory::kConsistency,
                        fmt::format("cells overlap at ({}, {})", r + dr,
                                    c + dc));
          }
          line[c + dc] = true;
        }
      }
      lattice.cells.push_back({r, c, cell.rowspan, cell.colspan});
      c += cell.colspan;
    }
  }
  for (const auto& line : occupied) {
    lattice.n_cols = std::max(lattice.n_cols, static_cast<int>(line.size()));
  }
  for (std::size_t r = 0; r < occupied.size(); ++r) {
    const auto& line = occupied[r];
    if (static_cast<int>(line.size()) != lattice.n_cols ||
        !std::all_of(line.begin(), line.end(), [](bool b) { return b; })) {
      throw Error(ErrorCategory::kConsistency,
                  fmt::format("row {} does not fill {} columns", r,
                              lattice.n_cols));
    }
  }
  std::sort(lattice.cells.begin(), lattice.cells.end());
  return lattice;
}

std::string ReconstructHtml(const AnnotationSet& detections,
                            const ReconstructionConfig& cfg,
                            std::vector<std::string>* warnings) {
  if (detections.mode == LabelMode::kSingleLabel) {
    return GridToHtml(BuildGrid(DecodePseudo(detections), cfg, warnings));
  }
  return GridToHtml(BuildGrid(detections, cfg, warnings));
}

}  // namespace tabstruct
