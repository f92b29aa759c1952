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
#ifndef TABSTRUCT_TEDS_H_
#define TABSTRUCT_TEDS_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tabstruct {

enum class TableTag { kTable, kThead, kTbody, kTr, kTd };

std::string_view TagName(TableTag tag);

struct TreeNode {
  TableTag tag = TableTag::kTd;
  int colspan = 1;
  int rowspan = 1;
  std::vector<int> children;
};

// Ordered labeled tree; node 0 is the root. Trees produced by
// ParseTableHtml are well formed (table > thead/tbody > tr > td), but the
// edit-distance routines accept any shape.
struct TableTree {
  std::vector<TreeNode> nodes;

  int size() const { return static_cast<int>(nodes.size()); }
  bool empty() const { return nodes.empty(); }

  // Appends a node under `parent` (-1 for the root) and returns its index.
  int AddNode(int parent, TableTag tag, int colspan = 1, int rowspan = 1);

  bool IsWellFormed() const;
};

// Parses a single <table> fragment. Whitespace and text are ignored, th is
// read as td, tr directly under table gets an implicit tbody, and unknown
// tags inside a td are dropped. Throws ParseError with a byte offset on
// unbalanced markup, misplaced elements and bad span values.
TableTree ParseTableHtml(std::string_view html);

struct EditCosts {
  double insert_cost = 1.0;
  double delete_cost = 1.0;
  double rename_cost = 1.0;

  // Zero when tags match and, for td nodes, both spans match.
  double Rename(const TreeNode& a, const TreeNode& b) const;
};

// Ordered tree edit distance (Zhang-Shasha keyroot dynamic program).
double TreeEditDistance(const TableTree& a, const TableTree& b,
                        const EditCosts& costs = {});

// 1 - distance / max(|a|, |b|); 1 when both trees are empty.
double Teds(const TableTree& a, const TableTree& b);

// True when any td spans more than one row or column.
bool IsComplexTree(const TableTree& tree);

struct TedsSample {
  std::string id;
  std::string predicted_html;
  std::string ground_truth_html;
};

struct TedsScore {
  std::string id;
  double score = 0.0;
  bool complex = false;
  // Set when the prediction failed to parse; the sample then scores 0.
  std::optional<std::string> prediction_error;
};

struct CorpusTeds {
  std::optional<double> simple_mean;
  std::optional<double> complex_mean;
  std::optional<double> overall_mean;
  std::vector<TedsScore> scores;
};

// Scores every pair; group means are independent of sample order. Throws a
// corpus error naming the sample when a ground-truth sequence does not parse.
CorpusTeds ScoreCorpus(const std::vector<TedsSample>& samples);

}  // namespace tabstruct

#endif  // TABSTRUCT_TEDS_H_
