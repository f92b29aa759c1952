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
#ifndef TABSTRUCT_TESTS_ORACLES_TREE_EDIT_ORACLE_H_
#define TABSTRUCT_TESTS_ORACLES_TREE_EDIT_ORACLE_H_

#include <functional>
#include <random>
#include <vector>

#include "tabstruct/teds.h"

namespace tabstruct::oracle {

// Exhaustive tree edit distance with unit costs. Enumerates every edit
// mapping (one-to-one, preserving ancestry and preorder) and returns the
// cheapest. Only practical for trees of a handful of nodes.
class BruteForceTreeEdit {
 public:
  BruteForceTreeEdit(const TableTree& a, const TableTree& b)
      : a_(Flatten(a)), b_(Flatten(b)) {}

  int Distance() {
    best_ = static_cast<int>(a_.nodes.size() + b_.nodes.size());
    used_.assign(b_.nodes.size(), false);
    pairs_.clear();
    Search(0, 0);
    return best_;
  }

 private:
  struct Flat {
    std::vector<TreeNode> nodes;           // preorder
    std::vector<std::vector<bool>> above;  // above[i][j]: i is an ancestor of j
  };

  static Flat Flatten(const TableTree& t) {
    Flat f;
    if (t.empty()) return f;
    std::vector<int> order;
    std::vector<int> parent_of(t.nodes.size(), -1);
    std::function<void(int)> visit = [&](int n) {
      order.push_back(n);
      for (int c : t.nodes[n].children) {
        parent_of[c] = n;
        visit(c);
      }
    };
    visit(0);
    std::vector<int> pos(t.nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
    const std::size_t n = order.size();
    f.above.assign(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
      f.nodes.push_back(t.nodes[order[i]]);
      for (int p = parent_of[order[i]]; p >= 0; p = parent_of[p]) {
        f.above[pos[p]][i] = true;
      }
    }
    return f;
  }

  static int Relabel(const TreeNode& x, const TreeNode& y) {
    if (x.tag != y.tag) return 1;
    if (x.tag == TableTag::kTd &&
        (x.colspan != y.colspan || x.rowspan != y.rowspan)) {
      return 1;
    }
    return 0;
  }

  bool Consistent(int i, int j) const {
    for (const auto& [pi, pj] : pairs_) {
      if (a_.above[pi][i] != b_.above[pj][j]) return false;
      // pi precedes i in preorder; pj must precede j.
      if (pj > j) return false;
    }
    return true;
  }

  // Node i of the first tree is decided next; `cost` covers nodes before it.
  void Search(std::size_t i, int cost) {
    if (cost >= best_) return;
    if (i == a_.nodes.size()) {
      const int inserted =
          static_cast<int>(b_.nodes.size() - pairs_.size());
      if (cost + inserted < best_) best_ = cost + inserted;
      return;
    }
    for (std::size_t j = 0; j < b_.nodes.size(); ++j) {
      if (used_[j] || !Consistent(static_cast<int>(i), static_cast<int>(j))) {
        continue;
      }
      used_[j] = true;
      pairs_.push_back({static_cast<int>(i), static_cast<int>(j)});
      Search(i + 1, cost + Relabel(a_.nodes[i], b_.nodes[j]));
      pairs_.pop_back();
      used_[j] = false;
    }
    Search(i + 1, cost + 1);  // delete node i
  }

  Flat a_;
  Flat b_;
  std::vector<bool> used_;
  std::vector<std::pair<int, int>> pairs_;
  int best_ = 0;
};

// Random ordered tree of 1..max_nodes nodes with table tags and small spans.
inline TableTree RandomTree(std::mt19937_64& rng, int max_nodes) {
  std::uniform_int_distribution<int> size_dist(1, max_nodes);
  std::uniform_int_distribution<int> tag_dist(0, 4);
  std::uniform_int_distribution<int> span_dist(1, 2);
  TableTree tree;
  const int n = size_dist(rng);
  for (int k = 0; k < n; ++k) {
    const int parent =
        k == 0 ? -1 : std::uniform_int_distribution<int>(0, k - 1)(rng);
    const auto tag = static_cast<TableTag>(tag_dist(rng));
    if (tag == TableTag::kTd) {
      tree.AddNode(parent, tag, span_dist(rng), span_dist(rng));
    } else {
      tree.AddNode(parent, tag);
    }
  }
  return tree;
}

}  // namespace tabstruct::oracle

#endif  // TABSTRUCT_TESTS_ORACLES_TREE_EDIT_ORACLE_H_
