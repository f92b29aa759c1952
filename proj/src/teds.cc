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
#include "tabstruct/teds.h"

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "tabstruct/error.h"

namespace tabstruct {

std::string_view TagName(TableTag tag) {
  switch (tag) {
    case TableTag::kTable:
      return "table";
    case TableTag::kThead:
      return "thead";
    case TableTag::kTbody:
      return "tbody";
    case TableTag::kTr:
      return "tr";
    case TableTag::kTd:
      return "td";
  }
  return "?";
}

int TableTree::AddNode(int parent, TableTag tag, int colspan, int rowspan) {
  const int index = size();
  nodes.push_back({tag, colspan, rowspan, {}});
  if (parent >= 0) nodes[parent].children.push_back(index);
  return index;
}

bool TableTree::IsWellFormed() const {
  if (nodes.empty() || nodes[0].tag != TableTag::kTable) return false;
  std::vector<int> parent(nodes.size(), -1);
  for (int i = 0; i < size(); ++i) {
    for (int c : nodes[i].children) {
      if (c <= 0 || c >= size() || parent[c] != -1) return false;
      parent[c] = i;
    }
  }
  for (int i = 1; i < size(); ++i) {
    if (parent[i] < 0) return false;
    const TableTag p = nodes[parent[i]].tag;
    switch (nodes[i].tag) {
      case TableTag::kTable:
        return false;
      case TableTag::kThead:
      case TableTag::kTbody:
        if (p != TableTag::kTable) return false;
        break;
      case TableTag::kTr:
        if (p != TableTag::kThead && p != TableTag::kTbody) return false;
        break;
      case TableTag::kTd:
        if (p != TableTag::kTr) return false;
        break;
    }
    if (nodes[i].colspan < 1 || nodes[i].rowspan < 1) return false;
  }
  return true;
}

namespace {

bool IsVoidElement(std::string_view name) {
  static constexpr std::string_view kVoid[] = {
      "area", "base", "br",   "col",   "embed",  "hr",    "img",
      "input", "link", "meta", "param", "source", "track", "wbr"};
  return std::find(std::begin(kVoid), std::end(kVoid), name) !=
         std::end(kVoid);
}

class HtmlTableParser {
 public:
  explicit HtmlTableParser(std::string_view html) : html_(html) {}

  TableTree Parse() {
    while (pos_ < html_.size()) {
      if (html_[pos_] != '<') {
        ++pos_;
        continue;
      }
      if (html_.compare(pos_, 4, "<!--") == 0) {
        const std::size_t end = html_.find("-->", pos_ + 4);
        if (end == std::string_view::npos) Fail(pos_, "unterminated comment");
        pos_ = end + 3;
        continue;
      }
      if (pos_ + 1 < html_.size() && html_[pos_ + 1] == '/') {
        ParseEndTag();
      } else {
        ParseStartTag();
      }
    }
    if (!stack_.empty()) {
      Fail(stack_.back().offset, "unclosed <" + stack_.back().name + ">");
    }
    if (!root_closed_) Fail(html_.size(), "no <table> element");
    return std::move(tree_);
  }

 private:
  struct OpenElement {
    std::string name;
    std::size_t offset;
    int node;       // -1 for elements dropped inside a cell
    bool implicit;  // tbody synthesized for a bare tr
  };

  struct Attributes {
    std::optional<int> colspan;
    std::optional<int> rowspan;
    bool self_closing = false;
  };

  [[noreturn]] void Fail(std::size_t offset, const std::string& message) {
    throw ParseError(offset, message);
  }

  std::string ReadName() {
    std::string name;
    while (pos_ < html_.size()) {
      const char c = html_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '>' ||
          c == '/' || c == '=') {
        break;
      }
      name.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      ++pos_;
    }
    return name;
  }

  void SkipSpace() {
    while (pos_ < html_.size() &&
           std::isspace(static_cast<unsigned char>(html_[pos_]))) {
      ++pos_;
    }
  }

  int ParseSpan(std::string_view raw, std::size_t offset) {
    std::size_t b = 0;
    std::size_t e = raw.size();
    while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
    raw = raw.substr(b, e - b);
    if (raw.empty() || raw.size() > 6 ||
        !std::all_of(raw.begin(), raw.end(), [](char c) {
          return std::isdigit(static_cast<unsigned char>(c));
        })) {
      Fail(offset, "span value '" + std::string(raw) + "' is not an integer");
    }
    const int value = std::stoi(std::string(raw));
    if (value < 1) Fail(offset, "span value must be at least 1");
    return value;
  }

  Attributes ReadAttributes(std::size_t tag_offset) {
    Attributes attrs;
    while (true) {
      SkipSpace();
      if (pos_ >= html_.size()) Fail(tag_offset, "unterminated tag");
      if (html_[pos_] == '>') {
        ++pos_;
        return attrs;
      }
      if (html_[pos_] == '/') {
        ++pos_;
        SkipSpace();
        if (pos_ < html_.size() && html_[pos_] == '>') {
          ++pos_;
          attrs.self_closing = true;
          return attrs;
        }
        continue;
      }
      const std::size_t attr_offset = pos_;
      const std::string name = ReadName();
      if (name.empty()) Fail(pos_, "malformed attribute");
      SkipSpace();
      std::string_view value;
      if (pos_ < html_.size() && html_[pos_] == '=') {
        ++pos_;
        SkipSpace();
        if (pos_ >= html_.size()) Fail(tag_offset, "unterminated tag");
        const char quote = html_[pos_];
        if (quote == '"' || quote == '\'') {
          const std::size_t end = html_.find(quote, pos_ + 1);
          if (end == std::string_view::npos) {
            Fail(pos_, "unterminated attribute value");
          }
          value = html_.substr(pos_ + 1, end - pos_ - 1);
          pos_ = end + 1;
        } else {
          const std::size_t start = pos_;
          while (pos_ < html_.size() &&
                 !std::isspace(static_cast<unsigned char>(html_[pos_])) &&
                 html_[pos_] != '>') {
            ++pos_;
          }
          value = html_.substr(start, pos_ - start);
        }
      }
      if (name == "colspan") attrs.colspan = ParseSpan(value, attr_offset);
      if (name == "rowspan") attrs.rowspan = ParseSpan(value, attr_offset);
    }
  }

  bool InsideCell() const {
    return std::any_of(stack_.begin(), stack_.end(), [](const OpenElement& e) {
      return e.name == "td";
    });
  }

  int ParentNode() const { return stack_.empty() ? -1 : stack_.back().node; }
  const std::string& ParentName() const { return stack_.back().name; }

  void CloseImplicitBody() {
    if (!stack_.empty() && stack_.back().implicit) stack_.pop_back();
  }

  void ParseStartTag() {
    const std::size_t offset = pos_;
    ++pos_;
    std::string name = ReadName();
    if (name.empty()) Fail(offset, "malformed tag");
    const Attributes attrs = ReadAttributes(offset);

    if (InsideCell()) {
      // Cell content carries no structure.
      if (!attrs.self_closing && !IsVoidElement(name)) {
        stack_.push_back({name, offset, -1, false});
      }
      return;
    }
    if (root_closed_) Fail(offset, "content after </table>");
    if (name == "th") name = "td";

    if (name == "table") {
      if (!stack_.empty() || !tree_.empty()) {
        Fail(offset, "nested or repeated <table>");
      }
      const int node = tree_.AddNode(-1, TableTag::kTable);
      Push(name, offset, node, attrs);
      return;
    }
    if (stack_.empty()) Fail(offset, "<" + name + "> outside <table>");

    if (name == "thead" || name == "tbody") {
      CloseImplicitBody();
      if (ParentName() != "table") {
        Fail(offset, "<" + name + "> must be a child of <table>");
      }
      const int node = tree_.AddNode(
          ParentNode(), name == "thead" ? TableTag::kThead : TableTag::kTbody);
      Push(name, offset, node, attrs);
      return;
    }
    if (name == "tr") {
      if (ParentName() == "table") {
        const int body = tree_.AddNode(ParentNode(), TableTag::kTbody);
        stack_.push_back({"tbody", offset, body, true});
      }
      if (ParentName() != "thead" && ParentName() != "tbody") {
        Fail(offset, "<tr> outside <thead>/<tbody>");
      }
      Push(name, offset, tree_.AddNode(ParentNode(), TableTag::kTr), attrs);
      return;
    }
    if (name == "td") {
      if (ParentName() != "tr") Fail(offset, "<td> outside <tr>");
      const int node = tree_.AddNode(ParentNode(), TableTag::kTd,
                                     attrs.colspan.value_or(1),
                                     attrs.rowspan.value_or(1));
      Push(name, offset, node, attrs);
      return;
    }
    if (IsVoidElement(name) || attrs.self_closing) return;
    Fail(offset, "unexpected <" + name + "> outside a cell");
  }

  void Push(const std::string& name, std::size_t offset, int node,
            const Attributes& attrs) {
    if (attrs.self_closing) {
      if (name == "table") root_closed_ = true;
      return;
    }
    stack_.push_back({name, offset, node, false});
  }

  void ParseEndTag() {
    const std::size_t offset = pos_;
    pos_ += 2;
    std::string name = ReadName();
    SkipSpace();
    if (pos_ >= html_.size() || html_[pos_] != '>') {
      Fail(offset, "malformed end tag");
    }
    ++pos_;
    const bool in_cell_content = InsideCell() && stack_.back().name != "td";
    if (!in_cell_content && name == "th") name = "td";
    if (IsVoidElement(name)) return;
    if (name == "table") CloseImplicitBody();
    if (stack_.empty()) Fail(offset, "unexpected </" + name + ">");
    if (stack_.back().implicit) {
      Fail(offset, "</" + name + "> closes an implicit <tbody>");
    }
    if (stack_.back().name != name) {
      Fail(offset, "</" + name + "> does not close <" + stack_.back().name +
                       ">");
    }
    stack_.pop_back();
    if (name == "table" && stack_.empty()) root_closed_ = true;
  }

  std::string_view html_;
  std::size_t pos_ = 0;
  std::vector<OpenElement> stack_;
  TableTree tree_;
  bool root_closed_ = false;
};

// Postorder view used by the edit-distance program.
struct PostorderTree {
  std::vector<const TreeNode*> node;  // by postorder index
  std::vector<int> leftmost;          // leftmost leaf, postorder index
  std::vector<int> keyroots;          // ascending

  explicit PostorderTree(const TableTree& tree) {
    if (tree.empty()) return;
    const int n = tree.size();
    std::vector<int> post_of(n, -1);
    std::vector<int> order;
    order.reserve(n);
    // Iterative postorder over (node, next child) frames.
    std::vector<std::pair<int, std::size_t>> stack = {{0, 0}};
    while (!stack.empty()) {
      auto& [id, next] = stack.back();
      const auto& children = tree.nodes[id].children;
      if (next < children.size()) {
        const int child = children[next++];
        stack.push_back({child, 0});
        continue;
      }
      post_of[id] = static_cast<int>(order.size());
      order.push_back(id);
      stack.pop_back();
    }
    node.resize(order.size());
    leftmost.resize(order.size());
    for (std::size_t p = 0; p < order.size(); ++p) {
      const TreeNode& current = tree.nodes[order[p]];
      node[p] = &current;
      leftmost[p] = current.children.empty()
                        ? static_cast<int>(p)
                        : leftmost[post_of[current.children.front()]];
    }
    std::vector<int> last_with_leftmost(order.size(), -1);
    for (int i = 0; i < size(); ++i) last_with_leftmost[leftmost[i]] = i;
    for (int i = 0; i < size(); ++i) {
      if (last_with_leftmost[leftmost[i]] == i) keyroots.push_back(i);
    }
  }

  int size() const { return static_cast<int>(node.size()); }
};

}  // namespace

TableTree ParseTableHtml(std::string_view html) {
  return HtmlTableParser(html).Parse();
}

double EditCosts::Rename(const TreeNode& a, const TreeNode& b) const {
  if (a.tag != b.tag) return rename_cost;
  if (a.tag == TableTag::kTd &&
      (a.colspan != b.colspan || a.rowspan != b.rowspan)) {
    return rename_cost;
  }
  return 0.0;
}

double TreeEditDistance(const TableTree& a, const TableTree& b,
                        const EditCosts& costs) {
  if (a.empty()) return b.size() * costs.insert_cost;
  if (b.empty()) return a.size() * costs.delete_cost;

  const PostorderTree ta(a);
  const PostorderTree tb(b);
  const int n = ta.size();
  const int m = tb.size();
  std::vector<double> tree_dist(static_cast<std::size_t>(n) * m, 0.0);
  std::vector<double> forest((n + 1) * static_cast<std::size_t>(m + 1), 0.0);
  const auto td = [&](int i, int j) -> double& {
    return tree_dist[static_cast<std::size_t>(i) * m + j];
  };

  for (int i : ta.keyroots) {
    for (int j : tb.keyroots) {
      const int li = ta.leftmost[i];
      const int lj = tb.leftmost[j];
      const int rows = i - li + 2;
      const int cols = j - lj + 2;
      const auto fd = [&](int r, int c) -> double& {
        return forest[static_cast<std::size_t>(r) * cols + c];
      };
      fd(0, 0) = 0.0;
      for (int r = 1; r < rows; ++r) fd(r, 0) = fd(r - 1, 0) + costs.delete_cost;
      for (int c = 1; c < cols; ++c) fd(0, c) = fd(0, c - 1) + costs.insert_cost;
      for (int r = 1; r < rows; ++r) {
        const int i1 = li + r - 1;
        for (int c = 1; c < cols; ++c) {
          const int j1 = lj + c - 1;
          const double del = fd(r - 1, c) + costs.delete_cost;
          const double ins = fd(r, c - 1) + costs.insert_cost;
          if (ta.leftmost[i1] == li && tb.leftmost[j1] == lj) {
            const double ren =
                fd(r - 1, c - 1) + costs.Rename(*ta.node[i1], *tb.node[j1]);
            fd(r, c) = std::min({del, ins, ren});
            td(i1, j1) = fd(r, c);
          } else {
            const int p = ta.leftmost[i1] - li;
            const int q = tb.leftmost[j1] - lj;
            fd(r, c) = std::min({del, ins, fd(p, q) + td(i1, j1)});
          }
        }
      }
    }
  }
  return td(n - 1, m - 1);
}

double Teds(const TableTree& a, const TableTree& b) {
  const int denom = std::max(a.size(), b.size());
  if (denom == 0) return 1.0;
  const double score = 1.0 - TreeEditDistance(a, b) / denom;
  return std::clamp(score, 0.0, 1.0);
}

bool IsComplexTree(const TableTree& tree) {
  return std::any_of(tree.nodes.begin(), tree.nodes.end(),
                     [](const TreeNode& node) {
                       return node.tag == TableTag::kTd &&
                              (node.colspan > 1 || node.rowspan > 1);
                     });
}

namespace {

std::optional<double> OrderFreeMean(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const double sum = std::accumulate(values.begin(), values.end(), 0.0);
  return sum / static_cast<double>(values.size());
}

}  // namespace

CorpusTeds ScoreCorpus(const std::vector<TedsSample>& samples) {
  CorpusTeds result;
  std::vector<double> simple;
  std::vector<double> complex;
  std::vector<double> overall;
  for (const auto& sample : samples) {
    TableTree gt;
    try {
      gt = ParseTableHtml(sample.ground_truth_html);
    } catch (const ParseError& e) {
      throw Error(ErrorCategory::kCorpus,
                  fmt::format("ground truth of sample '{}' does not parse: {}",
                              sample.id, e.what()));
    }
    TedsScore score{sample.id, 0.0, IsComplexTree(gt), std::nullopt};
    try {
      score.score = Teds(ParseTableHtml(sample.predicted_html), gt);
    } catch (const ParseError& e) {
      score.prediction_error = e.what();
    }
    (score.complex ? complex : simple).push_back(score.score);
    overall.push_back(score.score);
    result.scores.push_back(std::move(score));
  }
  result.simple_mean = OrderFreeMean(std::move(simple));
  result.complex_mean = OrderFreeMean(std::move(complex));
  result.overall_mean = OrderFreeMean(std::move(overall));
  return result;
}

}  // namespace tabstruct
