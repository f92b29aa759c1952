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
#include "tabstruct/labelspace.h"

#include <cstddef>

#include <fmt/format.h>

#include "tabstruct/error.h"

namespace tabstruct {

std::string_view ClassName(ComponentClass cls) {
  switch (cls) {
    case ComponentClass::kTable:
      return "Table";
    case ComponentClass::kColumn:
      return "Column";
    case ComponentClass::kRow:
      return "Row";
    case ComponentClass::kSpanningCell:
      return "Spanning Cell";
    case ComponentClass::kProjectedRowHeader:
      return "Projected Row Header";
    case ComponentClass::kColumnHeader:
      return "Column Header";
    case ComponentClass::kPseudoHeaderRow:
      return "Pseudo Header Row";
  }
  return "?";
}

ComponentClass ClassFromId(int id) {
  if (id < 0 || id >= kNumSingleLabelClasses) {
    throw Error(ErrorCategory::kInput, fmt::format("unknown class id {}", id));
  }
  return static_cast<ComponentClass>(id);
}

std::string_view ModeName(LabelMode mode) {
  return mode == LabelMode::kMultiLabel ? "multi" : "single";
}

std::optional<std::string> FindSharedBox(
    const std::vector<ComponentInstance>& instances, double tolerance) {
  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (std::size_t j = i + 1; j < instances.size(); ++j) {
      if (instances[i].cls == instances[j].cls) continue;
      if (BoxesMatch(instances[i].box, instances[j].box, tolerance)) {
        return fmt::format("{} #{} {} and {} #{} {} share a box",
                           ClassName(instances[i].cls), i,
                           instances[i].box.ToString(),
                           ClassName(instances[j].cls), j,
                           instances[j].box.ToString());
      }
    }
  }
  return std::nullopt;
}

AnnotationSet EncodePseudo(const AnnotationSet& gt,
                           double box_match_tolerance) {
  if (gt.mode != LabelMode::kMultiLabel) {
    throw Error(ErrorCategory::kMode,
                "encode expects multi-label annotations for image '" +
                    gt.image_id + "'");
  }
  const auto& in = gt.instances;
  const std::size_t n = in.size();
  std::vector<bool> dropped(n, false);
  // For a fused pair, the lower index carries the pseudo instance and the
  // higher index is dropped.
  std::vector<bool> fused(n, false);

  for (std::size_t i = 0; i < n; ++i) {
    if (in[i].cls != ComponentClass::kRow) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (in[j].cls == ComponentClass::kProjectedRowHeader &&
          BoxesMatch(in[i].box, in[j].box, box_match_tolerance)) {
        dropped[i] = true;
        break;
      }
    }
  }

  std::vector<bool> header_used(n, false);
  std::vector<std::size_t> partner(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (in[i].cls != ComponentClass::kRow || dropped[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (in[j].cls != ComponentClass::kColumnHeader || header_used[j]) {
        continue;
      }
      if (BoxesMatch(in[i].box, in[j].box, box_match_tolerance)) {
        header_used[j] = true;
        partner[i] = j;
        break;
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (partner[i] == n) continue;
    const std::size_t j = partner[i];
    fused[std::min(i, j)] = true;
    dropped[std::max(i, j)] = true;
  }

  AnnotationSet out{gt.image_id, {}, LabelMode::kSingleLabel};
  out.instances.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (dropped[i]) continue;
    if (!fused[i]) {
      out.instances.push_back(in[i]);
      continue;
    }
    // Locate the Row of this pair; it supplies the box and confidence.
    std::size_t row = i;
    if (in[i].cls != ComponentClass::kRow) {
      for (std::size_t k = 0; k < n; ++k) {
        if (partner[k] == i) row = k;
      }
    }
    out.instances.push_back({in[row].box, ComponentClass::kPseudoHeaderRow,
                             in[row].confidence});
  }

  if (auto clash = FindSharedBox(out.instances, box_match_tolerance)) {
    throw Error(ErrorCategory::kConsistency,
                fmt::format("image '{}': {}", gt.image_id, *clash));
  }
  return out;
}

AnnotationSet DecodePseudo(const AnnotationSet& pred) {
  if (pred.mode != LabelMode::kSingleLabel) {
    throw Error(ErrorCategory::kMode,
                "decode expects single-label predictions for image '" +
                    pred.image_id + "'");
  }
  if (!pred.instances.empty()) {
    const bool scored = pred.instances.front().confidence.has_value();
    for (const auto& inst : pred.instances) {
      if (inst.confidence.has_value() != scored) {
        throw Error(ErrorCategory::kInput,
                    "image '" + pred.image_id +
                        "' mixes scored and unscored instances");
      }
    }
  }

  AnnotationSet out{pred.image_id, {}, LabelMode::kMultiLabel};
  out.instances.reserve(pred.instances.size() * 2);
  for (const auto& inst : pred.instances) {
    switch (inst.cls) {
      case ComponentClass::kProjectedRowHeader:
        out.instances.push_back(inst);
        out.instances.push_back(
            {inst.box, ComponentClass::kRow, inst.confidence});
        break;
      case ComponentClass::kPseudoHeaderRow:
        out.instances.push_back(
            {inst.box, ComponentClass::kRow, inst.confidence});
        out.instances.push_back(
            {inst.box, ComponentClass::kColumnHeader, inst.confidence});
        break;
      default:
        out.instances.push_back(inst);
    }
  }
  return out;
}

}  // namespace tabstruct
