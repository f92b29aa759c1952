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

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <tuple>

#include <fmt/format.h>

#include "tabstruct/cocoeval.h"
#include "tabstruct/error.h"
#include "tabstruct/fixtures.h"
#include "tabstruct/reconstruct.h"
#include "tabstruct/teds.h"

namespace tabstruct {

namespace {

constexpr std::array<std::pair<ComponentClass, std::string_view>,
                     kNumMultiLabelClasses>
    kClassSlugs = {{
        {ComponentClass::kTable, "table"},
        {ComponentClass::kColumn, "column"},
        {ComponentClass::kRow, "row"},
        {ComponentClass::kSpanningCell, "spanning_cell"},
        {ComponentClass::kProjectedRowHeader, "projected_row_header"},
        {ComponentClass::kColumnHeader, "column_header"},
    }};

std::string_view Slug(ComponentClass cls) {
  for (const auto& [c, slug] : kClassSlugs) {
    if (c == cls) return slug;
  }
  return "?";
}

std::vector<std::string_view> Split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(sep, start);
    parts.push_back(text.substr(start, end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return parts;
}

// FNV-1a, so per-image choices do not depend on the standard library's hash.
std::uint64_t MixSeed(std::uint64_t seed, std::string_view id) {
  std::uint64_t h = 1469598103934665603ull ^ seed;
  for (unsigned char ch : id) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

BBox Resize(const BBox& box, const PerturbationSpec& spec, double sign) {
  double dx = spec.magnitude;
  double dy = spec.magnitude;
  if (spec.unit == MagnitudeUnit::kFraction) {
    dx *= box.width();
    dy *= box.height();
  }
  dx *= sign;
  dy *= sign;
  const double x1 = box.x1() - dx;
  const double x2 = box.x2() + dx;
  const double y1 = box.y1() - dy;
  const double y2 = box.y2() + dy;
  if (sign < 0.0 && spec.magnitude > 0.0 && (x2 <= x1 || y2 <= y1)) {
    throw Error(ErrorCategory::kGeometry,
                fmt::format("shrinking {} by {} leaves no box", box.ToString(),
                            spec.Label()));
  }
  return BBox(x1, y1, x2, y2);
}

bool Vertical(ComponentClass cls) {
  return cls == ComponentClass::kRow ||
         cls == ComponentClass::kProjectedRowHeader ||
         cls == ComponentClass::kColumnHeader;
}

void MergePairs(AnnotationSet& out, const PerturbationSpec& spec) {
  const int pairs = static_cast<int>(spec.magnitude);
  if (pairs == 0) return;
  std::mt19937_64 rng(MixSeed(spec.seed, out.image_id));
  std::vector<bool> removed(out.instances.size(), false);
  for (ComponentClass cls : spec.target_classes) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < out.instances.size(); ++i) {
      if (out.instances[i].cls == cls) members.push_back(i);
    }
    const bool vertical = Vertical(cls);
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      const BBox& p = out.instances[a].box;
      const BBox& q = out.instances[b].box;
      return vertical ? std::tuple(p.y1(), p.x1(), a) < std::tuple(q.y1(), q.x1(), b)
                      : std::tuple(p.x1(), p.y1(), a) < std::tuple(q.x1(), q.y1(), b);
    });
    if (members.size() < 2) continue;
    std::vector<std::size_t> starts(members.size() - 1);
    std::iota(starts.begin(), starts.end(), 0);
    std::shuffle(starts.begin(), starts.end(), rng);
    std::vector<bool> used(members.size(), false);
    int merged = 0;
    for (std::size_t s : starts) {
      if (merged == pairs) break;
      if (used[s] || used[s + 1]) continue;
      used[s] = used[s + 1] = true;
      ComponentInstance& keep = out.instances[members[s]];
      keep.box = Hull(keep.box, out.instances[members[s + 1]].box);
      removed[members[s + 1]] = true;
      ++merged;
    }
  }
  std::vector<ComponentInstance> kept;
  for (std::size_t i = 0; i < out.instances.size(); ++i) {
    if (!removed[i]) kept.push_back(out.instances[i]);
  }
  out.instances = std::move(kept);
}

}  // namespace

std::string_view PerturbationModeName(PerturbationMode mode) {
  switch (mode) {
    case PerturbationMode::kDilate:
      return "dilate";
    case PerturbationMode::kShrink:
      return "shrink";
    case PerturbationMode::kSnapToMinimal:
      return "snap";
    case PerturbationMode::kMergeAdjacent:
      return "merge";
  }
  return "?";
}

void PerturbationSpec::Validate() const {
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) {
    throw Error(ErrorCategory::kConfig,
                fmt::format("magnitude {} must be finite and >= 0", magnitude));
  }
  if (mode == PerturbationMode::kMergeAdjacent &&
      (unit != MagnitudeUnit::kPixels || magnitude != std::floor(magnitude))) {
    throw Error(ErrorCategory::kConfig,
                "merge magnitude is a whole number of pairs");
  }
  if (target_classes.empty()) {
    throw Error(ErrorCategory::kConfig, "no target classes");
  }
  for (ComponentClass cls : target_classes) {
    if (ClassId(cls) >= kNumMultiLabelClasses) {
      throw Error(ErrorCategory::kConfig, "targets must be multi-label classes");
    }
  }
}

std::string PerturbationSpec::Label() const {
  std::string classes;
  for (ComponentClass cls : target_classes) {
    if (!classes.empty()) classes += '+';
    classes += Slug(cls);
  }
  const std::string amount = unit == MagnitudeUnit::kFraction
                                 ? fmt::format("{:g}%", magnitude * 100.0)
                                 : fmt::format("{:g}", magnitude);
  return fmt::format("{}:{}:{}", PerturbationModeName(mode), amount, classes);
}

PerturbationSpec ParsePerturbationSpec(std::string_view text) {
  const auto fail = [&](std::string_view why) -> PerturbationSpec {
    throw Error(ErrorCategory::kConfig,
                fmt::format("bad perturbation spec '{}': {}", text, why));
  };
  const std::vector<std::string_view> parts = Split(text, ':');
  if (parts.size() < 2 || parts.size() > 3) {
    return fail("expected mode:magnitude[:classes]");
  }
  PerturbationSpec spec;
  bool found = false;
  for (auto mode : {PerturbationMode::kDilate, PerturbationMode::kShrink,
                    PerturbationMode::kSnapToMinimal,
                    PerturbationMode::kMergeAdjacent}) {
    if (parts[0] == PerturbationModeName(mode)) {
      spec.mode = mode;
      found = true;
    }
  }
  if (!found) return fail("mode must be dilate, shrink, snap or merge");

  std::string_view amount = parts[1];
  if (!amount.empty() && amount.back() == '%') {
    spec.unit = MagnitudeUnit::kFraction;
    amount.remove_suffix(1);
  }
  double value = 0.0;
  const auto [end, ec] =
      std::from_chars(amount.data(), amount.data() + amount.size(), value);
  if (ec != std::errc() || end != amount.data() + amount.size()) {
    return fail("magnitude is not a number");
  }
  spec.magnitude =
      spec.unit == MagnitudeUnit::kFraction ? value / 100.0 : value;

  spec.target_classes = {spec.mode == PerturbationMode::kMergeAdjacent
                             ? ComponentClass::kRow
                             : ComponentClass::kColumn};
  if (parts.size() == 3) {
    spec.target_classes.clear();
    for (std::string_view name : Split(parts[2], '+')) {
      const auto it =
          std::find_if(kClassSlugs.begin(), kClassSlugs.end(),
                       [&](const auto& entry) { return entry.second == name; });
      if (it == kClassSlugs.end()) {
        return fail(fmt::format("unknown class '{}'", name));
      }
      spec.target_classes.insert(it->first);
    }
  }
  spec.Validate();
  return spec;
}

AnnotationSet Perturb(const AnnotationSet& gt,
                      const std::vector<BBox>& content_extents,
                      const PerturbationSpec& spec) {
  spec.Validate();
  if (gt.mode != LabelMode::kMultiLabel) {
    throw Error(ErrorCategory::kMode, "perturbation expects multi-label input");
  }
  if (spec.mode == PerturbationMode::kSnapToMinimal &&
      content_extents.size() != gt.instances.size()) {
    throw Error(ErrorCategory::kInput,
                fmt::format("image '{}': snapping needs one content extent per "
                            "component ({} for {})",
                            gt.image_id, content_extents.size(),
                            gt.instances.size()));
  }
  AnnotationSet out = gt;
  for (std::size_t i = 0; i < out.instances.size(); ++i) {
    ComponentInstance& inst = out.instances[i];
    inst.confidence = 1.0;
    if (!spec.target_classes.count(inst.cls)) continue;
    switch (spec.mode) {
      case PerturbationMode::kDilate:
        inst.box = Resize(inst.box, spec, 1.0);
        break;
      case PerturbationMode::kShrink:
        inst.box = Resize(inst.box, spec, -1.0);
        break;
      case PerturbationMode::kSnapToMinimal:
        inst.box = content_extents[i];
        break;
      case PerturbationMode::kMergeAdjacent:
        break;
    }
  }
  if (spec.mode == PerturbationMode::kMergeAdjacent) MergePairs(out, spec);
  return out;
}

std::vector<MisalignmentRow> MisalignmentReport(
    const CorpusFile& ground_truth, const std::vector<PerturbationSpec>& specs) {
  if (ground_truth.label_mode != LabelMode::kMultiLabel) {
    throw Error(ErrorCategory::kMode,
                "misalignment needs multi-label ground truth");
  }
  const InstancesByImage gts = ToInstancesByImage(ground_truth);
  for (const auto& record : ground_truth.images) {
    if (!record.html) {
      throw Error(ErrorCategory::kInput,
                  "image '" + record.image_id + "' has no ground-truth html");
    }
  }
  std::vector<MisalignmentRow> rows;
  for (const auto& spec : specs) {
    InstancesByImage preds;
    std::vector<TedsSample> samples;
    for (const auto& record : ground_truth.images) {
      const AnnotationSet perturbed =
          Perturb(ToAnnotationSet(record, LabelMode::kMultiLabel),
                  record.content_extents, spec);
      preds[record.image_id] = perturbed.instances;
      std::string html;
      try {
        html = ReconstructHtml(perturbed);
      } catch (const Error& e) {
        if (e.category() != ErrorCategory::kEmptyStructure) throw;
      }
      samples.push_back({record.image_id, std::move(html), *record.html});
    }
    const ApReport ap = EvaluateCorpus(preds, gts);
    const CorpusTeds teds = ScoreCorpus(samples);
    rows.push_back({spec.Label(), ap.mean_ap, teds.overall_mean.value_or(0.0)});
  }
  return rows;
}

std::string MisalignmentCsv(const std::vector<MisalignmentRow>& rows) {
  std::string csv = "spec,mAP,TEDS\n";
  for (const auto& row : rows) {
    csv += fmt::format("{},{:.6f},{:.6f}\n", row.label, row.mean_ap, row.teds);
  }
  return csv;
}

CorpusFile OversizedBoxFixture() {
  FixtureSpec spec;
  spec.n_images = 12;
  spec.span_probability = 0.5;
  spec.header_probability = 0.5;
  spec.seed = 8;
  return GenerateFixtures(spec).ground_truth;
}

std::vector<PerturbationSpec> OversizedBoxSpecs() {
  const std::set<ComponentClass> columns = {ComponentClass::kColumn};
  return {
      {PerturbationMode::kDilate, 0.0, MagnitudeUnit::kPixels, columns, 0},
      {PerturbationMode::kShrink, 0.35, MagnitudeUnit::kFraction, columns, 0},
      {PerturbationMode::kSnapToMinimal, 0.0, MagnitudeUnit::kPixels, columns, 0},
      {PerturbationMode::kDilate, 2.0, MagnitudeUnit::kPixels, columns, 0},
      {PerturbationMode::kMergeAdjacent, 1.0, MagnitudeUnit::kPixels,
       {ComponentClass::kRow}, 0},
  };
}

}  // namespace tabstruct
