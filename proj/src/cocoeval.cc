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
#include "tabstruct/cocoeval.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "tabstruct/error.h"

namespace tabstruct {

std::vector<double> MatchConfig::DefaultIouThresholds() {
  std::vector<double> thresholds;
  for (int i = 0; i < 10; ++i) thresholds.push_back((50 + 5 * i) / 100.0);
  return thresholds;
}

std::vector<double> MatchConfig::DefaultRecallLevels() {
  std::vector<double> levels;
  for (int i = 0; i <= 100; ++i) levels.push_back(i / 100.0);
  return levels;
}

void MatchConfig::Validate() const {
  if (iou_thresholds.empty()) {
    throw Error(ErrorCategory::kConfig, "no IoU thresholds");
  }
  for (std::size_t i = 0; i < iou_thresholds.size(); ++i) {
    const double t = iou_thresholds[i];
    if (!(t >= 0.0 && t <= 1.0) || (i > 0 && t <= iou_thresholds[i - 1])) {
      throw Error(ErrorCategory::kConfig,
                  "IoU thresholds must increase strictly within [0, 1]");
    }
  }
  if (recall_levels.empty() ||
      !std::is_sorted(recall_levels.begin(), recall_levels.end()) ||
      recall_levels.front() < 0.0 || recall_levels.back() > 1.0) {
    throw Error(ErrorCategory::kConfig,
                "recall levels must be sorted within [0, 1]");
  }
  if (max_detections_per_image < 1) {
    throw Error(ErrorCategory::kConfig, "max_detections_per_image must be >= 1");
  }
}

namespace {

std::vector<std::size_t> RankByConfidence(
    std::span<const ComponentInstance> preds) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  for (const auto& p : preds) {
    if (!p.confidence) {
      throw Error(ErrorCategory::kInput, "prediction without confidence");
    }
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return *preds[a].confidence > *preds[b].confidence;
                   });
  return order;
}

}  // namespace

MatchResult MatchDetections(std::span<const ComponentInstance> preds,
                            std::span<const ComponentInstance> gts,
                            double iou_threshold,
                            const std::vector<bool>& gt_ignored) {
  MatchResult result;
  result.order = RankByConfidence(preds);
  const auto is_ignored = [&](std::size_t g) {
    return !gt_ignored.empty() && gt_ignored[g];
  };
  std::vector<bool> gt_taken(gts.size(), false);
  for (std::size_t p : result.order) {
    int best = -1;
    double best_iou = iou_threshold;
    // Two passes: regular ground truths first, ignored ones as a fallback.
    for (int pass = 0; pass < 2 && best < 0; ++pass) {
      for (std::size_t g = 0; g < gts.size(); ++g) {
        if (gt_taken[g] || is_ignored(g) != (pass == 1)) continue;
        const double iou = Iou(preds[p].box, gts[g].box);
        if (iou >= best_iou && (best < 0 || iou > best_iou)) {
          best = static_cast<int>(g);
          best_iou = iou;
        }
      }
    }
    if (best >= 0) gt_taken[best] = true;
    result.matched_gt.push_back(best);
    result.is_true_positive.push_back(best >= 0);
    result.ignored.push_back(best >= 0 && is_ignored(best));
  }
  return result;
}

std::optional<double> AveragePrecision(const std::vector<bool>& tp_sequence,
                                       long n_ground_truth,
                                       const std::vector<double>& recall_levels) {
  if (n_ground_truth < 0) {
    throw Error(ErrorCategory::kInput,
                fmt::format("negative ground-truth count {}", n_ground_truth));
  }
  if (n_ground_truth == 0) {
    if (tp_sequence.empty()) return std::nullopt;
    return 0.0;
  }
  const std::size_t n = tp_sequence.size();
  std::vector<double> recall(n);
  std::vector<double> precision(n);
  long tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (tp_sequence[i]) ++tp;
    recall[i] = static_cast<double>(tp) / static_cast<double>(n_ground_truth);
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  for (std::size_t i = n; i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double sum = 0.0;
  for (double level : recall_levels) {
    const auto it = std::lower_bound(recall.begin(), recall.end(), level);
    if (it != recall.end()) sum += precision[it - recall.begin()];
  }
  return sum / static_cast<double>(recall_levels.size());
}

namespace {

enum class AreaRange { kAll, kSmall, kMedium, kLarge };

bool InRange(const BBox& box, AreaRange range) {
  switch (range) {
    case AreaRange::kAll:
      return true;
    case AreaRange::kSmall:
      return ClassifySize(box) == SizeBucket::kSmall;
    case AreaRange::kMedium:
      return ClassifySize(box) == SizeBucket::kMedium;
    case AreaRange::kLarge:
      return ClassifySize(box) == SizeBucket::kLarge;
  }
  return false;
}

struct ClassCorpus {
  // Per image, in image-id order.
  std::vector<std::vector<ComponentInstance>> preds;
  std::vector<std::vector<ComponentInstance>> gts;
};

class CorpusEvaluator {
 public:
  CorpusEvaluator(const InstancesByImage& preds, const InstancesByImage& gts,
                  const MatchConfig& cfg)
      : cfg_(cfg) {
    for (const auto& [image, instances] : preds) {
      if (!gts.count(image)) {
        throw Error(ErrorCategory::kCorpus,
                    "predictions for image '" + image +
                        "' which has no ground truth");
      }
    }
    for (const auto& [image, gt_instances] : gts) {
      std::array<std::vector<ComponentInstance>, kNumMultiLabelClasses> p;
      std::array<std::vector<ComponentInstance>, kNumMultiLabelClasses> g;
      for (const auto& inst : gt_instances) g[Slot(inst, image)].push_back(inst);
      if (auto it = preds.find(image); it != preds.end()) {
        for (const auto& inst : it->second) {
          if (!inst.confidence) {
            throw Error(ErrorCategory::kInput,
                        "prediction without confidence in image '" + image +
                            "'");
          }
          p[Slot(inst, image)].push_back(inst);
        }
      }
      for (int k = 0; k < kNumMultiLabelClasses; ++k) {
        classes_[k].preds.push_back(Truncate(std::move(p[k])));
        classes_[k].gts.push_back(std::move(g[k]));
      }
    }
  }

  // AP of class k at one threshold; nullopt when the class is not scored.
  std::optional<double> ClassAp(int k, double threshold,
                                AreaRange range) const {
    const ClassCorpus& corpus = classes_[k];
    struct Scored {
      double confidence;
      bool tp;
    };
    std::vector<Scored> scored;
    long n_gt = 0;
    for (std::size_t img = 0; img < corpus.gts.size(); ++img) {
      const auto& gts = corpus.gts[img];
      const auto& preds = corpus.preds[img];
      std::vector<bool> ignored(gts.size());
      for (std::size_t g = 0; g < gts.size(); ++g) {
        ignored[g] = !InRange(gts[g].box, range);
        if (!ignored[g]) ++n_gt;
      }
      const MatchResult match = MatchDetections(preds, gts, threshold, ignored);
      for (std::size_t i = 0; i < match.order.size(); ++i) {
        const auto& pred = preds[match.order[i]];
        if (match.ignored[i]) continue;
        if (!match.is_true_positive[i] && !InRange(pred.box, range)) continue;
        scored.push_back({*pred.confidence, match.is_true_positive[i]});
      }
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const Scored& a, const Scored& b) {
                       return a.confidence > b.confidence;
                     });
    std::vector<bool> sequence;
    sequence.reserve(scored.size());
    for (const auto& s : scored) sequence.push_back(s.tp);
    return AveragePrecision(sequence, n_gt, cfg_.recall_levels);
  }

  // Class AP averaged over the given thresholds.
  std::optional<double> ClassMeanAp(int k, const std::vector<double>& thresholds,
                                    AreaRange range) const {
    double sum = 0.0;
    for (double t : thresholds) {
      const auto ap = ClassAp(k, t, range);
      if (!ap) return std::nullopt;
      sum += *ap;
    }
    return sum / static_cast<double>(thresholds.size());
  }

  // Mean over scored classes, nullopt when none is scored.
  std::optional<double> MeanOverClasses(const std::vector<double>& thresholds,
                                        AreaRange range) const {
    double sum = 0.0;
    int count = 0;
    for (int k = 0; k < kNumMultiLabelClasses; ++k) {
      if (const auto ap = ClassMeanAp(k, thresholds, range)) {
        sum += *ap;
        ++count;
      }
    }
    if (count == 0) return std::nullopt;
    return sum / count;
  }

 private:
  static int Slot(const ComponentInstance& inst, const std::string& image) {
    const int id = ClassId(inst.cls);
    if (id >= kNumMultiLabelClasses) {
      throw Error(ErrorCategory::kInput,
                  fmt::format("image '{}': {} is not a multi-label class; "
                              "decode predictions first",
                              image, ClassName(inst.cls)));
    }
    return id;
  }

  std::vector<ComponentInstance> Truncate(
      std::vector<ComponentInstance> preds) const {
    const auto limit = static_cast<std::size_t>(cfg_.max_detections_per_image);
    if (preds.size() <= limit) return preds;
    const auto order = RankByConfidence(preds);
    std::vector<ComponentInstance> kept;
    kept.reserve(limit);
    for (std::size_t i = 0; i < limit; ++i) kept.push_back(preds[order[i]]);
    return kept;
  }

  const MatchConfig& cfg_;
  std::array<ClassCorpus, kNumMultiLabelClasses> classes_;
};

}  // namespace

ApReport EvaluateCorpus(const InstancesByImage& preds,
                        const InstancesByImage& gts, const MatchConfig& cfg) {
  cfg.Validate();
  const CorpusEvaluator evaluator(preds, gts, cfg);
  ApReport report;
  double class_sum = 0.0;
  int class_count = 0;
  for (int k = 0; k < kNumMultiLabelClasses; ++k) {
    if (const auto ap =
            evaluator.ClassMeanAp(k, cfg.iou_thresholds, AreaRange::kAll)) {
      report.per_class[static_cast<ComponentClass>(k)] = *ap;
      class_sum += *ap;
      ++class_count;
    }
  }
  if (class_count > 0) report.mean_ap = class_sum / class_count;
  for (double t : cfg.iou_thresholds) {
    report.ap_by_threshold.push_back(
        evaluator.MeanOverClasses({t}, AreaRange::kAll).value_or(0.0));
  }
  report.ap50 = evaluator.MeanOverClasses({0.5}, AreaRange::kAll).value_or(0.0);
  report.ap75 =
      evaluator.MeanOverClasses({0.75}, AreaRange::kAll).value_or(0.0);
  report.ap_small =
      evaluator.MeanOverClasses(cfg.iou_thresholds, AreaRange::kSmall);
  report.ap_medium =
      evaluator.MeanOverClasses(cfg.iou_thresholds, AreaRange::kMedium);
  report.ap_large =
      evaluator.MeanOverClasses(cfg.iou_thresholds, AreaRange::kLarge);
  return report;
}

}  // namespace tabstruct
