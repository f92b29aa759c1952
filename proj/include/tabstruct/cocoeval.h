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
#ifndef TABSTRUCT_COCOEVAL_H_
#define TABSTRUCT_COCOEVAL_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tabstruct/geometry.h"
#include "tabstruct/labelspace.h"

namespace tabstruct {

struct MatchConfig {
  // 0.50:0.05:0.95 by default.
  std::vector<double> iou_thresholds = DefaultIouThresholds();
  // 101 points 0.00, 0.01, ..., 1.00 by default.
  std::vector<double> recall_levels = DefaultRecallLevels();
  int max_detections_per_image = 300;

  static std::vector<double> DefaultIouThresholds();
  static std::vector<double> DefaultRecallLevels();

  // Throws a config error unless thresholds are strictly increasing inside
  // [0, 1], recall levels sorted inside [0, 1], and max detections positive.
  void Validate() const;
};

struct MatchResult {
  // Prediction indices by descending confidence, ties in input order.
  std::vector<std::size_t> order;
  // Aligned with `order`.
  std::vector<bool> is_true_positive;
  // Ground-truth index matched by each ranked prediction, -1 when none.
  std::vector<int> matched_gt;
  // Ranked predictions excluded from scoring (size-restricted evaluation).
  std::vector<bool> ignored;
};

// Greedy matching for one class in one image. Each prediction in rank order
// takes the unmatched ground truth of highest IoU >= threshold (lowest index
// on ties). With `gt_ignored`, non-ignored ground truths are preferred and a
// prediction matched to an ignored one is itself ignored. Throws an input
// error for predictions without confidence.
MatchResult MatchDetections(std::span<const ComponentInstance> preds,
                            std::span<const ComponentInstance> gts,
                            double iou_threshold,
                            const std::vector<bool>& gt_ignored = {});

// Interpolated AP of a ranked TP/FP sequence: precision made non-increasing
// from the right, sampled at each recall level, averaged. Returns nullopt when
// there are neither ground truths nor predictions; 0 when there are
// predictions but no ground truth. Throws an input error for a negative
// ground-truth count.
std::optional<double> AveragePrecision(const std::vector<bool>& tp_sequence,
                                       long n_ground_truth,
                                       const std::vector<double>& recall_levels);

struct ApReport {
  double mean_ap = 0.0;
  double ap50 = 0.0;
  double ap75 = 0.0;
  // Absent when no class has ground truth or predictions in the bucket.
  std::optional<double> ap_small;
  std::optional<double> ap_medium;
  std::optional<double> ap_large;
  std::map<ComponentClass, double> per_class;
  // Class-mean AP at each configured IoU threshold.
  std::vector<double> ap_by_threshold;
};

using InstancesByImage = std::map<std::string, std::vector<ComponentInstance>>;

// Corpus-level COCO-style evaluation over the multi-label vocabulary. Throws
// a corpus error for predictions on images missing from the ground truth and
// an input error for pseudo-class instances.
ApReport EvaluateCorpus(const InstancesByImage& preds,
                        const InstancesByImage& gts,
                        const MatchConfig& cfg = {});

}  // namespace tabstruct

#endif  // TABSTRUCT_COCOEVAL_H_
