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
#ifndef TABSTRUCT_ANCHORS_H_
#define TABSTRUCT_ANCHORS_H_

#include <map>
#include <string>
#include <vector>

#include "tabstruct/geometry.h"
#include "tabstruct/labelspace.h"

namespace tabstruct {

// Histogram buckets are integer-wide on the folded ratio: bucket k counts
// ratios in [k, k+1). The last bucket is open-ended.
inline constexpr int kOpenTopRatioBucket = 140;

struct DatasetStats {
  long n_images = 0;
  long n_objects = 0;
  double avg_objects_per_image = 0.0;
  std::map<int, long> folded_aspect_ratio_histogram;
};

// Throws an input error for an empty corpus.
DatasetStats ComputeDatasetStats(const std::vector<AnnotationSet>& corpus);

// Counts-only statistics for a COCO-style instances document (an object with
// "images" and "annotations" arrays, bbox as [x, y, w, h]).
DatasetStats ComputeCocoJsonStats(const std::string& json_text);

// max(r, 1/r). Throws an input error unless r > 0.
double FoldRatio(double ratio);

// CSV with header "bucket,count"; bucket label of the open top is "140+".
std::string HistogramCsv(const DatasetStats& stats);

struct AnchorLevel {
  int stride = 16;
  // Anchor side lengths for ratio 1.
  std::vector<double> scales;
};

// Ratio list tuned for table components.
std::vector<double> TableAnchorRatios();
// The usual {0.5, 1, 2} of common-object detectors.
std::vector<double> DefaultAnchorRatios();

struct AnchorConfig {
  std::vector<double> aspect_ratios = TableAnchorRatios();
  // Strides 4..64, one scale of 8 x stride per level.
  std::vector<AnchorLevel> levels = DefaultLevels();

  static std::vector<AnchorLevel> DefaultLevels();

  // Throws a config error for unsorted or non-positive ratios or scales.
  void Validate() const;
};

struct FeatureMapSize {
  int height = 0;
  int width = 0;
};

// Feature map extents for an image: ceil(size / stride) per level.
std::vector<FeatureMapSize> FeatureMapSizesFor(const AnchorConfig& cfg,
                                               double image_width,
                                               double image_height);

// For every level, grid position (centered at (i + 0.5) * stride), scale s
// and ratio h/w = rho: one anchor with w = s / sqrt(rho), h = s * sqrt(rho).
// Level-major, then row, column, scale, ratio.
std::vector<BBox> GenerateAnchors(const AnchorConfig& cfg,
                                  const std::vector<FeatureMapSize>& sizes);

struct AnchorCoverage {
  double fraction_iou_50 = 0.0;
  double fraction_iou_70 = 0.0;
  double mean_best_iou = 0.0;
  std::vector<double> best_iou;  // per ground truth
};

// Best IoU over all anchors for each ground-truth box. Throws an input error
// when either list is empty.
AnchorCoverage ComputeAnchorCoverage(const std::vector<BBox>& anchors,
                                     const std::vector<BBox>& gts);

}  // namespace tabstruct

#endif  // TABSTRUCT_ANCHORS_H_
