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
#include "tabstruct/anchors.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "json.hpp"
#include "tabstruct/error.h"

namespace tabstruct {

namespace {

int RatioBucket(double folded) {
  return std::min(static_cast<int>(std::floor(folded)), kOpenTopRatioBucket);
}

void AddToHistogram(double width, double height, DatasetStats& stats) {
  if (width <= 0.0 || height <= 0.0) return;
  ++stats.folded_aspect_ratio_histogram[RatioBucket(FoldRatio(height / width))];
}

void FinishAverage(DatasetStats& stats) {
  stats.avg_objects_per_image = static_cast<double>(stats.n_objects) /
                                static_cast<double>(stats.n_images);
}

}  // namespace

double FoldRatio(double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw Error(ErrorCategory::kInput,
                fmt::format("aspect ratio {} must be positive", ratio));
  }
  return std::max(ratio, 1.0 / ratio);
}

DatasetStats ComputeDatasetStats(const std::vector<AnnotationSet>& corpus) {
  if (corpus.empty()) {
    throw Error(ErrorCategory::kInput, "statistics of an empty corpus");
  }
  DatasetStats stats;
  stats.n_images = static_cast<long>(corpus.size());
  for (const auto& image : corpus) {
    stats.n_objects += static_cast<long>(image.instances.size());
    for (const auto& inst : image.instances) {
      AddToHistogram(inst.box.width(), inst.box.height(), stats);
    }
  }
  FinishAverage(stats);
  return stats;
}

DatasetStats ComputeCocoJsonStats(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCategory::kSchema, e.what());
  }
  if (!doc.is_object() || !doc.contains("images") ||
      !doc.contains("annotations") || !doc["images"].is_array() ||
      !doc["annotations"].is_array()) {
    throw Error(ErrorCategory::kSchema,
                "expected an object with 'images' and 'annotations' arrays");
  }
  DatasetStats stats;
  stats.n_images = static_cast<long>(doc["images"].size());
  if (stats.n_images == 0) {
    throw Error(ErrorCategory::kInput, "statistics of an empty corpus");
  }
  stats.n_objects = static_cast<long>(doc["annotations"].size());
  for (const auto& ann : doc["annotations"]) {
    const auto bbox = ann.find("bbox");
    if (bbox == ann.end() || !bbox->is_array() || bbox->size() != 4) continue;
    AddToHistogram((*bbox)[2].get<double>(), (*bbox)[3].get<double>(), stats);
  }
  FinishAverage(stats);
  return stats;
}

std::string HistogramCsv(const DatasetStats& stats) {
  std::string csv = "bucket,count\n";
  for (const auto& [bucket, count] : stats.folded_aspect_ratio_histogram) {
    if (bucket == kOpenTopRatioBucket) {
      csv += fmt::format("{}+,{}\n", bucket, count);
    } else {
      csv += fmt::format("{},{}\n", bucket, count);
    }
  }
  return csv;
}

std::vector<double> TableAnchorRatios() {
  return {0.0125, 0.025, 0.0625, 0.125, 0.25, 0.5, 1.0,
          2.0,    4.0,   8.0,    16.0,  40.0, 80.0};
}

std::vector<double> DefaultAnchorRatios() { return {0.5, 1.0, 2.0}; }

std::vector<AnchorLevel> AnchorConfig::DefaultLevels() {
  std::vector<AnchorLevel> levels;
  for (int stride : {4, 8, 16, 32, 64}) {
    levels.push_back({stride, {8.0 * stride}});
  }
  return levels;
}

void AnchorConfig::Validate() const {
  if (aspect_ratios.empty()) {
    throw Error(ErrorCategory::kConfig, "no aspect ratios");
  }
  if (!std::is_sorted(aspect_ratios.begin(), aspect_ratios.end())) {
    throw Error(ErrorCategory::kConfig, "aspect ratios must be ascending");
  }
  for (double r : aspect_ratios) {
    if (!(r > 0.0)) {
      throw Error(ErrorCategory::kConfig, "aspect ratios must be positive");
    }
  }
  for (const auto& level : levels) {
    if (level.stride < 1) {
      throw Error(ErrorCategory::kConfig, "strides must be positive");
    }
    for (double s : level.scales) {
      if (!(s > 0.0)) {
        throw Error(ErrorCategory::kConfig, "scales must be positive");
      }
    }
  }
}

std::vector<FeatureMapSize> FeatureMapSizesFor(const AnchorConfig& cfg,
                                               double image_width,
                                               double image_height) {
  std::vector<FeatureMapSize> sizes;
  for (const auto& level : cfg.levels) {
    sizes.push_back(
        {static_cast<int>(std::ceil(image_height / level.stride)),
         static_cast<int>(std::ceil(image_width / level.stride))});
  }
  return sizes;
}

std::vector<BBox> GenerateAnchors(const AnchorConfig& cfg,
                                  const std::vector<FeatureMapSize>& sizes) {
  cfg.Validate();
  if (sizes.size() != cfg.levels.size()) {
    throw Error(ErrorCategory::kConfig,
                fmt::format("{} feature maps for {} pyramid levels",
                            sizes.size(), cfg.levels.size()));
  }
  std::vector<BBox> anchors;
  for (std::size_t l = 0; l < cfg.levels.size(); ++l) {
    const AnchorLevel& level = cfg.levels[l];
    // Half extents per (scale, ratio), shared by every position of a level.
    std::vector<std::pair<double, double>> half;
    for (double s : level.scales) {
      for (double rho : cfg.aspect_ratios) {
        const double root = std::sqrt(rho);
        half.push_back({0.5 * s / root, 0.5 * s * root});
      }
    }
    anchors.reserve(anchors.size() + static_cast<std::size_t>(sizes[l].height) *
                                          sizes[l].width * half.size());
    for (int i = 0; i < sizes[l].height; ++i) {
      const double cy = (i + 0.5) * level.stride;
      for (int j = 0; j < sizes[l].width; ++j) {
        const double cx = (j + 0.5) * level.stride;
        for (const auto& [hw, hh] : half) {
          anchors.emplace_back(cx - hw, cy - hh, cx + hw, cy + hh);
        }
      }
    }
  }
  return anchors;
}

AnchorCoverage ComputeAnchorCoverage(const std::vector<BBox>& anchors,
                                     const std::vector<BBox>& gts) {
  if (anchors.empty()) {
    throw Error(ErrorCategory::kInput, "coverage with no anchors");
  }
  if (gts.empty()) {
    throw Error(ErrorCategory::kInput, "coverage with no ground truth");
  }
  AnchorCoverage coverage;
  coverage.best_iou.reserve(gts.size());
  long above_50 = 0;
  long above_70 = 0;
  for (const auto& gt : gts) {
    double best = 0.0;
    for (const auto& anchor : anchors) {
      if (anchor.x2() <= gt.x1() || anchor.x1() >= gt.x2() ||
          anchor.y2() <= gt.y1() || anchor.y1() >= gt.y2()) {
        continue;
      }
      best = std::max(best, Iou(anchor, gt));
    }
    coverage.best_iou.push_back(best);
    if (best >= 0.5) ++above_50;
    if (best >= 0.7) ++above_70;
  }
  const double n = static_cast<double>(gts.size());
  coverage.fraction_iou_50 = above_50 / n;
  coverage.fraction_iou_70 = above_70 / n;
  coverage.mean_best_iou =
      std::accumulate(coverage.best_iou.begin(), coverage.best_iou.end(), 0.0) /
      n;
  return coverage;
}

}  // namespace tabstruct
