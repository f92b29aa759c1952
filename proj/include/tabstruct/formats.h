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
#ifndef TABSTRUCT_FORMATS_H_
#define TABSTRUCT_FORMATS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tabstruct/cocoeval.h"
#include "tabstruct/labelspace.h"

namespace tabstruct {

inline constexpr int kSchemaVersion = 1;

// One image of a detection or ground-truth corpus file.
//
// On disk:
//   {"image_id": "...", "width": W, "height": H,
//    "instances": [{"bbox": [x1, y1, x2, y2], "class_id": k, "score": s}],
//    "html": "<table>...</table>",
//    "content_extents": [[x1, y1, x2, y2], ...]}
// "score", "html" and "content_extents" are optional. Content extents, when
// present, run parallel to "instances".
struct ImageRecord {
  std::string image_id;
  double width = 0.0;
  double height = 0.0;
  std::vector<ComponentInstance> instances;
  std::optional<std::string> html;
  std::vector<BBox> content_extents;

  // Fields this version does not interpret, written back unchanged.
  nlohmann::json extra = nlohmann::json::object();
  std::vector<nlohmann::json> instance_extra;  // empty or parallel
};

// Header {"schema_version": 1, "label_mode": "multi" | "single"} plus
// "images". Detection and ground-truth files share this layout.
struct CorpusFile {
  int schema_version = kSchemaVersion;
  LabelMode label_mode = LabelMode::kMultiLabel;
  std::vector<ImageRecord> images;
  nlohmann::json extra = nlohmann::json::object();
};

// Throws a schema error naming the record index and field path, e.g.
// "images[3].instances[2].class_id". Out-of-image coordinates are clamped and
// reported through `warnings`.
CorpusFile ParseCorpus(std::string_view text,
                       std::vector<std::string>* warnings = nullptr);

// Canonical form: two-space indented JSON, keys sorted, trailing newline.
std::string SerializeCorpus(const CorpusFile& corpus);

CorpusFile LoadCorpus(const std::filesystem::path& path,
                      std::vector<std::string>* warnings = nullptr);
void SaveCorpus(const CorpusFile& corpus, const std::filesystem::path& path);

// Throws an io error on failure.
std::string ReadTextFile(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view content);

AnnotationSet ToAnnotationSet(const ImageRecord& record, LabelMode mode);
std::vector<AnnotationSet> ToAnnotationSets(const CorpusFile& corpus);
InstancesByImage ToInstancesByImage(const CorpusFile& corpus);

}  // namespace tabstruct

#endif  // TABSTRUCT_FORMATS_H_
