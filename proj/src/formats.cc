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
#include "tabstruct/formats.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include <fmt/format.h>

#include "tabstruct/error.h"
#include "tabstruct/teds.h"

namespace tabstruct {

using nlohmann::json;

namespace {

[[noreturn]] void SchemaFail(const std::string& path, const std::string& what) {
  throw Error(ErrorCategory::kSchema, fmt::format("{}: {}", path, what));
}

const json& Require(const json& obj, const char* key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) SchemaFail(path, fmt::format("missing field '{}'", key));
  return *it;
}

double RequireNumber(const json& value, const std::string& path) {
  if (!value.is_number()) SchemaFail(path, "expected a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) SchemaFail(path, "expected a finite number");
  return v;
}

json Unknown(const json& obj, std::initializer_list<const char*> known) {
  json extra = json::object();
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(known.begin(), known.end(),
                     [&](const char* k) { return it.key() == k; })) {
      extra[it.key()] = it.value();
    }
  }
  return extra;
}

class CorpusReader {
 public:
  explicit CorpusReader(std::vector<std::string>* warnings)
      : warnings_(warnings) {}

  CorpusFile Read(const json& doc) {
    if (!doc.is_object()) SchemaFail("$", "expected an object");
    CorpusFile corpus;
    const json& version = Require(doc, "schema_version", "$");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
      SchemaFail("schema_version",
                 fmt::format("unsupported version {}", version.dump()));
    }
    const json& mode = Require(doc, "label_mode", "$");
    if (mode == "multi") {
      corpus.label_mode = LabelMode::kMultiLabel;
    } else if (mode == "single") {
      corpus.label_mode = LabelMode::kSingleLabel;
    } else {
      SchemaFail("label_mode", "expected \"multi\" or \"single\"");
    }
    const json& images = Require(doc, "images", "$");
    if (!images.is_array()) SchemaFail("images", "expected an array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < images.size(); ++i) {
      ImageRecord record = ReadImage(images[i], fmt::format("images[{}]", i),
                                     corpus.label_mode);
      if (!seen.insert(record.image_id).second) {
        SchemaFail(fmt::format("images[{}].image_id", i),
                   "duplicate image id '" + record.image_id + "'");
      }
      corpus.images.push_back(std::move(record));
    }
    corpus.extra = Unknown(doc, {"schema_version", "label_mode", "images"});
    return corpus;
  }

 private:
  ImageRecord ReadImage(const json& obj, const std::string& path,
                        LabelMode mode) {
    if (!obj.is_object()) SchemaFail(path, "expected an object");
    ImageRecord record;
    const json& id = Require(obj, "image_id", path);
    if (!id.is_string() || id.get<std::string>().empty()) {
      SchemaFail(path + ".image_id", "expected a non-empty string");
    }
    record.image_id = id.get<std::string>();
    record.width = RequireNumber(Require(obj, "width", path), path + ".width");
    record.height =
        RequireNumber(Require(obj, "height", path), path + ".height");
    if (!(record.width > 0.0)) SchemaFail(path + ".width", "must be positive");
    if (!(record.height > 0.0)) {
      SchemaFail(path + ".height", "must be positive");
    }

    const json& instances = Require(obj, "instances", path);
    if (!instances.is_array()) {
      SchemaFail(path + ".instances", "expected an array");
    }
    bool any_extra = false;
    for (std::size_t j = 0; j < instances.size(); ++j) {
      const std::string ipath = fmt::format("{}.instances[{}]", path, j);
      const json& inst = instances[j];
      if (!inst.is_object()) SchemaFail(ipath, "expected an object");
      ComponentInstance out;
      out.box = ReadBox(Require(inst, "bbox", ipath), ipath + ".bbox", record);
      const json& cls = Require(inst, "class_id", ipath);
      if (!cls.is_number_integer()) {
        SchemaFail(ipath + ".class_id", "expected an integer");
      }
      const int class_id = cls.get<int>();
      const int limit = mode == LabelMode::kMultiLabel ? kNumMultiLabelClasses
                                                       : kNumSingleLabelClasses;
      if (class_id < 0 || class_id >= limit) {
        SchemaFail(ipath + ".class_id",
                   fmt::format("class {} not allowed under label_mode {}",
                               class_id, ModeName(mode)));
      }
      out.cls = ClassFromId(class_id);
      if (const auto s = inst.find("score"); s != inst.end()) {
        const double score = RequireNumber(*s, ipath + ".score");
        if (score < 0.0 || score > 1.0) {
          SchemaFail(ipath + ".score", "must lie in [0, 1]");
        }
        out.confidence = score;
      }
      record.instances.push_back(out);
      json extra = Unknown(inst, {"bbox", "class_id", "score"});
      any_extra = any_extra || !extra.empty();
      record.instance_extra.push_back(std::move(extra));
    }
    if (!any_extra) record.instance_extra.clear();

    if (const auto html = obj.find("html"); html != obj.end()) {
      if (!html->is_string()) SchemaFail(path + ".html", "expected a string");
      record.html = html->get<std::string>();
      try {
        ParseTableHtml(*record.html);
      } catch (const ParseError& e) {
        SchemaFail(path + ".html", e.what());
      }
    }

    if (const auto ext = obj.find("content_extents"); ext != obj.end()) {
      if (!ext->is_array() || ext->size() != record.instances.size()) {
        SchemaFail(path + ".content_extents",
                   "expected an array parallel to instances");
      }
      for (std::size_t j = 0; j < ext->size(); ++j) {
        record.content_extents.push_back(
            ReadBox((*ext)[j], fmt::format("{}.content_extents[{}]", path, j),
                    record));
      }
    }
    record.extra = Unknown(obj, {"image_id", "width", "height", "instances",
                                 "html", "content_extents"});
    return record;
  }

  BBox ReadBox(const json& value, const std::string& path,
               const ImageRecord& record) {
    if (!value.is_array() || value.size() != 4) {
      SchemaFail(path, "expected [x1, y1, x2, y2]");
    }
    double c[4];
    for (int k = 0; k < 4; ++k) {
      c[k] = RequireNumber(value[k], fmt::format("{}[{}]", path, k));
    }
    const double limits[4] = {record.width, record.height, record.width,
                              record.height};
    bool clamped = false;
    for (int k = 0; k < 4; ++k) {
      const double v = std::clamp(c[k], 0.0, limits[k]);
      clamped = clamped || v != c[k];
      c[k] = v;
    }
    if (clamped && warnings_) {
      warnings_->push_back(fmt::format(
          "{}: clamped to [{}, {}, {}, {}] inside {}x{}", path, c[0], c[1],
          c[2], c[3], record.width, record.height));
    }
    if (c[2] < c[0] || c[3] < c[1]) SchemaFail(path, "inverted box");
    return BBox(c[0], c[1], c[2], c[3]);
  }

  std::vector<std::string>* warnings_;
};

json BoxJson(const BBox& b) { return json::array({b.x1(), b.y1(), b.x2(), b.y2()}); }

}  // namespace

CorpusFile ParseCorpus(std::string_view text,
                       std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCategory::kSchema,
                fmt::format("malformed JSON at byte {}", e.byte));
  }
  return CorpusReader(warnings).Read(doc);
}

std::string SerializeCorpus(const CorpusFile& corpus) {
  json doc = corpus.extra.is_object() ? corpus.extra : json::object();
  doc["schema_version"] = corpus.schema_version;
  doc["label_mode"] = std::string(ModeName(corpus.label_mode));
  json images = json::array();
  for (const auto& record : corpus.images) {
    json img = record.extra.is_object() ? record.extra : json::object();
    img["image_id"] = record.image_id;
    img["width"] = record.width;
    img["height"] = record.height;
    json instances = json::array();
    for (std::size_t j = 0; j < record.instances.size(); ++j) {
      const ComponentInstance& inst = record.instances[j];
      json out = j < record.instance_extra.size() &&
                         record.instance_extra[j].is_object()
                     ? record.instance_extra[j]
                     : json::object();
      out["bbox"] = BoxJson(inst.box);
      out["class_id"] = ClassId(inst.cls);
      if (inst.confidence) out["score"] = *inst.confidence;
      instances.push_back(std::move(out));
    }
    img["instances"] = std::move(instances);
    if (record.html) img["html"] = *record.html;
    if (!record.content_extents.empty()) {
      json extents = json::array();
      for (const auto& b : record.content_extents) extents.push_back(BoxJson(b));
      img["content_extents"] = std::move(extents);
    }
    images.push_back(std::move(img));
  }
  doc["images"] = std::move(images);
  return doc.dump(2) + "\n";
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCategory::kIo, "cannot open '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw Error(ErrorCategory::kIo, "read failed for '" + path.string() + "'");
  }
  return buffer.str();
}

void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCategory::kIo, "cannot write '" + tmp.string() + "'");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out.flush()) {
      throw Error(ErrorCategory::kIo, "write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCategory::kIo, "cannot replace '" + path.string() + "'");
  }
}

CorpusFile LoadCorpus(const std::filesystem::path& path,
                      std::vector<std::string>* warnings) {
  const std::string text = ReadTextFile(path);
  try {
    return ParseCorpus(text, warnings);
  } catch (const Error& e) {
    throw Error(e.category(), path.string() + ": " + e.what());
  }
}

void SaveCorpus(const CorpusFile& corpus, const std::filesystem::path& path) {
  WriteFileAtomic(path, SerializeCorpus(corpus));
}

AnnotationSet ToAnnotationSet(const ImageRecord& record, LabelMode mode) {
  return {record.image_id, record.instances, mode};
}

std::vector<AnnotationSet> ToAnnotationSets(const CorpusFile& corpus) {
  std::vector<AnnotationSet> sets;
  sets.reserve(corpus.images.size());
  for (const auto& record : corpus.images) {
    sets.push_back(ToAnnotationSet(record, corpus.label_mode));
  }
  return sets;
}

InstancesByImage ToInstancesByImage(const CorpusFile& corpus) {
  InstancesByImage out;
  for (const auto& record : corpus.images) {
    out[record.image_id] = record.instances;
  }
  return out;
}

}  // namespace tabstruct
