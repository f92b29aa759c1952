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

// Command-line frontend: corpus statistics, anchor coverage, label-space
// conversion, reconstruction, TEDS and COCO scoring, the misalignment report,
// kernel self-checks and fixture generation.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "tabstruct/anchors.h"
#include "tabstruct/cocoeval.h"
#include "tabstruct/error.h"
#include "tabstruct/fixtures.h"
#include "tabstruct/formats.h"
#include "tabstruct/kernels.h"
#include "tabstruct/labelspace.h"
#include "tabstruct/misalign.h"
#include "tabstruct/reconstruct.h"
#include "tabstruct/teds.h"

namespace fs = std::filesystem;

namespace tabstruct {
namespace {

constexpr int kExitRecordFailures = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitSchema = 4;
constexpr int kExitStructure = 5;
constexpr int kExitNumerical = 6;

int ExitCodeFor(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig:
      return kExitUsage;
    case ErrorCategory::kIo:
      return kExitIo;
    case ErrorCategory::kSchema:
    case ErrorCategory::kParse:
      return kExitSchema;
    case ErrorCategory::kNumerical:
      return kExitNumerical;
    default:
      return kExitStructure;
  }
}

void PrintWarnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) fmt::print(stderr, "warning: {}\n", w);
}

CorpusFile Load(const std::string& path) {
  std::vector<std::string> warnings;
  CorpusFile corpus = LoadCorpus(path, &warnings);
  PrintWarnings(warnings);
  return corpus;
}

void EnsureDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCategory::kIo, "cannot create directory '" + dir.string() + "'");
  }
}

std::string Fixed4(const std::optional<double>& v) {
  return v ? fmt::format("{:.4f}", *v) : std::string("n/a");
}

// --- stats ---

struct StatsArgs {
  std::string input;
  std::string csv;
  bool coco = false;
};

int RunStats(const StatsArgs& args) {
  const DatasetStats stats =
      args.coco ? ComputeCocoJsonStats(ReadTextFile(args.input))
                : ComputeDatasetStats(ToAnnotationSets(Load(args.input)));
  fmt::print("images: {}\n", stats.n_images);
  fmt::print("objects: {}\n", stats.n_objects);
  fmt::print("avg objects/image: {:.2f}\n", stats.avg_objects_per_image);
  if (!args.csv.empty()) WriteFileAtomic(args.csv, HistogramCsv(stats));
  return 0;
}

// --- anchors ---

struct AnchorsArgs {
  std::string input;
  std::vector<double> ratios;
  bool default_ratios = false;
};

int RunAnchors(const AnchorsArgs& args) {
  AnchorConfig cfg;
  if (args.default_ratios) cfg.aspect_ratios = DefaultAnchorRatios();
  if (!args.ratios.empty()) cfg.aspect_ratios = args.ratios;
  cfg.Validate();
  const CorpusFile corpus = Load(args.input);
  std::vector<double> best;
  for (const auto& record : corpus.images) {
    std::vector<BBox> gts;
    for (const auto& inst : record.instances) gts.push_back(inst.box);
    if (gts.empty()) continue;
    const auto anchors = GenerateAnchors(
        cfg, FeatureMapSizesFor(cfg, record.width, record.height));
    const AnchorCoverage c = ComputeAnchorCoverage(anchors, gts);
    best.insert(best.end(), c.best_iou.begin(), c.best_iou.end());
  }
  if (best.empty()) {
    throw Error(ErrorCategory::kInput, "no ground-truth boxes in corpus");
  }
  long n50 = 0;
  long n70 = 0;
  double sum = 0.0;
  for (double b : best) {
    n50 += b >= 0.5;
    n70 += b >= 0.7;
    sum += b;
  }
  const double n = static_cast<double>(best.size());
  fmt::print("ratios: {}\n", fmt::join(cfg.aspect_ratios, ","));
  fmt::print("ground truths: {}\n", best.size());
  fmt::print("recall@IoU0.5: {:.4f}\n", n50 / n);
  fmt::print("recall@IoU0.7: {:.4f}\n", n70 / n);
  fmt::print("mean best IoU: {:.4f}\n", sum / n);
  return 0;
}

// --- encode-labels / decode-labels ---

struct ConvertArgs {
  std::string input;
  std::string output;
};

int RunConvert(const ConvertArgs& args, bool encode) {
  CorpusFile corpus = Load(args.input);
  const LabelMode expected =
      encode ? LabelMode::kMultiLabel : LabelMode::kSingleLabel;
  if (corpus.label_mode != expected) {
    throw Error(ErrorCategory::kMode,
                fmt::format("expected label_mode {}, file has {}",
                            ModeName(expected), ModeName(corpus.label_mode)));
  }
  int failures = 0;
  CorpusFile out = corpus;
  out.label_mode = encode ? LabelMode::kSingleLabel : LabelMode::kMultiLabel;
  out.images.clear();
  for (const auto& record : corpus.images) {
    try {
      const AnnotationSet in = ToAnnotationSet(record, corpus.label_mode);
      const AnnotationSet converted = encode ? EncodePseudo(in) : DecodePseudo(in);
      ImageRecord next = record;
      next.instances = converted.instances;
      // Per-instance metadata does not survive a change of instance list.
      next.instance_extra.clear();
      next.content_extents.clear();
      out.images.push_back(std::move(next));
    } catch (const Error& e) {
      ++failures;
      fmt::print(stderr, "error[{}]: image '{}': {}\n",
                 CategoryName(e.category()), record.image_id, e.what());
    }
  }
  SaveCorpus(out, args.output);
  fmt::print("{} images written, {} failed\n", out.images.size(), failures);
  return failures > 0 ? kExitRecordFailures : 0;
}

// --- reconstruct ---

struct ReconstructArgs {
  std::string input;
  std::string output_dir;
  double score_threshold = 0.5;
};

int RunReconstruct(const ReconstructArgs& args) {
  const CorpusFile corpus = Load(args.input);
  ReconstructionConfig cfg;
  cfg.score_thresholds.fill(args.score_threshold);
  EnsureDirectory(args.output_dir);
  int failures = 0;
  for (const auto& record : corpus.images) {
    std::vector<std::string> warnings;
    try {
      const std::string html = ReconstructHtml(
          ToAnnotationSet(record, corpus.label_mode), cfg, &warnings);
      WriteFileAtomic(fs::path(args.output_dir) / (record.image_id + ".html"),
                      html);
    } catch (const Error& e) {
      if (e.category() == ErrorCategory::kIo) throw;
      ++failures;
      fmt::print(stderr, "error[{}]: image '{}': {}\n",
                 CategoryName(e.category()), record.image_id, e.what());
    }
    PrintWarnings(warnings);
  }
  fmt::print("{} tables reconstructed, {} failed\n",
             corpus.images.size() - failures, failures);
  return failures > 0 ? kExitRecordFailures : 0;
}

// --- teds ---

struct TedsArgs {
  std::string html_dir;
  std::string ground_truth;
  std::string csv;
};

int RunTeds(const TedsArgs& args) {
  const CorpusFile gt = Load(args.ground_truth);
  std::vector<TedsSample> samples;
  int missing = 0;
  for (const auto& record : gt.images) {
    if (!record.html) {
      throw Error(ErrorCategory::kInput,
                  "image '" + record.image_id + "' has no ground-truth html");
    }
    const fs::path path = fs::path(args.html_dir) / (record.image_id + ".html");
    std::string predicted;
    if (fs::exists(path)) {
      predicted = ReadTextFile(path);
    } else {
      ++missing;
      fmt::print(stderr, "error[io]: image '{}': no prediction at {}\n",
                 record.image_id, path.string());
    }
    samples.push_back({record.image_id, std::move(predicted), *record.html});
  }
  const CorpusTeds result = ScoreCorpus(samples);
  int unparsable = 0;
  for (const auto& score : result.scores) {
    if (score.prediction_error && fs::exists(fs::path(args.html_dir) /
                                             (score.id + ".html"))) {
      ++unparsable;
      fmt::print(stderr, "error[parse]: image '{}': {}\n", score.id,
                 *score.prediction_error);
    }
  }
  fmt::print("images: {}\n", result.scores.size());
  fmt::print("simple: {}\n", Fixed4(result.simple_mean));
  fmt::print("complex: {}\n", Fixed4(result.complex_mean));
  fmt::print("overall: {}\n", Fixed4(result.overall_mean));
  if (!args.csv.empty()) {
    std::string csv = "image_id,teds,complex\n";
    for (const auto& s : result.scores) {
      csv += fmt::format("{},{:.6f},{}\n", s.id, s.score, s.complex ? 1 : 0);
    }
    WriteFileAtomic(args.csv, csv);
  }
  return missing + unparsable > 0 ? kExitRecordFailures : 0;
}

// --- coco-eval ---

struct CocoArgs {
  std::string predictions;
  std::string ground_truth;
  std::string json_out;
};

InstancesByImage MultiLabelInstances(const CorpusFile& corpus) {
  if (corpus.label_mode == LabelMode::kMultiLabel) {
    return ToInstancesByImage(corpus);
  }
  InstancesByImage out;
  for (const auto& record : corpus.images) {
    out[record.image_id] =
        DecodePseudo(ToAnnotationSet(record, corpus.label_mode)).instances;
  }
  return out;
}

int RunCocoEval(const CocoArgs& args) {
  const CorpusFile preds = Load(args.predictions);
  const CorpusFile gts = Load(args.ground_truth);
  if (gts.label_mode != LabelMode::kMultiLabel) {
    throw Error(ErrorCategory::kMode, "ground truth must be multi-label");
  }
  const ApReport report =
      EvaluateCorpus(MultiLabelInstances(preds), ToInstancesByImage(gts));
  fmt::print("AP = {:.4f}\n", report.mean_ap);
  fmt::print("AP50 = {:.4f}\n", report.ap50);
  fmt::print("AP75 = {:.4f}\n", report.ap75);
  fmt::print("APs = {}\n", Fixed4(report.ap_small));
  fmt::print("APm = {}\n", Fixed4(report.ap_medium));
  fmt::print("APl = {}\n", Fixed4(report.ap_large));
  for (const auto& [cls, ap] : report.per_class) {
    fmt::print("AP[{}] = {:.4f}\n", ClassName(cls), ap);
  }
  if (!args.json_out.empty()) {
    nlohmann::json doc;
    doc["mAP"] = report.mean_ap;
    doc["AP50"] = report.ap50;
    doc["AP75"] = report.ap75;
    const auto opt = [](const std::optional<double>& v) {
      return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    doc["APs"] = opt(report.ap_small);
    doc["APm"] = opt(report.ap_medium);
    doc["APl"] = opt(report.ap_large);
    for (const auto& [cls, ap] : report.per_class) {
      doc["per_class"][std::string(ClassName(cls))] = ap;
    }
    doc["ap_by_threshold"] = report.ap_by_threshold;
    WriteFileAtomic(args.json_out, doc.dump(2) + "\n");
  }
  return 0;
}

// --- misalign ---

struct MisalignArgs {
  std::string ground_truth;
  std::vector<std::string> specs;
  std::string csv;
};

int RunMisalign(const MisalignArgs& args) {
  const CorpusFile gt =
      args.ground_truth.empty() ? OversizedBoxFixture() : Load(args.ground_truth);
  std::vector<PerturbationSpec> specs;
  for (const auto& text : args.specs) specs.push_back(ParsePerturbationSpec(text));
  if (specs.empty()) specs = OversizedBoxSpecs();
  const auto rows = MisalignmentReport(gt, specs);
  fmt::print("{:<28} {:>8} {:>8}\n", "spec", "mAP", "TEDS");
  for (const auto& row : rows) {
    fmt::print("{:<28} {:>8.4f} {:>8.4f}\n", row.label, row.mean_ap, row.teds);
  }
  if (!args.csv.empty()) WriteFileAtomic(args.csv, MisalignmentCsv(rows));
  return 0;
}

// --- kernels-check ---

int RunKernelsCheck(std::uint64_t seed) {
  bool ok = true;
  for (const auto& check : RunKernelChecks(seed)) {
    fmt::print("{} {:<28} measured={:.3e} tolerance={:.1e}\n",
               check.passed ? "PASS" : "FAIL", check.name, check.measured,
               check.tolerance);
    ok = ok && check.passed;
  }
  return ok ? 0 : kExitNumerical;
}

// --- generate-fixtures ---

struct GenerateArgs {
  FixtureSpec spec;
  std::string output_dir;
};

int RunGenerate(const GenerateArgs& args) {
  const FixtureSet set = GenerateFixtures(args.spec);
  EnsureDirectory(args.output_dir);
  SaveCorpus(set.ground_truth, fs::path(args.output_dir) / "gt.json");
  SaveCorpus(set.predictions, fs::path(args.output_dir) / "pred.json");
  fmt::print("{} tables written to {}\n", set.ground_truth.images.size(),
             args.output_dir);
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Table structure toolkit: reconstruction and evaluation"};
  app.require_subcommand(1);

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics");
  stats_cmd->add_option("gt", stats.input, "Annotation file")->required();
  stats_cmd->add_option("--csv", stats.csv, "Write the folded aspect-ratio histogram");
  stats_cmd->add_flag("--coco", stats.coco, "Input is a COCO instances document");

  AnchorsArgs anchors;
  auto* anchors_cmd = app.add_subcommand("anchors", "Anchor coverage of ground truth");
  anchors_cmd->add_option("gt", anchors.input, "Ground-truth file")->required();
  anchors_cmd->add_option("--ratios", anchors.ratios, "Aspect ratios h/w, ascending")
      ->delimiter(',');
  anchors_cmd->add_flag("--default-ratios", anchors.default_ratios,
                        "Use {0.5, 1, 2}");

  ConvertArgs encode;
  auto* encode_cmd =
      app.add_subcommand("encode-labels", "Multi-label to single-label annotations");
  encode_cmd->add_option("gt", encode.input, "Multi-label file")->required();
  encode_cmd->add_option("-o,--output", encode.output, "Output file")->required();

  ConvertArgs decode;
  auto* decode_cmd =
      app.add_subcommand("decode-labels", "Single-label to multi-label detections");
  decode_cmd->add_option("pred", decode.input, "Single-label file")->required();
  decode_cmd->add_option("-o,--output", decode.output, "Output file")->required();

  ReconstructArgs reconstruct;
  auto* reconstruct_cmd =
      app.add_subcommand("reconstruct", "Detections to one HTML file per image");
  reconstruct_cmd->add_option("pred", reconstruct.input, "Detection file")->required();
  reconstruct_cmd->add_option("-o,--output", reconstruct.output_dir, "Output directory")
      ->required();
  reconstruct_cmd->add_option("--score-threshold", reconstruct.score_threshold,
                              "Minimum score for every class")
      ->check(CLI::Range(0.0, 1.0));

  TedsArgs teds;
  auto* teds_cmd = app.add_subcommand("teds", "Structure-only TEDS of HTML predictions");
  teds_cmd->add_option("pred_dir", teds.html_dir, "Directory of <image_id>.html")
      ->required();
  teds_cmd->add_option("gt", teds.ground_truth, "Ground-truth file with html")
      ->required();
  teds_cmd->add_option("--csv", teds.csv, "Write per-image scores");

  CocoArgs coco;
  auto* coco_cmd = app.add_subcommand("coco-eval", "COCO-style average precision");
  coco_cmd->add_option("pred", coco.predictions, "Detection file")->required();
  coco_cmd->add_option("gt", coco.ground_truth, "Ground-truth file")->required();
  coco_cmd->add_option("--json", coco.json_out, "Write the report as JSON");

  MisalignArgs misalign;
  auto* misalign_cmd =
      app.add_subcommand("misalign", "mAP and TEDS of perturbed ground truth");
  misalign_cmd->add_option("gt", misalign.ground_truth,
                           "Ground truth with content extents (built-in fixture "
                           "when omitted)");
  misalign_cmd->add_option("--spec", misalign.specs,
                           "mode:magnitude[:class+class], modes dilate, shrink, "
                           "snap, merge; '%' suffix for fractions");
  misalign_cmd->add_option("--csv", misalign.csv, "Write the report as CSV");

  std::uint64_t kernel_seed = 2024;
  auto* kernels_cmd = app.add_subcommand("kernels-check", "Numerical kernel self-checks");
  kernels_cmd->add_option("--seed", kernel_seed, "Random seed");

  GenerateArgs generate;
  auto* generate_cmd =
      app.add_subcommand("generate-fixtures", "Synthetic ground truth and predictions");
  generate_cmd->add_option("-o,--output", generate.output_dir, "Output directory")
      ->required();
  generate_cmd->add_option("-n,--images", generate.spec.n_images, "Number of tables");
  generate_cmd->add_option("--seed", generate.spec.seed, "Random seed");
  generate_cmd->add_option("--min-rows", generate.spec.min_rows);
  generate_cmd->add_option("--max-rows", generate.spec.max_rows);
  generate_cmd->add_option("--min-cols", generate.spec.min_cols);
  generate_cmd->add_option("--max-cols", generate.spec.max_cols);
  generate_cmd->add_option("--span-prob", generate.spec.span_probability);
  generate_cmd->add_option("--header-prob", generate.spec.header_probability);
  generate_cmd->add_option("--projected-prob",
                           generate.spec.projected_row_probability);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*stats_cmd) return RunStats(stats);
    if (*anchors_cmd) return RunAnchors(anchors);
    if (*encode_cmd) return RunConvert(encode, true);
    if (*decode_cmd) return RunConvert(decode, false);
    if (*reconstruct_cmd) return RunReconstruct(reconstruct);
    if (*teds_cmd) return RunTeds(teds);
    if (*coco_cmd) return RunCocoEval(coco);
    if (*misalign_cmd) return RunMisalign(misalign);
    if (*kernels_cmd) return RunKernelsCheck(kernel_seed);
    if (*generate_cmd) return RunGenerate(generate);
  } catch (const Error& e) {
    fmt::print(stderr, "error[{}]: {}\n", CategoryName(e.category()), e.what());
    return ExitCodeFor(e.category());
  }
  return kExitUsage;
}

}  // namespace
}  // namespace tabstruct

int main(int argc, char** argv) { return tabstruct::Main(argc, argv); }
