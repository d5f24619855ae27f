// Copyright 2026 The detbench Authors. All Rights Reserved.
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

#include <iomanip>
#include <map>

#include "detbench/error.hpp"
#include "detbench/report.hpp"

namespace detbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorKind::kIo, "cannot create output directory " + dir.string());
  }
}

void WriteManifest(const fs::path& dir, const json& manifest) {
  WriteFile(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::string Percent(double ratio) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << 100.0 * ratio << "%";
  return s.str();
}

}  // namespace

int CmdIndex(const fs::path& root, const ToolkitConfig& cfg, const std::optional<fs::path>& out_dir,
             std::ostream& out) {
  const DatasetIndex index = LoadDataset(root, LoadLabels(cfg));
  const IndexStats stats = ComputeIndexStats(index);
  out << "images: " << stats.images << "\n";
  out << "instances: " << stats.instances << "\n";
  out << "mean boxes/image: " << std::fixed << std::setprecision(2) << stats.mean_boxes_per_image
      << std::defaultfloat << "\n";
  if (stats.images > 0) {
    out << "smallest: " << stats.smallest_id << " (" << stats.smallest_pixels << " pixels)\n";
    out << "largest: " << stats.largest_id << " (" << stats.largest_pixels << " pixels)\n";
  }
  for (const std::string& id : stats.missing_labels) out << "missing labels: " << id << "\n";

  if (out_dir) {
    EnsureDir(*out_dir);
    const json manifest = MakeManifest(cfg, index.images, "index");
    std::string tsv = "# manifest: " + manifest.dump() + "\n";
    tsv += "# id\twidth\theight\ttotal_pixels\tfile_size\tboxes\n";
    for (const std::string& id : index.ids_by_pixels()) {
      const ImageRecord& rec = *index.find(id);
      const auto ann = index.annotations.find(id);
      tsv += id + '\t' + std::to_string(rec.width) + '\t' + std::to_string(rec.height) + '\t' +
             std::to_string(TotalPixels(rec)) + '\t' + std::to_string(rec.file_size) + '\t' +
             (ann == index.annotations.end() ? "NA" : std::to_string(ann->second.size())) + '\n';
    }
    WriteFile(*out_dir / "index.tsv", tsv);
    WriteManifest(*out_dir, manifest);
  }
  return 0;
}

int CmdPreprocess(const fs::path& root, const ToolkitConfig& cfg, const fs::path& out_dir,
                  std::ostream& out) {
  const DatasetIndex index = LoadDataset(root, LoadLabels(cfg));
  EnsureDir(out_dir);
  const std::vector<DerivedImage> derived = RunPreprocess(root, index, cfg.pipeline, out_dir);
  std::map<std::string, size_t> per_variant;
  for (const DerivedImage& d : derived) ++per_variant[d.variant];
  for (const auto& [variant, n] : per_variant) out << variant << ": " << n << " images\n";
  out << "derived images: " << derived.size() << "\n";
  WriteManifest(out_dir, MakeManifest(cfg, index.images, "preprocess"));
  return 0;
}

int CmdBench(const fs::path& root, const ToolkitConfig& cfg, const std::string& backend_spec,
             const fs::path& out_dir, std::ostream& out) {
  DatasetIndex index = LoadDataset(root, LoadLabels(cfg));
  const std::map<std::string, Provenance> prov = LoadProvenanceFile(root / "provenance.tsv");
  for (ImageRecord& rec : index.images) {
    if (auto it = prov.find(rec.id); it != prov.end()) rec.provenance = it->second;
  }
  if (index.images.empty()) throw Error(ErrorKind::kInvalidArgument, "no images under " + root.string());

  BenchPlan plan;
  plan.images = index.images;
  plan.image_dir = root / "images";
  plan.repetitions = cfg.bench.repetitions;
  plan.repetitions_baseline = cfg.bench.repetitions_baseline;
  plan.repetitions_modified = cfg.bench.repetitions_modified;
  plan.warmup_image = cfg.bench.warmup_image;
  plan.order = cfg.bench.order;

  std::unique_ptr<Backend> backend = MakeBackend(backend_spec, cfg.bench.external);
  EnsureDir(out_dir);
  const json manifest = MakeManifest(cfg, index.images, "bench", backend->id());
  const std::string comment = "manifest: " + manifest.dump();

  const std::vector<BenchSample> samples = RunBenchmark(plan, *backend, [&](const BenchSample& s) {
    out << (s.discarded ? "warm-up " : "run ") << s.image_id << " #" << s.run_index << ": "
        << OutcomeName(s.outcome);
    if (s.outcome == Outcome::kOk) out << " " << s.wall_time_s << " s";
    if (!s.message.empty()) out << " (" << s.message << ")";
    out << "\n";
  });

  const std::vector<ImageSummary> summaries = SummarizeSamples(samples, index.images);
  WriteFile(out_dir / "samples.tsv", WriteSamples(samples, comment));
  WriteFile(out_dir / "bench_summary.tsv", WriteSummaries(summaries, comment));
  const std::string table = FormatBenchTable(summaries);
  WriteFile(out_dir / "bench_table.txt", "# " + comment + "\n" + table);
  WriteFile(out_dir / "scatter.svg",
            RenderScatterSvg({{backend->id(), "#1f77b4", summaries}},
                             "total pixels vs time: " + backend->id(), manifest));

  std::map<std::string, const BenchSample*> last_ok;
  for (const BenchSample& s : samples) {
    if (!s.discarded && s.outcome == Outcome::kOk) last_ok[s.image_id] = &s;
  }
  const LabelMap labels = LoadLabels(cfg);
  for (const auto& [id, s] : last_ok) {
    WriteFile(out_dir / "detections" / (id + ".txt"), WriteDetections(s->detections, labels));
  }
  WriteManifest(out_dir, manifest);

  out << "\n" << table;
  const double fraction = RunnableFraction(samples);
  size_t runnable = 0;
  for (const ImageSummary& s : summaries) runnable += s.runnable ? 1 : 0;
  out << "runnable: " << runnable << "/" << summaries.size() << " (" << Percent(fraction) << ")\n";
  return 0;
}

int CmdEval(const fs::path& root, const fs::path& detections_dir, const ToolkitConfig& cfg,
            const fs::path& out_dir, std::ostream& out) {
  const LabelMap labels = LoadLabels(cfg);
  const DatasetIndex index = LoadDataset(root, labels);
  GroundTruthSet gts;
  DetectionSet dets;
  for (const std::string& id : index.missing_labels) {
    out << "warning: " << id << " has no label file, skipped\n";
  }
  for (const auto& [id, boxes] : index.annotations) {
    gts[id] = boxes;
    const fs::path file = detections_dir / (id + ".txt");
    if (!fs::exists(file)) {
      out << "warning: no detections for " << id << ", treated as empty\n";
      dets[id] = {};
      continue;
    }
    dets[id] = ParseDetections(ReadFile(file));
  }
  const DatasetEval eval = EvaluateDataset(gts, dets, labels, cfg.eval);
  EnsureDir(out_dir);
  json manifest = MakeManifest(cfg, index.images, "eval");
  manifest["detections"] = detections_dir.string();
  WriteFile(out_dir / "eval_report.txt", WriteEvalReport(eval, gts, dets, manifest));
  WriteFile(out_dir / "eval_summary.json", EvalSummaryJson(eval, manifest).dump(2) + "\n");
  WriteManifest(out_dir, manifest);

  out << "mAP: " << std::fixed << std::setprecision(4) << eval.map << "\n";
  out << "COCO AP: " << eval.coco.ap_ladder << "  AP50: " << eval.coco.ap50
      << "  AP75: " << eval.coco.ap75 << "\n";
  out << std::defaultfloat;
  out << "accuracy: " << eval.accuracy.accurate << "/" << eval.accuracy.total << " ("
      << Percent(eval.accuracy.ratio()) << ")\n";
  return 0;
}

int CmdCompare(const fs::path& report_a, const fs::path& report_b, const fs::path& out_dir,
               std::ostream& out) {
  const ReportData a = LoadReportDir(report_a);
  const ReportData b = LoadReportDir(report_b);
  const std::vector<CompareRow> rows = CompareReports(a, b);
  EnsureDir(out_dir);
  json manifest = MakeManifest(ToolkitConfig{}, {}, "compare");
  manifest.erase("config");
  manifest["report_a"] = report_a.string();
  manifest["report_b"] = report_b.string();
  for (const char* name : {"a", "b"}) {
    const fs::path m = (name[0] == 'a' ? report_a : report_b) / "manifest.json";
    if (fs::exists(m)) manifest[std::string("manifest_") + name] = json::parse(ReadFile(m));
  }
  WriteFile(out_dir / "compare.tsv", WriteCompareTable(rows, manifest));

  std::map<std::string, bool> shared;
  for (const CompareRow& r : rows) shared[r.image_id] = true;
  auto keep_shared = [&](const std::vector<ImageSummary>& in) {
    std::vector<ImageSummary> kept;
    for (const ImageSummary& s : in) {
      if (shared.count(s.image_id)) kept.push_back(s);
    }
    return kept;
  };
  WriteFile(out_dir / "scatter.svg",
            RenderScatterSvg({{"A: " + report_a.filename().string(), "#1f77b4", keep_shared(a.summaries)},
                              {"B: " + report_b.filename().string(), "#ff7f0e", keep_shared(b.summaries)}},
                             "total pixels vs time", manifest));
  WriteManifest(out_dir, manifest);

  for (const CompareRow& r : rows) {
    out << r.image_id << "  time delta ";
    if (auto d = r.time_delta()) {
      out << FormatDouble(*d) << " s";
    } else {
      out << "NA";
    }
    if (auto d = r.accuracy_delta()) out << "  accuracy delta " << FormatDouble(*d);
    if (r.oom_a || r.oom_b) out << "  oom " << (r.oom_a ? "A" : "") << (r.oom_b ? "B" : "");
    out << "\n";
  }
  out << "shared images: " << rows.size() << "\n";
  return 0;
}

}  // namespace detbench
