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

#include <iostream>

#include "CLI11.hpp"
#include "detbench/error.hpp"
#include "detbench/report.hpp"

namespace {

detbench::ToolkitConfig ResolveConfig(const std::string& config_path, const std::string& labels) {
  detbench::ToolkitConfig cfg;
  if (!config_path.empty()) cfg = detbench::LoadConfig(config_path);
  if (!labels.empty()) cfg.labels_path = labels;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"detbench: detection benchmarking and evaluation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", detbench::kToolkitVersion);

  std::string config_path;
  std::string labels;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--labels", labels, "label map file (default: DOTA v1.0 classes)")
      ->check(CLI::ExistingFile);

  std::string root;
  std::string out_dir;

  auto* index = app.add_subcommand("index", "index a dataset and print statistics");
  index->add_option("root", root, "dataset root with images/ and labelTxt/")->required();
  index->add_option("--out", out_dir, "write index.tsv and manifest.json here");

  auto* preprocess = app.add_subcommand("preprocess", "write scaled, recompressed and tiled variants");
  preprocess->add_option("root", root, "dataset root")->required();
  preprocess->add_option("--out", out_dir, "output directory")->required();

  std::string backend;
  auto* bench = app.add_subcommand("bench", "run the benchmark protocol against a backend");
  bench->add_option("root", root, "dataset root")->required();
  bench->add_option("--backend", backend,
                    "synthetic:limit=N,coeff=S,overhead=S | replay:<dir> | exec:<command>")
      ->required();
  bench->add_option("--out", out_dir, "output directory")->required();

  std::string detections;
  auto* eval = app.add_subcommand("eval", "evaluate detection files against ground truth");
  eval->add_option("root", root, "dataset root")->required();
  eval->add_option("--detections", detections, "directory of <id>.txt detection files")
      ->required();
  eval->add_option("--out", out_dir, "output directory")->required();

  std::string report_a, report_b;
  auto* compare = app.add_subcommand("compare", "per-image deltas between two report directories");
  compare->add_option("report_a", report_a, "baseline report directory")->required();
  compare->add_option("report_b", report_b, "modified report directory")->required();
  compare->add_option("--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const detbench::ToolkitConfig cfg = ResolveConfig(config_path, labels);
    if (*index) {
      std::optional<std::filesystem::path> out;
      if (!out_dir.empty()) out = out_dir;
      return detbench::CmdIndex(root, cfg, out, std::cout);
    }
    if (*preprocess) return detbench::CmdPreprocess(root, cfg, out_dir, std::cout);
    if (*bench) return detbench::CmdBench(root, cfg, backend, out_dir, std::cout);
    if (*eval) return detbench::CmdEval(root, detections, cfg, out_dir, std::cout);
    if (*compare) return detbench::CmdCompare(report_a, report_b, out_dir, std::cout);
  } catch (const detbench::Error& e) {
    std::cerr << "detbench: " << detbench::ErrorKindName(e.kind()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "detbench: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
