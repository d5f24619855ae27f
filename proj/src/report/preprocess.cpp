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

#include <regex>
#include <sstream>

#include "detbench/error.hpp"
#include "detbench/image_pipeline.hpp"
#include "detbench/png_codec.hpp"
#include "detbench/report.hpp"

namespace detbench {

namespace fs = std::filesystem;

namespace {

struct VariantOutput {
  std::string name;
  fs::path dir;
  std::string provenance;  // provenance.tsv body
};

void WriteVariantImage(VariantOutput& variant, DerivedImage d,
                       const std::vector<GroundTruthBox>& boxes, bool has_labels,
                       std::vector<DerivedImage>* out) {
  if (has_labels) {
    WriteFile(variant.dir / "labelTxt" / (d.record.id + ".txt"), WriteGroundTruth(boxes));
  }
  variant.provenance += d.record.id + '\t' + DescribeProvenance(d.record.provenance) + '\n';
  d.variant = variant.name;
  out->push_back(std::move(d));
}

DerivedImage Derived(std::string id, const RasterImage& img, Provenance prov, fs::path path,
                     uint64_t size, std::string operation, std::string parameters) {
  DerivedImage d;
  d.record.id = std::move(id);
  d.record.width = img.width();
  d.record.height = img.height();
  d.record.bit_depth = 8 * img.channels();
  d.record.file_size = size;
  d.record.provenance = std::move(prov);
  d.path = std::move(path);
  d.operation = std::move(operation);
  d.parameters = std::move(parameters);
  return d;
}

}  // namespace

std::vector<DerivedImage> RunPreprocess(const fs::path& dataset_root, const DatasetIndex& index,
                                        const PipelineConfig& cfg, const fs::path& out_dir) {
  for (int level : cfg.effort_levels) {
    if (level < 0 || level > 9) throw Error(ErrorKind::kInvalidArgument, "effort must be 0-9");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw Error(ErrorKind::kIo, "cannot create output directory " + out_dir.string());
  }

  std::vector<VariantOutput> scale_variants;
  for (double pct : cfg.scale_percents) {
    const std::string name = "scale_" + FormatDouble(pct);
    scale_variants.push_back({name, out_dir / name, ""});
  }
  std::vector<VariantOutput> effort_variants;
  for (int level : cfg.effort_levels) {
    const std::string name = "recompress_" + std::to_string(level);
    effort_variants.push_back({name, out_dir / name, ""});
  }
  std::optional<VariantOutput> tile_variant;
  if (cfg.tile_side > 0) {
    const std::string name = "tiles_" + std::to_string(cfg.tile_side);
    tile_variant = VariantOutput{name, out_dir / name, ""};
  }

  std::vector<DerivedImage> derived;
  for (const std::string& id : index.ids_by_pixels()) {
    const RasterImage img = DropAlpha(ReadPngFile(dataset_root / "images" / (id + ".png")));
    const auto ann = index.annotations.find(id);
    const bool has_labels = ann != index.annotations.end();
    const std::vector<GroundTruthBox> none;
    const std::vector<GroundTruthBox>& boxes = has_labels ? ann->second : none;

    for (size_t i = 0; i < scale_variants.size(); ++i) {
      VariantOutput& v = scale_variants[i];
      const double pct = cfg.scale_percents[i];
      const RasterImage scaled = ScaleImage(img, {pct, cfg.algorithm});
      const fs::path path = v.dir / "images" / (id + ".png");
      const uint64_t size = WritePngFile(path, scaled, cfg.scaled_effort);
      WriteVariantImage(v,
                        Derived(id, scaled, provenance::Scaled{id, pct, cfg.algorithm}, path,
                                size, "scale",
                                "percent=" + FormatDouble(pct) +
                                    ";algorithm=" + ScaleAlgorithmName(cfg.algorithm)),
                        TransformAnnotationsScale(boxes, pct), has_labels, &derived);
    }

    for (size_t i = 0; i < effort_variants.size(); ++i) {
      VariantOutput& v = effort_variants[i];
      const int level = cfg.effort_levels[i];
      const std::vector<uint8_t> bytes = RecompressLossless(img, level);
      const fs::path path = v.dir / "images" / (id + ".png");
      WriteFile(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
      WriteVariantImage(v,
                        Derived(id, img, provenance::Recompressed{id, level}, path, bytes.size(),
                                "recompress", "effort=" + std::to_string(level)),
                        boxes, has_labels, &derived);
    }

    if (tile_variant) {
      VariantOutput& v = *tile_variant;
      for (const Tile& tile : SplitIntoSquares(img, {cfg.tile_side, cfg.tile_overlap})) {
        const std::string tile_id =
            id + "_" + std::to_string(tile.offset_x) + "_" + std::to_string(tile.offset_y);
        const fs::path path = v.dir / "images" / (tile_id + ".png");
        const uint64_t size = WritePngFile(path, tile.image, cfg.scaled_effort);
        std::ostringstream params;
        params << "side=" << cfg.tile_side << ";overlap=" << FormatDouble(cfg.tile_overlap)
               << ";x=" << tile.offset_x << ";y=" << tile.offset_y;
        WriteVariantImage(
            v,
            Derived(tile_id, tile.image, provenance::Tile{id, tile.offset_x, tile.offset_y}, path,
                    size, "tile", params.str()),
            ClipAnnotationsToTile(boxes, tile.offset_x, tile.offset_y, tile.image.width(),
                                  tile.image.height(), cfg.keep_fraction),
            has_labels, &derived);
      }
    }
  }

  auto finish = [](const VariantOutput& v) {
    fs::create_directories(v.dir / "images");
    WriteFile(v.dir / "provenance.tsv", v.provenance);
  };
  for (const VariantOutput& v : scale_variants) finish(v);
  for (const VariantOutput& v : effort_variants) finish(v);
  if (tile_variant) finish(*tile_variant);
  WriteFile(out_dir / "manifest.tsv", WritePipelineManifest(derived));
  return derived;
}

std::string WritePipelineManifest(const std::vector<DerivedImage>& derived) {
  std::string out =
      "# variant\tid\tprovenance\toperation\tparameters\twidth\theight\tfile_size\tpath\n";
  for (const DerivedImage& d : derived) {
    out += d.variant + '\t' + d.record.id + '\t' + DescribeProvenance(d.record.provenance) + '\t' +
           d.operation + '\t' + d.parameters + '\t' + std::to_string(d.record.width) + '\t' +
           std::to_string(d.record.height) + '\t' + std::to_string(d.record.file_size) + '\t' +
           d.path.string() + '\n';
  }
  return out;
}

Provenance ParseProvenance(const std::string& text) {
  static const std::regex kScaled(R"(scaled\(([^,]+),([^,]+),(\w+)\))");
  static const std::regex kRecompressed(R"(recompressed\(([^,]+),(\d+)\))");
  static const std::regex kTile(R"(tile\(([^,]+),(\d+),(\d+)\))");
  std::smatch m;
  if (text == "original") return provenance::Original{};
  if (std::regex_match(text, m, kScaled)) {
    return provenance::Scaled{m[1], std::stod(m[2]), ParseScaleAlgorithm(m[3])};
  }
  if (std::regex_match(text, m, kRecompressed)) {
    return provenance::Recompressed{m[1], std::stoi(m[2])};
  }
  if (std::regex_match(text, m, kTile)) {
    return provenance::Tile{m[1], std::stoll(m[2]), std::stoll(m[3])};
  }
  throw Error(ErrorKind::kInvalidArgument, "unrecognised provenance '" + text + "'");
}

std::map<std::string, Provenance> LoadProvenanceFile(const fs::path& path) {
  std::map<std::string, Provenance> out;
  if (!fs::exists(path)) return out;
  std::istringstream in(ReadFile(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorKind::kInvalidArgument, "bad provenance line '" + line + "'");
    }
    out[line.substr(0, tab)] = ParseProvenance(line.substr(tab + 1));
  }
  return out;
}

}  // namespace detbench
