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

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <set>

#include "detbench/error.hpp"
#include "detbench/report.hpp"

namespace detbench {

namespace {

using nlohmann::json;

void CheckKeys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw Error(ErrorKind::kInvalidArgument, where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (allowed.count(key) == 0) {
      throw Error(ErrorKind::kInvalidArgument, "unknown config key " + where + "." + key);
    }
  }
}

template <typename T>
void Read(const json& obj, const char* key, T* out) {
  if (!obj.contains(key)) return;
  try {
    *out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidArgument, std::string("config key ") + key + ": " + e.what());
  }
}

std::string Iso8601Now() {
  std::time_t t;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ToolkitConfig ParseConfig(const json& j) {
  ToolkitConfig cfg;
  CheckKeys(j, "config", {"labels", "eval", "pipeline", "bench"});
  Read(j, "labels", &cfg.labels_path);

  if (j.contains("eval")) {
    const json& e = j["eval"];
    CheckKeys(e, "eval",
              {"iou_threshold", "pr_min_confidence", "accuracy_min_confidence", "iou_floor",
               "require_class_match", "include_difficult", "iou_ladder"});
    Read(e, "iou_threshold", &cfg.eval.match.iou_threshold);
    Read(e, "pr_min_confidence", &cfg.eval.match.min_confidence);
    Read(e, "accuracy_min_confidence", &cfg.eval.accuracy_min_confidence);
    Read(e, "iou_floor", &cfg.eval.match.iou_floor);
    Read(e, "require_class_match", &cfg.eval.match.require_class_match);
    Read(e, "include_difficult", &cfg.eval.match.include_difficult);
    Read(e, "iou_ladder", &cfg.eval.iou_ladder);
  }
  cfg.eval.match.Validate();
  if (!(cfg.eval.accuracy_min_confidence >= 0 && cfg.eval.accuracy_min_confidence <= 1)) {
    throw Error(ErrorKind::kInvalidArgument, "eval.accuracy_min_confidence must be in [0, 1]");
  }

  if (j.contains("pipeline")) {
    const json& p = j["pipeline"];
    CheckKeys(p, "pipeline",
              {"scale_percents", "algorithm", "effort_levels", "scaled_effort", "tile_side",
               "tile_overlap", "keep_fraction"});
    Read(p, "scale_percents", &cfg.pipeline.scale_percents);
    std::string algorithm = ScaleAlgorithmName(cfg.pipeline.algorithm);
    Read(p, "algorithm", &algorithm);
    cfg.pipeline.algorithm = ParseScaleAlgorithm(algorithm);
    Read(p, "effort_levels", &cfg.pipeline.effort_levels);
    Read(p, "scaled_effort", &cfg.pipeline.scaled_effort);
    Read(p, "tile_side", &cfg.pipeline.tile_side);
    Read(p, "tile_overlap", &cfg.pipeline.tile_overlap);
    Read(p, "keep_fraction", &cfg.pipeline.keep_fraction);
  }
  for (double pct : cfg.pipeline.scale_percents) {
    if (!(pct > 0 && pct <= 100)) {
      throw Error(ErrorKind::kInvalidArgument, "pipeline.scale_percents must be in (0, 100]");
    }
  }
  for (int level : cfg.pipeline.effort_levels) {
    if (level < 0 || level > 9) {
      throw Error(ErrorKind::kInvalidArgument, "pipeline.effort_levels must be 0-9");
    }
  }

  if (j.contains("bench")) {
    const json& b = j["bench"];
    CheckKeys(b, "bench",
              {"repetitions", "repetitions_baseline", "repetitions_modified", "warmup_image",
               "order", "persistent", "sample_interval_ms", "response_timeout_s"});
    if (b.contains("repetitions") && !b["repetitions"].is_null()) {
      cfg.bench.repetitions = b["repetitions"].get<int>();
    }
    Read(b, "repetitions_baseline", &cfg.bench.repetitions_baseline);
    Read(b, "repetitions_modified", &cfg.bench.repetitions_modified);
    if (b.contains("warmup_image") && !b["warmup_image"].is_null()) {
      cfg.bench.warmup_image = b["warmup_image"].get<std::string>();
    }
    std::string order = "pixels";
    Read(b, "order", &order);
    if (order == "pixels") {
      cfg.bench.order = ImageOrder::kByTotalPixelsAsc;
    } else if (order == "listed") {
      cfg.bench.order = ImageOrder::kAsListed;
    } else {
      throw Error(ErrorKind::kInvalidArgument, "bench.order must be 'pixels' or 'listed'");
    }
    Read(b, "persistent", &cfg.bench.external.persistent);
    int interval_ms = static_cast<int>(cfg.bench.external.sample_interval.count());
    Read(b, "sample_interval_ms", &interval_ms);
    cfg.bench.external.sample_interval = std::chrono::milliseconds(interval_ms);
    double timeout_s = cfg.bench.external.response_timeout.count() / 1000.0;
    Read(b, "response_timeout_s", &timeout_s);
    cfg.bench.external.response_timeout =
        std::chrono::milliseconds(static_cast<int64_t>(timeout_s * 1000));
  }
  return cfg;
}

ToolkitConfig LoadConfig(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kInvalidArgument, "config " + path.string() + ": " + e.what());
  }
  return ParseConfig(j);
}

json ConfigToJson(const ToolkitConfig& cfg) {
  json j;
  j["labels"] = cfg.labels_path;
  j["eval"] = {
      {"iou_threshold", cfg.eval.match.iou_threshold},
      {"pr_min_confidence", cfg.eval.match.min_confidence},
      {"accuracy_min_confidence", cfg.eval.accuracy_min_confidence},
      {"iou_floor", cfg.eval.match.iou_floor},
      {"require_class_match", cfg.eval.match.require_class_match},
      {"include_difficult", cfg.eval.match.include_difficult},
      {"iou_ladder", cfg.eval.iou_ladder},
  };
  j["pipeline"] = {
      {"scale_percents", cfg.pipeline.scale_percents},
      {"algorithm", ScaleAlgorithmName(cfg.pipeline.algorithm)},
      {"effort_levels", cfg.pipeline.effort_levels},
      {"scaled_effort", cfg.pipeline.scaled_effort},
      {"tile_side", cfg.pipeline.tile_side},
      {"tile_overlap", cfg.pipeline.tile_overlap},
      {"keep_fraction", cfg.pipeline.keep_fraction},
  };
  j["bench"] = {
      {"repetitions", cfg.bench.repetitions ? json(*cfg.bench.repetitions) : json(nullptr)},
      {"repetitions_baseline", cfg.bench.repetitions_baseline},
      {"repetitions_modified", cfg.bench.repetitions_modified},
      {"warmup_image", cfg.bench.warmup_image ? json(*cfg.bench.warmup_image) : json(nullptr)},
      {"order", cfg.bench.order == ImageOrder::kByTotalPixelsAsc ? "pixels" : "listed"},
      {"persistent", cfg.bench.external.persistent},
      {"sample_interval_ms", cfg.bench.external.sample_interval.count()},
      {"response_timeout_s", cfg.bench.external.response_timeout.count() / 1000.0},
  };
  return j;
}

LabelMap LoadLabels(const ToolkitConfig& cfg) {
  if (cfg.labels_path.empty()) return LabelMap::Dota();
  return LoadLabelMap(ReadFile(cfg.labels_path));
}

json MakeManifest(const ToolkitConfig& cfg, const std::vector<ImageRecord>& images,
                  const std::string& command, const std::string& backend_id) {
  json dataset = {{"images", images.size()}};
  if (!images.empty()) {
    const std::vector<std::string> order = OrderByPixels(images);
    auto pixels_of = [&](const std::string& id) {
      for (const ImageRecord& r : images) {
        if (r.id == id) return TotalPixels(r);
      }
      return int64_t{0};
    };
    dataset["smallest"] = {{"id", order.front()}, {"pixels", pixels_of(order.front())}};
    dataset["largest"] = {{"id", order.back()}, {"pixels", pixels_of(order.back())}};
  }
  json m = {
      {"toolkit", "detbench"},
      {"version", kToolkitVersion},
      {"command", command},
      {"created", Iso8601Now()},
      {"config", ConfigToJson(cfg)},
      {"dataset", dataset},
  };
  if (!backend_id.empty()) m["backend"] = backend_id;
  return m;
}

}  // namespace detbench
