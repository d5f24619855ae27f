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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "detbench/annotation_io.hpp"
#include "detbench/backend.hpp"

namespace detbench {

enum class ImageOrder { kByTotalPixelsAsc, kAsListed };

struct BenchPlan {
  std::vector<ImageRecord> images;
  std::filesystem::path image_dir;  // <image_dir>/<id>.png is sent to backends
  // Fixed count for every image; otherwise 5 for original images and 3 for
  // derived ones.
  std::optional<int> repetitions;
  int repetitions_baseline = 5;
  int repetitions_modified = 3;
  // Defaults to the smallest image.
  std::optional<std::string> warmup_image;
  ImageOrder order = ImageOrder::kByTotalPixelsAsc;
};

struct BenchSample {
  std::string image_id;
  int run_index = 0;  // 0 for the warm-up run, measured runs count from 1
  Outcome outcome = Outcome::kOk;
  double wall_time_s = 0;
  std::optional<uint64_t> peak_rss;
  std::optional<uint64_t> final_swap;
  bool discarded = false;
  std::optional<double> harness_time_s;
  std::string timing_source;
  std::string message;
  std::vector<Detection> detections;  // not persisted in the sample file
};

struct ImageSummary {
  std::string image_id;
  int64_t total_pixels = 0;
  int attempted = 0;
  int ok = 0;
  bool oom = false;
  bool runnable = false;  // every measured run ok
  std::optional<double> mean_time_s;
  std::optional<double> mean_peak_rss;
  std::optional<double> mean_final_swap;
};

using SampleCallback = std::function<void(const BenchSample&)>;

// Executes the warm-up run (discarded) and then each image `repetitions`
// times in plan order, strictly sequentially. An OOM ends the remaining
// repetitions of that image. Throws kBackend if the backend cannot start.
std::vector<BenchSample> RunBenchmark(const BenchPlan& plan, Backend& backend,
                                      const SampleCallback& on_sample = {});

// Ascending total pixels, ties by id.
std::vector<std::string> OrderByPixels(const std::vector<ImageRecord>& images);

// Images whose measured runs all succeeded over images attempted; the
// warm-up sample is ignored. Throws kInvalidArgument on an empty set.
double RunnableFraction(const std::vector<BenchSample>& samples);

// Per-image means over non-discarded ok samples, in first-seen order.
std::vector<ImageSummary> SummarizeSamples(const std::vector<BenchSample>& samples,
                                           const std::vector<ImageRecord>& images);

// Tab-separated, one sample per line; '#' lines are comments. Columns:
// image_id run_index outcome wall_time_s peak_rss_bytes final_swap_bytes
// discarded harness_time_s timing_source message. "NA" marks unavailable.
std::string WriteSamples(const std::vector<BenchSample>& samples, const std::string& comment = "");
std::vector<BenchSample> ParseSamples(std::string_view text);

// image_id total_pixels attempted ok status mean_time_s mean_peak_rss
// mean_final_swap, status in {ok, oom, error}.
std::string WriteSummaries(const std::vector<ImageSummary>& summaries,
                           const std::string& comment = "");
std::vector<ImageSummary> ParseSummaries(std::string_view text);

}  // namespace detbench
