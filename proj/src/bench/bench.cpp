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

#include "detbench/bench.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "detbench/error.hpp"

namespace detbench {

std::vector<std::string> OrderByPixels(const std::vector<ImageRecord>& images) {
  DatasetIndex index;
  index.images = images;
  return index.ids_by_pixels();
}

namespace {

BenchSample ToSample(const ImageRecord& image, int run_index, bool discarded, RunOutcome run,
                     const Backend& backend) {
  BenchSample s;
  s.image_id = image.id;
  s.run_index = run_index;
  s.outcome = run.outcome;
  s.discarded = discarded;
  s.peak_rss = run.peak_rss;
  s.final_swap = run.final_swap;
  s.harness_time_s = run.harness_time_s;
  s.message = std::move(run.message);
  if (run.backend_time_s && *run.backend_time_s > 0) {
    s.wall_time_s = *run.backend_time_s;
    s.timing_source = backend.timing_source();
  } else if (run.harness_time_s) {
    s.wall_time_s = *run.harness_time_s;
    s.timing_source = "harness";
  } else {
    s.timing_source = backend.timing_source();
  }
  if (s.outcome == Outcome::kOk) s.detections = std::move(run.detections);
  return s;
}

}  // namespace

std::vector<BenchSample> RunBenchmark(const BenchPlan& plan, Backend& backend,
                                      const SampleCallback& on_sample) {
  if (plan.images.empty()) throw Error(ErrorKind::kInvalidArgument, "benchmark plan has no images");
  if (plan.repetitions && *plan.repetitions < 1) {
    throw Error(ErrorKind::kInvalidArgument, "repetitions must be >= 1");
  }
  std::map<std::string, const ImageRecord*> by_id;
  for (const ImageRecord& rec : plan.images) by_id[rec.id] = &rec;

  std::vector<std::string> order;
  if (plan.order == ImageOrder::kByTotalPixelsAsc) {
    order = OrderByPixels(plan.images);
  } else {
    for (const ImageRecord& rec : plan.images) order.push_back(rec.id);
  }
  const std::string warmup = plan.warmup_image.value_or(OrderByPixels(plan.images).front());
  if (by_id.count(warmup) == 0) {
    throw Error(ErrorKind::kInvalidArgument, "warm-up image '" + warmup + "' is not in the plan");
  }

  backend.Start(order);
  std::vector<BenchSample> samples;
  auto record = [&](BenchSample s) {
    if (on_sample) on_sample(s);
    samples.push_back(std::move(s));
  };
  auto path_of = [&](const std::string& id) { return plan.image_dir / (id + ".png"); };

  try {
    const ImageRecord& w = *by_id.at(warmup);
    record(ToSample(w, 0, true, backend.Run(w, path_of(w.id)), backend));
    for (const std::string& id : order) {
      const ImageRecord& rec = *by_id.at(id);
      const int reps = plan.repetitions.value_or(rec.is_original() ? plan.repetitions_baseline
                                                                   : plan.repetitions_modified);
      for (int r = 1; r <= reps; ++r) {
        BenchSample s = ToSample(rec, r, false, backend.Run(rec, path_of(id)), backend);
        const bool oom = s.outcome == Outcome::kOom;
        record(std::move(s));
        if (oom) break;
      }
    }
  } catch (...) {
    backend.Stop();
    throw;
  }
  backend.Stop();
  return samples;
}

double RunnableFraction(const std::vector<BenchSample>& samples) {
  std::map<std::string, bool> runnable;
  for (const BenchSample& s : samples) {
    if (s.discarded) continue;
    auto [it, inserted] = runnable.emplace(s.image_id, true);
    if (s.outcome != Outcome::kOk) it->second = false;
  }
  if (runnable.empty()) throw Error(ErrorKind::kInvalidArgument, "no measured samples");
  const auto ok = std::count_if(runnable.begin(), runnable.end(),
                                [](const auto& kv) { return kv.second; });
  return static_cast<double>(ok) / static_cast<double>(runnable.size());
}

std::vector<ImageSummary> SummarizeSamples(const std::vector<BenchSample>& samples,
                                           const std::vector<ImageRecord>& images) {
  std::map<std::string, int64_t> pixels;
  for (const ImageRecord& rec : images) pixels[rec.id] = TotalPixels(rec);

  struct Acc {
    ImageSummary summary;
    double time = 0;
    double rss = 0;
    double swap = 0;
    int rss_n = 0;
    int swap_n = 0;
    bool error = false;
  };
  std::vector<std::string> order;
  std::map<std::string, Acc> acc;
  for (const BenchSample& s : samples) {
    if (s.discarded) continue;
    auto [it, inserted] = acc.try_emplace(s.image_id);
    Acc& a = it->second;
    if (inserted) {
      order.push_back(s.image_id);
      a.summary.image_id = s.image_id;
      a.summary.total_pixels = pixels.count(s.image_id) ? pixels[s.image_id] : 0;
    }
    ++a.summary.attempted;
    if (s.outcome == Outcome::kOom) a.summary.oom = true;
    if (s.outcome == Outcome::kBackendError) a.error = true;
    if (s.outcome != Outcome::kOk) continue;
    ++a.summary.ok;
    a.time += s.wall_time_s;
    if (s.peak_rss) {
      a.rss += static_cast<double>(*s.peak_rss);
      ++a.rss_n;
    }
    if (s.final_swap) {
      a.swap += static_cast<double>(*s.final_swap);
      ++a.swap_n;
    }
  }
  std::vector<ImageSummary> out;
  for (const std::string& id : order) {
    Acc& a = acc[id];
    ImageSummary& s = a.summary;
    s.runnable = s.ok == s.attempted;
    if (s.ok > 0) s.mean_time_s = a.time / s.ok;
    if (a.rss_n > 0) s.mean_peak_rss = a.rss / a.rss_n;
    if (a.swap_n > 0) s.mean_final_swap = a.swap / a.swap_n;
    out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text formats

namespace {

std::string Na() { return "NA"; }

template <typename T>
std::string Opt(const std::optional<T>& v) {
  if (!v) return Na();
  if constexpr (std::is_floating_point_v<T>) {
    return FormatDouble(*v);
  } else {
    return std::to_string(*v);
  }
}

std::string Sanitize(std::string s) {
  for (char& c : s) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

std::vector<std::string> SplitTabs(std::string_view line, size_t max_fields) {
  std::vector<std::string> out;
  size_t start = 0;
  while (out.size() + 1 < max_fields) {
    const size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) break;
    out.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  out.emplace_back(line.substr(start));
  return out;
}

template <typename T>
std::optional<T> ParseOpt(const std::string& s) {
  if (s == "NA") return std::nullopt;
  try {
    if constexpr (std::is_floating_point_v<T>) {
      return static_cast<T>(std::stod(s));
    } else {
      return static_cast<T>(std::stoull(s));
    }
  } catch (const std::exception&) {
    throw Error(ErrorKind::kMalformedAnnotation, "bad numeric field '" + s + "'");
  }
}

std::string CommentBlock(const std::string& comment) {
  std::string out;
  std::istringstream in(comment);
  std::string line;
  while (std::getline(in, line)) out += "# " + line + "\n";
  return out;
}

std::vector<std::string_view> Records(std::string_view text) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && line.front() != '#') out.push_back(line);
    start = end + 1;
  }
  return out;
}

}  // namespace

std::string WriteSamples(const std::vector<BenchSample>& samples, const std::string& comment) {
  std::string out = CommentBlock(comment);
  out +=
      "# image_id\trun_index\toutcome\twall_time_s\tpeak_rss_bytes\tfinal_swap_bytes\t"
      "discarded\tharness_time_s\ttiming_source\tmessage\n";
  for (const BenchSample& s : samples) {
    out += s.image_id + '\t' + std::to_string(s.run_index) + '\t' + OutcomeName(s.outcome) + '\t' +
           FormatDouble(s.wall_time_s) + '\t' + Opt(s.peak_rss) + '\t' + Opt(s.final_swap) + '\t' +
           (s.discarded ? "1" : "0") + '\t' + Opt(s.harness_time_s) + '\t' +
           (s.timing_source.empty() ? Na() : s.timing_source) + '\t' + Sanitize(s.message) + '\n';
  }
  return out;
}

std::vector<BenchSample> ParseSamples(std::string_view text) {
  std::vector<BenchSample> out;
  for (std::string_view line : Records(text)) {
    const auto f = SplitTabs(line, 10);
    if (f.size() < 7) {
      throw Error(ErrorKind::kMalformedAnnotation,
                  "sample record needs at least 7 fields: '" + std::string(line) + "'");
    }
    BenchSample s;
    s.image_id = f[0];
    s.run_index = std::stoi(f[1]);
    s.outcome = ParseOutcome(f[2]);
    s.wall_time_s = std::stod(f[3]);
    s.peak_rss = ParseOpt<uint64_t>(f[4]);
    s.final_swap = ParseOpt<uint64_t>(f[5]);
    s.discarded = f[6] == "1";
    if (f.size() > 7) s.harness_time_s = ParseOpt<double>(f[7]);
    if (f.size() > 8 && f[8] != "NA") s.timing_source = f[8];
    if (f.size() > 9) s.message = f[9];
    out.push_back(std::move(s));
  }
  return out;
}

std::string WriteSummaries(const std::vector<ImageSummary>& summaries,
                           const std::string& comment) {
  std::string out = CommentBlock(comment);
  out +=
      "# image_id\ttotal_pixels\tattempted\tok\tstatus\tmean_time_s\tmean_peak_rss\t"
      "mean_final_swap\n";
  for (const ImageSummary& s : summaries) {
    const char* status = s.runnable ? "ok" : (s.oom ? "oom" : "error");
    out += s.image_id + '\t' + std::to_string(s.total_pixels) + '\t' + std::to_string(s.attempted) +
           '\t' + std::to_string(s.ok) + '\t' + status + '\t' + Opt(s.mean_time_s) + '\t' +
           Opt(s.mean_peak_rss) + '\t' + Opt(s.mean_final_swap) + '\n';
  }
  return out;
}

std::vector<ImageSummary> ParseSummaries(std::string_view text) {
  std::vector<ImageSummary> out;
  for (std::string_view line : Records(text)) {
    const auto f = SplitTabs(line, 8);
    if (f.size() != 8) {
      throw Error(ErrorKind::kMalformedAnnotation,
                  "summary record needs 8 fields: '" + std::string(line) + "'");
    }
    ImageSummary s;
    s.image_id = f[0];
    s.total_pixels = std::stoll(f[1]);
    s.attempted = std::stoi(f[2]);
    s.ok = std::stoi(f[3]);
    s.runnable = f[4] == "ok";
    s.oom = f[4] == "oom";
    s.mean_time_s = ParseOpt<double>(f[5]);
    s.mean_peak_rss = ParseOpt<double>(f[6]);
    s.mean_final_swap = ParseOpt<double>(f[7]);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace detbench
