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

#include "detbench/backend.hpp"

#include <signal.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "detbench/annotation_io.hpp"
#include "detbench/error.hpp"

namespace detbench {

const char* OutcomeName(Outcome outcome) {
  switch (outcome) {
    case Outcome::kOk: return "ok";
    case Outcome::kOom: return "oom";
    case Outcome::kBackendError: return "backend-error";
  }
  return "backend-error";
}

Outcome ParseOutcome(const std::string& name) {
  if (name == "ok") return Outcome::kOk;
  if (name == "oom") return Outcome::kOom;
  if (name == "backend-error") return Outcome::kBackendError;
  throw Error(ErrorKind::kInvalidArgument, "unknown outcome '" + name + "'");
}

// ---------------------------------------------------------------------------
// Synthetic

SyntheticBackend::SyntheticBackend(std::string id, SyntheticModel model)
    : id_(std::move(id)), model_(model) {
  if (!(model_.seconds_per_pixel >= 0) || !(model_.overhead_s >= 0)) {
    throw Error(ErrorKind::kInvalidArgument, "synthetic model coefficients must be >= 0");
  }
}

RunOutcome SyntheticBackend::Run(const ImageRecord& image, const std::filesystem::path&) {
  RunOutcome out;
  const int64_t pixels = TotalPixels(image);
  if (pixels > model_.memory_limit_pixels) {
    out.outcome = Outcome::kOom;
    out.message = "modelled memory exhausted";
    return out;
  }
  out.backend_time_s = model_.overhead_s + model_.seconds_per_pixel * static_cast<double>(pixels);
  out.peak_rss = model_.rss_base_bytes +
                 static_cast<uint64_t>(model_.rss_bytes_per_pixel * static_cast<double>(pixels));
  out.final_swap = 0;
  return out;
}

// ---------------------------------------------------------------------------
// Replay

ReplayBackend::ReplayBackend(std::string id, std::filesystem::path dir)
    : id_(std::move(id)), dir_(std::move(dir)) {}

void ReplayBackend::Start(const std::vector<std::string>& image_ids) {
  std::vector<std::string> missing;
  for (const std::string& image : image_ids) {
    if (!std::filesystem::exists(dir_ / (image + ".txt"))) missing.push_back(image);
  }
  if (!missing.empty()) {
    std::string list;
    for (const std::string& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw Error(ErrorKind::kBackend, "replay directory " + dir_.string() +
                                         " lacks detection files for: " + list);
  }
}

RunOutcome ReplayBackend::Run(const ImageRecord& image, const std::filesystem::path&) {
  RunOutcome out;
  const std::filesystem::path file = dir_ / (image.id + ".txt");
  try {
    const std::string text = ReadFile(file);
    out.detections = ParseDetections(text);
    out.backend_time_s = 0.001;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      constexpr std::string_view kTag = "# time:";
      if (line.rfind(kTag, 0) == 0) out.backend_time_s = std::stod(line.substr(kTag.size()));
    }
  } catch (const std::exception& e) {
    out = RunOutcome{};
    out.outcome = Outcome::kBackendError;
    out.message = e.what();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Wire protocol

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view Keyword(std::string_view line, std::string_view* rest) {
  line = Trim(line);
  const size_t sp = line.find_first_of(" \t");
  if (sp == std::string_view::npos) {
    *rest = {};
    return line;
  }
  *rest = Trim(line.substr(sp + 1));
  return line.substr(0, sp);
}

ProtocolResponse Violation(const std::string& what) {
  ProtocolResponse r;
  r.outcome = Outcome::kBackendError;
  r.message = "protocol violation: " + what;
  return r;
}

}  // namespace

ProtocolResponse ParseProtocolResponse(const std::vector<std::string>& lines) {
  ProtocolResponse r;
  bool have_time = false;
  bool terminal = false;  // OOM or ERR seen
  for (const std::string& raw : lines) {
    std::string_view rest;
    const std::string_view kw = Keyword(raw, &rest);
    if (terminal) return Violation("unexpected line after OOM/ERR: '" + raw + "'");
    if (kw == "TIME") {
      if (have_time) return Violation("duplicate TIME");
      double t = 0;
      auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), t);
      if (ec != std::errc() || ptr != rest.data() + rest.size() || !std::isfinite(t) || t < 0) {
        return Violation("bad TIME value '" + std::string(rest) + "'");
      }
      r.time_s = t;
      have_time = true;
    } else if (kw == "DET") {
      if (!have_time) return Violation("DET before TIME");
      try {
        auto dets = ParseDetections(rest);
        if (dets.size() != 1) return Violation("bad DET line '" + raw + "'");
        r.detections.push_back(std::move(dets.front()));
      } catch (const Error& e) {
        return Violation("bad DET line '" + raw + "': " + e.what());
      }
    } else if (kw == "OOM" && rest.empty()) {
      r.outcome = Outcome::kOom;
      r.detections.clear();
      terminal = true;
    } else if (kw == "ERR") {
      r.outcome = Outcome::kBackendError;
      r.message = std::string(rest);
      r.detections.clear();
      terminal = true;
    } else {
      return Violation("unknown line '" + raw + "'");
    }
  }
  if (!terminal && !have_time) return Violation("response without TIME");
  return r;
}

bool LooksLikeOom(const ExitStatus& status, const std::string& stderr_text) {
  if (status.signaled && status.signal == SIGKILL) return true;
  if (status.exited && status.code == 137) return true;
  std::string lower(stderr_text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (status.exited && status.code == 0) return false;
  for (const char* marker : {"out of memory", "resourceexhausted", "resource exhausted",
                             "std::bad_alloc", "memoryerror", "cannot allocate memory"}) {
    if (lower.find(marker) != std::string::npos) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// External process

ExternalProcessBackend::ExternalProcessBackend(std::string id, std::vector<std::string> argv,
                                               ExternalOptions options)
    : id_(std::move(id)), argv_(std::move(argv)), options_(options) {
  if (argv_.empty()) throw Error(ErrorKind::kInvalidArgument, "empty backend command line");
}

ExternalProcessBackend::~ExternalProcessBackend() { Stop(); }

void ExternalProcessBackend::Start(const std::vector<std::string>&) {
  if (options_.persistent) {
    proc_.emplace(Subprocess::Spawn(argv_));
  } else {
    // Fail fast on an unrunnable command instead of once per image.
    Subprocess probe = Subprocess::Spawn(argv_);
    probe.WriteLine("QUIT");
    probe.CloseStdin();
    probe.Wait(options_.exit_grace);
  }
}

void ExternalProcessBackend::Stop() {
  if (!proc_) return;
  proc_->WriteLine("QUIT");
  proc_->CloseStdin();
  proc_->Wait(options_.exit_grace);
  proc_.reset();
}

RunOutcome ExternalProcessBackend::Request(Subprocess& proc,
                                           const std::filesystem::path& image_path,
                                           bool use_hwm) {
  RunOutcome out;
  MemorySampler sampler(proc.pid(), options_.sample_interval, use_hwm);
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> lines;
  bool ended = false;
  bool timed_out = false;
  if (proc.WriteLine("DETECT " + image_path.string())) {
    std::string line;
    for (;;) {
      const auto status = proc.ReadLine(&line, options_.response_timeout);
      if (status == Subprocess::ReadStatus::kTimeout) {
        timed_out = true;
        break;
      }
      if (status == Subprocess::ReadStatus::kEof) break;
      if (Trim(line) == "END") {
        ended = true;
        break;
      }
      lines.push_back(line);
    }
  }
  out.harness_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const MemoryReading mem = sampler.Stop();
  out.peak_rss = mem.peak_rss;
  out.final_swap = mem.final_swap;

  if (ended) {
    ProtocolResponse r = ParseProtocolResponse(lines);
    out.outcome = r.outcome;
    out.detections = std::move(r.detections);
    out.backend_time_s = r.time_s;
    out.message = std::move(r.message);
    return out;
  }
  if (timed_out) {
    proc.Kill();
    out.outcome = Outcome::kBackendError;
    out.message = "timed out waiting for END";
    return out;
  }
  const ExitStatus st = proc.Wait(options_.exit_grace);
  if (LooksLikeOom(st, proc.stderr_text())) {
    out.outcome = Outcome::kOom;
    out.message = st.signaled ? "killed by signal " + std::to_string(st.signal)
                              : "exited " + std::to_string(st.code) + " out of memory";
  } else {
    out.outcome = Outcome::kBackendError;
    out.message = st.signaled ? "backend killed by signal " + std::to_string(st.signal)
                              : "backend exited with code " + std::to_string(st.code) +
                                    " before END";
  }
  return out;
}

RunOutcome ExternalProcessBackend::Run(const ImageRecord&, const std::filesystem::path& image_path) {
  if (options_.persistent) {
    if (!proc_ || !proc_->running()) proc_.emplace(Subprocess::Spawn(argv_));
    RunOutcome out = Request(*proc_, image_path, false);
    if (!proc_->running()) proc_.reset();
    return out;
  }
  Subprocess proc = Subprocess::Spawn(argv_);
  RunOutcome out = Request(proc, image_path, true);
  if (proc.running()) {
    proc.WriteLine("QUIT");
    proc.CloseStdin();
    proc.Wait(options_.exit_grace);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> SplitCommand(const std::string& cmd) {
  std::istringstream in(cmd);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double ParseNumber(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::kInvalidArgument, "bad value for " + key + ": '" + value + "'");
  }
}

}  // namespace

std::unique_ptr<Backend> MakeBackend(const std::string& spec, const ExternalOptions& options) {
  const size_t colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "synthetic") {
    SyntheticModel model;
    std::istringstream in(arg);
    std::string kv;
    while (std::getline(in, kv, ',')) {
      if (kv.empty()) continue;
      const size_t eq = kv.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorKind::kInvalidArgument, "synthetic option without '=': " + kv);
      }
      const std::string key = kv.substr(0, eq);
      const std::string value = kv.substr(eq + 1);
      if (key == "limit") {
        model.memory_limit_pixels = static_cast<int64_t>(ParseNumber(key, value));
      } else if (key == "coeff") {
        model.seconds_per_pixel = ParseNumber(key, value);
      } else if (key == "overhead") {
        model.overhead_s = ParseNumber(key, value);
      } else {
        throw Error(ErrorKind::kInvalidArgument, "unknown synthetic option '" + key + "'");
      }
    }
    return std::make_unique<SyntheticBackend>("synthetic", model);
  }
  if (kind == "replay") {
    if (arg.empty()) throw Error(ErrorKind::kInvalidArgument, "replay backend needs a directory");
    return std::make_unique<ReplayBackend>("replay", arg);
  }
  if (kind == "exec") {
    std::vector<std::string> argv = SplitCommand(arg);
    if (argv.empty()) throw Error(ErrorKind::kInvalidArgument, "exec backend needs a command");
    const std::string id = std::filesystem::path(argv[0]).filename().string();
    return std::make_unique<ExternalProcessBackend>(id, std::move(argv), options);
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown backend spec '" + spec + "'");
}

}  // namespace detbench
