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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "detbench/process.hpp"
#include "detbench/types.hpp"

namespace detbench {

enum class Outcome { kOk, kOom, kBackendError };

const char* OutcomeName(Outcome outcome);
Outcome ParseOutcome(const std::string& name);

struct RunOutcome {
  Outcome outcome = Outcome::kOk;
  std::vector<Detection> detections;
  // Detection-phase time reported by the backend (TIME line or model).
  std::optional<double> backend_time_s;
  // Round trip measured by the harness; absent for in-process backends.
  std::optional<double> harness_time_s;
  std::optional<uint64_t> peak_rss;
  std::optional<uint64_t> final_swap;
  std::string message;
};

class Backend {
 public:
  virtual ~Backend() = default;

  virtual const std::string& id() const = 0;
  // "backend" when wall time is the backend-reported detection phase,
  // "harness" for round trips, "model" for the synthetic backend.
  virtual std::string timing_source() const = 0;
  virtual bool persistent() const { return false; }

  // Called once before any run. Throws kBackend when the backend cannot
  // serve the requested images.
  virtual void Start(const std::vector<std::string>& image_ids) { (void)image_ids; }
  virtual RunOutcome Run(const ImageRecord& image, const std::filesystem::path& image_path) = 0;
  virtual void Stop() {}
};

// time = overhead + seconds_per_pixel * pixels; OOM when pixels exceed the
// limit. Nothing is executed.
struct SyntheticModel {
  int64_t memory_limit_pixels = INT64_MAX;
  double seconds_per_pixel = 1e-7;
  double overhead_s = 0.5;
  double rss_bytes_per_pixel = 3.0;
  uint64_t rss_base_bytes = 256ull << 20;
};

class SyntheticBackend : public Backend {
 public:
  SyntheticBackend(std::string id, SyntheticModel model);

  const std::string& id() const override { return id_; }
  std::string timing_source() const override { return "model"; }
  RunOutcome Run(const ImageRecord& image, const std::filesystem::path& image_path) override;

  const SyntheticModel& model() const { return model_; }

 private:
  std::string id_;
  SyntheticModel model_;
};

// Serves recorded detection files <dir>/<image_id>.txt. A "# time: <s>"
// comment sets the reported time (default 0.001 s).
class ReplayBackend : public Backend {
 public:
  ReplayBackend(std::string id, std::filesystem::path dir);

  const std::string& id() const override { return id_; }
  std::string timing_source() const override { return "replay"; }
  void Start(const std::vector<std::string>& image_ids) override;
  RunOutcome Run(const ImageRecord& image, const std::filesystem::path& image_path) override;

 private:
  std::string id_;
  std::filesystem::path dir_;
};

struct ExternalOptions {
  // One process per image run unless persistent.
  bool persistent = false;
  std::chrono::milliseconds sample_interval{50};
  std::chrono::milliseconds response_timeout{600'000};
  std::chrono::milliseconds exit_grace{5'000};
};

// Speaks the line protocol over a child's stdin/stdout:
//   -> DETECT <path>
//   <- TIME <s>, DET <category> <conf> <xmin> <ymin> <xmax> <ymax> ..., END
//   <- OOM, END  |  ERR <message>, END
//   -> QUIT
class ExternalProcessBackend : public Backend {
 public:
  ExternalProcessBackend(std::string id, std::vector<std::string> argv, ExternalOptions options);
  ~ExternalProcessBackend() override;

  const std::string& id() const override { return id_; }
  std::string timing_source() const override { return "backend"; }
  bool persistent() const override { return options_.persistent; }
  void Start(const std::vector<std::string>& image_ids) override;
  RunOutcome Run(const ImageRecord& image, const std::filesystem::path& image_path) override;
  void Stop() override;

 private:
  RunOutcome Request(Subprocess& proc, const std::filesystem::path& image_path, bool use_hwm);

  std::string id_;
  std::vector<std::string> argv_;
  ExternalOptions options_;
  std::optional<Subprocess> proc_;
};

// Parsed backend reply to one DETECT request.
struct ProtocolResponse {
  Outcome outcome = Outcome::kOk;
  std::optional<double> time_s;
  std::vector<Detection> detections;
  std::string message;
};

// `lines` excludes the terminating END. Violations give kBackendError.
ProtocolResponse ParseProtocolResponse(const std::vector<std::string>& lines);

// True when an exit status or stderr text indicates memory exhaustion.
bool LooksLikeOom(const ExitStatus& status, const std::string& stderr_text);

// "synthetic:limit=N,coeff=S,overhead=S", "replay:<dir>" or
// "exec:<command line>" (whitespace separated).
std::unique_ptr<Backend> MakeBackend(const std::string& spec, const ExternalOptions& options);

}  // namespace detbench
