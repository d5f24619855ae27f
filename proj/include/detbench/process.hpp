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

#include <sys/types.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace detbench {

struct ExitStatus {
  bool exited = false;  // normal exit; `code` valid
  int code = 0;
  bool signaled = false;  // killed; `signal` valid
  int signal = 0;
};

// Child process with line-oriented pipes on stdin/stdout. stderr is captured
// (up to 64 KiB) for failure diagnosis.
class Subprocess {
 public:
  enum class ReadStatus { kLine, kEof, kTimeout };

  // Throws kBackend when the program cannot be executed.
  static Subprocess Spawn(const std::vector<std::string>& argv);

  Subprocess(Subprocess&& other) noexcept;
  Subprocess& operator=(Subprocess&& other) noexcept;
  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;
  ~Subprocess();

  pid_t pid() const { return pid_; }
  bool running() const { return pid_ > 0 && !status_; }

  // Appends '\n'. False when the pipe is closed.
  bool WriteLine(std::string_view line);
  ReadStatus ReadLine(std::string* line, std::chrono::milliseconds timeout);
  void CloseStdin();

  // Waits up to `grace`, then SIGKILLs.
  ExitStatus Wait(std::chrono::milliseconds grace);
  void Kill();

  const std::string& stderr_text() const { return stderr_; }

 private:
  Subprocess() = default;
  void DrainStderr();
  void Reset();

  pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  int stderr_fd_ = -1;
  std::string out_buffer_;
  std::string stderr_;
  std::optional<ExitStatus> status_;
};

struct MemoryReading {
  std::optional<uint64_t> peak_rss;    // bytes
  std::optional<uint64_t> final_swap;  // bytes of system swap in use
  size_t samples = 0;
};

// Resident set size of a live process from /proc; nullopt when unavailable.
std::optional<uint64_t> ReadProcessRss(pid_t pid);
// Kernel-recorded RSS high-water mark (VmHWM).
std::optional<uint64_t> ReadProcessPeakRss(pid_t pid);
// SwapTotal - SwapFree from /proc/meminfo.
std::optional<uint64_t> ReadSwapUsed();

// Samples a process's RSS and the system swap on a background thread until
// Stop(). The peak is the max over samples (and VmHWM when enabled); the
// swap value is the last reading taken.
class MemorySampler {
 public:
  MemorySampler(pid_t pid, std::chrono::milliseconds interval, bool use_high_water_mark = true);
  ~MemorySampler();
  MemorySampler(const MemorySampler&) = delete;
  MemorySampler& operator=(const MemorySampler&) = delete;

  // Snapshot without stopping.
  MemoryReading Current() const;
  MemoryReading Stop();

 private:
  void SampleOnce();
  void Loop();

  pid_t pid_;
  std::chrono::milliseconds interval_;
  bool use_hwm_;
  mutable std::mutex mu_;
  MemoryReading reading_;
  std::atomic<bool> stop_{false};
  std::mutex wake_mu_;
  std::condition_variable wake_;
  std::thread thread_;
};

// Samples until the process exits or becomes a zombie.
MemoryReading SampleMemoryUntilExit(pid_t pid, std::chrono::milliseconds interval);

}  // namespace detbench
