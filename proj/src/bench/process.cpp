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

#include "detbench/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "detbench/error.hpp"

namespace detbench {

namespace {

constexpr size_t kStderrCap = 64 * 1024;

void CloseFd(int* fd) {
  if (*fd >= 0) {
    ::close(*fd);
    *fd = -1;
  }
}

ExitStatus Decode(int raw) {
  ExitStatus s;
  if (WIFEXITED(raw)) {
    s.exited = true;
    s.code = WEXITSTATUS(raw);
  } else if (WIFSIGNALED(raw)) {
    s.signaled = true;
    s.signal = WTERMSIG(raw);
  }
  return s;
}

int64_t MillisLeft(std::chrono::steady_clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - std::chrono::steady_clock::now());
  return std::max<int64_t>(0, left.count());
}

}  // namespace

Subprocess Subprocess::Spawn(const std::vector<std::string>& argv) {
  if (argv.empty()) throw Error(ErrorKind::kBackend, "empty backend command");
  ::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];
  int out_pipe[2];
  int err_pipe[2];
  int exec_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0 || ::pipe2(out_pipe, O_CLOEXEC) != 0 ||
      ::pipe2(err_pipe, O_CLOEXEC) != 0 || ::pipe2(exec_pipe, O_CLOEXEC) != 0) {
    throw Error(ErrorKind::kBackend, std::string("pipe: ") + std::strerror(errno));
  }

  std::vector<char*> args;
  for (const std::string& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) throw Error(ErrorKind::kBackend, std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::dup2(err_pipe[1], STDERR_FILENO);
    ::signal(SIGPIPE, SIG_DFL);
    ::execvp(args[0], args.data());
    const int err = errno;
    [[maybe_unused]] auto n = ::write(exec_pipe[1], &err, sizeof(err));
    ::_exit(127);
  }

  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);
  ::close(exec_pipe[1]);
  int child_errno = 0;
  ssize_t n;
  do {
    n = ::read(exec_pipe[0], &child_errno, sizeof(child_errno));
  } while (n < 0 && errno == EINTR);
  ::close(exec_pipe[0]);
  if (n > 0) {
    int raw = 0;
    ::waitpid(pid, &raw, 0);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(err_pipe[0]);
    throw Error(ErrorKind::kBackend,
                "cannot start '" + argv[0] + "': " + std::strerror(child_errno));
  }

  Subprocess p;
  p.pid_ = pid;
  p.stdin_fd_ = in_pipe[1];
  p.stdout_fd_ = out_pipe[0];
  p.stderr_fd_ = err_pipe[0];
  return p;
}

Subprocess::Subprocess(Subprocess&& other) noexcept { *this = std::move(other); }

Subprocess& Subprocess::operator=(Subprocess&& other) noexcept {
  if (this != &other) {
    Reset();
    pid_ = std::exchange(other.pid_, -1);
    stdin_fd_ = std::exchange(other.stdin_fd_, -1);
    stdout_fd_ = std::exchange(other.stdout_fd_, -1);
    stderr_fd_ = std::exchange(other.stderr_fd_, -1);
    out_buffer_ = std::move(other.out_buffer_);
    stderr_ = std::move(other.stderr_);
    status_ = std::exchange(other.status_, std::nullopt);
  }
  return *this;
}

Subprocess::~Subprocess() { Reset(); }

void Subprocess::Reset() {
  if (pid_ > 0 && !status_) {
    Kill();
  }
  CloseFd(&stdin_fd_);
  CloseFd(&stdout_fd_);
  CloseFd(&stderr_fd_);
  pid_ = -1;
}

bool Subprocess::WriteLine(std::string_view line) {
  if (stdin_fd_ < 0) return false;
  std::string data(line);
  data += '\n';
  size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(stdin_fd_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    off += static_cast<size_t>(n);
  }
  return true;
}

void Subprocess::DrainStderr() {
  if (stderr_fd_ < 0) return;
  char buf[4096];
  const ssize_t n = ::read(stderr_fd_, buf, sizeof(buf));
  if (n <= 0) {
    if (n == 0 || (errno != EINTR && errno != EAGAIN)) CloseFd(&stderr_fd_);
    return;
  }
  if (stderr_.size() < kStderrCap) {
    stderr_.append(buf, std::min(static_cast<size_t>(n), kStderrCap - stderr_.size()));
  }
}

Subprocess::ReadStatus Subprocess::ReadLine(std::string* line,
                                            std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    const size_t nl = out_buffer_.find('\n');
    if (nl != std::string::npos) {
      line->assign(out_buffer_, 0, nl);
      if (!line->empty() && line->back() == '\r') line->pop_back();
      out_buffer_.erase(0, nl + 1);
      return ReadStatus::kLine;
    }
    if (stdout_fd_ < 0) {
      if (!out_buffer_.empty()) {
        *line = std::move(out_buffer_);
        out_buffer_.clear();
        return ReadStatus::kLine;
      }
      return ReadStatus::kEof;
    }
    pollfd fds[2] = {{stdout_fd_, POLLIN, 0}, {stderr_fd_, POLLIN, 0}};
    const int nfds = stderr_fd_ >= 0 ? 2 : 1;
    const int rc = ::poll(fds, nfds, static_cast<int>(MillisLeft(deadline)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      return ReadStatus::kEof;
    }
    if (rc == 0) return ReadStatus::kTimeout;
    if (nfds == 2 && (fds[1].revents & (POLLIN | POLLHUP))) DrainStderr();
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      char buf[4096];
      const ssize_t n = ::read(stdout_fd_, buf, sizeof(buf));
      if (n > 0) {
        out_buffer_.append(buf, static_cast<size_t>(n));
      } else if (n == 0 || errno != EINTR) {
        CloseFd(&stdout_fd_);
      }
    }
  }
}

void Subprocess::CloseStdin() { CloseFd(&stdin_fd_); }

ExitStatus Subprocess::Wait(std::chrono::milliseconds grace) {
  if (status_) return *status_;
  if (pid_ <= 0) return ExitStatus{};
  const auto deadline = std::chrono::steady_clock::now() + grace;
  for (;;) {
    int raw = 0;
    const pid_t r = ::waitpid(pid_, &raw, WNOHANG);
    if (r == pid_) {
      status_ = Decode(raw);
      break;
    }
    if (r < 0 && errno != EINTR) {
      status_ = ExitStatus{};
      break;
    }
    if (MillisLeft(deadline) == 0) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &raw, 0);
      status_ = Decode(raw);
      break;
    }
    while (stderr_fd_ >= 0) {
      pollfd fd{stderr_fd_, POLLIN, 0};
      if (::poll(&fd, 1, 0) <= 0) break;
      DrainStderr();
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  while (stderr_fd_ >= 0) DrainStderr();
  return *status_;
}

void Subprocess::Kill() {
  if (pid_ <= 0 || status_) return;
  ::kill(pid_, SIGKILL);
  int raw = 0;
  if (::waitpid(pid_, &raw, 0) == pid_) status_ = Decode(raw);
}

// ---------------------------------------------------------------------------
// Memory

namespace {

std::optional<uint64_t> ReadKbField(const std::string& path, const std::string& key) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  while (std::getline(in, line)) {
    if (line.compare(0, key.size(), key) == 0 && line.size() > key.size() &&
        line[key.size()] == ':') {
      std::istringstream fields(line.substr(key.size() + 1));
      uint64_t kb = 0;
      if (fields >> kb) return kb * 1024;
    }
  }
  return std::nullopt;
}

bool IsGone(pid_t pid) {
  std::ifstream in("/proc/" + std::to_string(pid) + "/stat");
  if (!in) return true;
  std::string content;
  std::getline(in, content);
  const size_t paren = content.rfind(')');
  if (paren == std::string::npos || paren + 2 >= content.size()) return true;
  const char state = content[paren + 2];
  return state == 'Z' || state == 'X';
}

}  // namespace

std::optional<uint64_t> ReadProcessRss(pid_t pid) {
  return ReadKbField("/proc/" + std::to_string(pid) + "/status", "VmRSS");
}

std::optional<uint64_t> ReadProcessPeakRss(pid_t pid) {
  return ReadKbField("/proc/" + std::to_string(pid) + "/status", "VmHWM");
}

std::optional<uint64_t> ReadSwapUsed() {
  const auto total = ReadKbField("/proc/meminfo", "SwapTotal");
  const auto free = ReadKbField("/proc/meminfo", "SwapFree");
  if (!total || !free) return std::nullopt;
  return *total >= *free ? *total - *free : 0;
}

MemorySampler::MemorySampler(pid_t pid, std::chrono::milliseconds interval,
                             bool use_high_water_mark)
    : pid_(pid), interval_(interval), use_hwm_(use_high_water_mark) {
  SampleOnce();
  thread_ = std::thread([this] { Loop(); });
}

MemorySampler::~MemorySampler() { Stop(); }

void MemorySampler::SampleOnce() {
  std::optional<uint64_t> rss = ReadProcessRss(pid_);
  if (use_hwm_) {
    if (auto hwm = ReadProcessPeakRss(pid_); hwm && (!rss || *hwm > *rss)) rss = hwm;
  }
  const std::optional<uint64_t> swap = ReadSwapUsed();
  std::lock_guard<std::mutex> lock(mu_);
  if (rss && (!reading_.peak_rss || *rss > *reading_.peak_rss)) reading_.peak_rss = rss;
  if (swap) reading_.final_swap = swap;
  ++reading_.samples;
}

void MemorySampler::Loop() {
  while (!stop_.load()) {
    std::unique_lock<std::mutex> lock(wake_mu_);
    wake_.wait_for(lock, interval_, [this] { return stop_.load(); });
    if (stop_.load()) break;
    SampleOnce();
  }
}

MemoryReading MemorySampler::Current() const {
  std::lock_guard<std::mutex> lock(mu_);
  return reading_;
}

MemoryReading MemorySampler::Stop() {
  if (thread_.joinable()) {
    {
      std::lock_guard<std::mutex> lock(wake_mu_);
      stop_.store(true);
    }
    wake_.notify_all();
    thread_.join();
    // One last reading so a response that finished between ticks is seen.
    SampleOnce();
  }
  return Current();
}

MemoryReading SampleMemoryUntilExit(pid_t pid, std::chrono::milliseconds interval) {
  MemoryReading reading;
  for (;;) {
    if (IsGone(pid)) break;
    std::optional<uint64_t> rss = ReadProcessRss(pid);
    if (auto hwm = ReadProcessPeakRss(pid); hwm && (!rss || *hwm > *rss)) rss = hwm;
    if (rss && (!reading.peak_rss || *rss > *reading.peak_rss)) reading.peak_rss = rss;
    if (auto swap = ReadSwapUsed()) reading.final_swap = swap;
    ++reading.samples;
    std::this_thread::sleep_for(interval);
  }
  return reading;
}

}  // namespace detbench
