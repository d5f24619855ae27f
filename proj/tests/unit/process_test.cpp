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

#include <gtest/gtest.h>

#include <signal.h>

#include <fstream>
#include <thread>

#include "detbench/annotation_io.hpp"
#include "detbench/backend.hpp"
#include "detbench/bench.hpp"
#include "detbench/error.hpp"
#include "detbench/image_pipeline.hpp"
#include "detbench/png_codec.hpp"
#include "detbench/process.hpp"
#include "temp_dir.hpp"

namespace detbench {
namespace {

using namespace std::chrono_literals;

const std::string kFake = DETBENCH_FAKE_BACKEND;

ExternalOptions FastOptions() {
  ExternalOptions o;
  o.sample_interval = 10ms;
  o.response_timeout = 10'000ms;
  o.exit_grace = 2'000ms;
  return o;
}

ImageRecord Record(const std::string& id) {
  ImageRecord r;
  r.id = id;
  return r;
}

std::filesystem::path WriteNoisePng(const std::filesystem::path& path, uint32_t seed, int level) {
  RasterImage img(64, 48, 3);
  uint32_t x = seed;
  for (uint8_t& b : img.mutable_pixels()) {
    x = x * 1664525u + 1013904223u;
    b = static_cast<uint8_t>(x >> 24);
  }
  WritePngFile(path, img, level);
  return path;
}

TEST(SubprocessTest, EchoesLines) {
  Subprocess p = Subprocess::Spawn({"/bin/cat"});
  ASSERT_TRUE(p.WriteLine("hello"));
  std::string line;
  ASSERT_EQ(p.ReadLine(&line, 5000ms), Subprocess::ReadStatus::kLine);
  EXPECT_EQ(line, "hello");
  p.CloseStdin();
  EXPECT_EQ(p.ReadLine(&line, 5000ms), Subprocess::ReadStatus::kEof);
  const ExitStatus st = p.Wait(2000ms);
  EXPECT_TRUE(st.exited);
  EXPECT_EQ(st.code, 0);
}

TEST(SubprocessTest, MissingProgramThrowsBackend) {
  try {
    Subprocess::Spawn({"/nonexistent/detector"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBackend);
  }
}

TEST(SubprocessTest, ReadTimeoutAndKill) {
  Subprocess p = Subprocess::Spawn({"/bin/sleep", "30"});
  std::string line;
  EXPECT_EQ(p.ReadLine(&line, 50ms), Subprocess::ReadStatus::kTimeout);
  p.Kill();
  const ExitStatus st = p.Wait(2000ms);
  EXPECT_TRUE(st.signaled);
  EXPECT_EQ(st.signal, SIGKILL);
}

TEST(SubprocessTest, CapturesStderr) {
  Subprocess p = Subprocess::Spawn({"/bin/sh", "-c", "echo oops >&2; exit 3"});
  const ExitStatus st = p.Wait(2000ms);
  EXPECT_EQ(st.code, 3);
  EXPECT_NE(p.stderr_text().find("oops"), std::string::npos);
}

TEST(ProtocolParseTest, Success) {
  const auto r = ParseProtocolResponse(
      {"TIME 1.5", "DET plane 0.9 1 2 3 4", "DET ship 0.5 0 0 10 10"});
  EXPECT_EQ(r.outcome, Outcome::kOk);
  EXPECT_EQ(*r.time_s, 1.5);
  ASSERT_EQ(r.detections.size(), 2u);
  EXPECT_EQ(r.detections[1].category, "ship");
  EXPECT_EQ(ParseProtocolResponse({"TIME 0"}).detections.size(), 0u);
}

TEST(ProtocolParseTest, OomAndErr) {
  EXPECT_EQ(ParseProtocolResponse({"OOM"}).outcome, Outcome::kOom);
  EXPECT_EQ(ParseProtocolResponse({"TIME 1", "OOM"}).outcome, Outcome::kOom);
  const auto e = ParseProtocolResponse({"ERR model not loaded"});
  EXPECT_EQ(e.outcome, Outcome::kBackendError);
  EXPECT_EQ(e.message, "model not loaded");
}

TEST(ProtocolParseTest, Violations) {
  for (const std::vector<std::string>& lines : std::vector<std::vector<std::string>>{
           {},
           {"DET plane 0.9 1 2 3 4"},
           {"TIME"},
           {"TIME -1"},
           {"TIME 1", "TIME 2"},
           {"TIME abc"},
           {"TIME 1", "DET plane 2 1 2 3 4"},
           {"TIME 1", "DET plane 0.9 1 2"},
           {"TIME 1", "HELLO"},
           {"OOM", "TIME 1"},
       }) {
    const auto r = ParseProtocolResponse(lines);
    EXPECT_EQ(r.outcome, Outcome::kBackendError) << ::testing::PrintToString(lines);
    EXPECT_NE(r.message.find("protocol violation"), std::string::npos);
  }
}

TEST(OomHeuristicTest, Signals) {
  EXPECT_TRUE(LooksLikeOom({.signaled = true, .signal = SIGKILL}, ""));
  EXPECT_FALSE(LooksLikeOom({.signaled = true, .signal = SIGSEGV}, ""));
  EXPECT_TRUE(LooksLikeOom({.exited = true, .code = 137}, ""));
  EXPECT_TRUE(LooksLikeOom({.exited = true, .code = 1}, "CUDA Out Of Memory"));
  EXPECT_TRUE(LooksLikeOom({.exited = true, .code = 1}, "terminate: std::bad_alloc"));
  EXPECT_FALSE(LooksLikeOom({.exited = true, .code = 0}, "out of memory"));
  EXPECT_FALSE(LooksLikeOom({.exited = true, .code = 1}, "file not found"));
}

class ExternalBackendTest : public ::testing::Test {
 protected:
  void SetUp() override { png_ = WriteNoisePng(dir_ / "img.png", 7, 6); }

  RunOutcome RunOnce(const std::vector<std::string>& flags, bool persistent = false) {
    std::vector<std::string> argv{kFake};
    argv.insert(argv.end(), flags.begin(), flags.end());
    ExternalOptions o = FastOptions();
    o.persistent = persistent;
    ExternalProcessBackend backend("fake", argv, o);
    backend.Start({"img"});
    RunOutcome r = backend.Run(Record("img"), png_);
    backend.Stop();
    return r;
  }

  testing::TempDir dir_{"external"};
  std::filesystem::path png_;
};

TEST_F(ExternalBackendTest, DetectsFromPixels) {
  const RunOutcome r = RunOnce({});
  ASSERT_EQ(r.outcome, Outcome::kOk) << r.message;
  EXPECT_EQ(r.detections.size(), 3u);
  EXPECT_EQ(*r.backend_time_s, 0.01);
  EXPECT_TRUE(r.harness_time_s.has_value());
}

TEST_F(ExternalBackendTest, ReplaysRecordedFile) {
  WriteFile(dir_ / "img.txt", "small-vehicle 0.75 1 2 30 40\n");
  const RunOutcome r = RunOnce({"--replay", dir_.path().string()});
  ASSERT_EQ(r.outcome, Outcome::kOk) << r.message;
  ASSERT_EQ(r.detections.size(), 1u);
  EXPECT_EQ(r.detections[0].category, "small-vehicle");
  EXPECT_EQ(r.detections[0].hbb, (Hbb{1, 2, 30, 40}));
}

TEST_F(ExternalBackendTest, MalformedReplyIsBackendError) {
  const RunOutcome r = RunOnce({"--malformed"});
  EXPECT_EQ(r.outcome, Outcome::kBackendError);
  EXPECT_NE(r.message.find("BOXES"), std::string::npos);
}

TEST_F(ExternalBackendTest, ReportedOom) { EXPECT_EQ(RunOnce({"--oom"}).outcome, Outcome::kOom); }

TEST_F(ExternalBackendTest, OomFromStderr) {
  EXPECT_EQ(RunOnce({"--oom-stderr"}).outcome, Outcome::kOom);
}

TEST_F(ExternalBackendTest, KilledBySigkillIsOom) {
  EXPECT_EQ(RunOnce({"--kill-self"}).outcome, Outcome::kOom);
}

TEST_F(ExternalBackendTest, CrashIsBackendError) {
  const RunOutcome r = RunOnce({"--crash"});
  EXPECT_EQ(r.outcome, Outcome::kBackendError);
  EXPECT_NE(r.message.find("signal"), std::string::npos);
}

TEST_F(ExternalBackendTest, InstantExitIsBackendError) {
  const RunOutcome r = RunOnce({"--instant-exit"});
  EXPECT_EQ(r.outcome, Outcome::kBackendError);
  EXPECT_NE(r.message.find("before END"), std::string::npos);
}

TEST_F(ExternalBackendTest, MissingImageGivesErr) {
  std::filesystem::remove(png_);
  const RunOutcome r = RunOnce({});
  EXPECT_EQ(r.outcome, Outcome::kBackendError);
}

TEST_F(ExternalBackendTest, ResponseTimeout) {
  ExternalOptions o = FastOptions();
  o.response_timeout = 200ms;
  ExternalProcessBackend backend("fake", {kFake, "--hang"}, o);
  const auto start = std::chrono::steady_clock::now();
  const RunOutcome r = backend.Run(Record("img"), png_);
  EXPECT_EQ(r.outcome, Outcome::kBackendError);
  EXPECT_NE(r.message.find("timed out"), std::string::npos);
  EXPECT_LT(std::chrono::steady_clock::now() - start, 5s);
}

TEST_F(ExternalBackendTest, UnstartableCommandThrows) {
  ExternalProcessBackend backend("missing", {"/nonexistent/detector"}, FastOptions());
  EXPECT_THROW(backend.Start({"img"}), Error);
}

TEST_F(ExternalBackendTest, PersistentServesManyRequests) {
  ExternalOptions o = FastOptions();
  o.persistent = true;
  ExternalProcessBackend backend("fake", {kFake}, o);
  backend.Start({"img"});
  for (int i = 0; i < 5; ++i) {
    const RunOutcome r = backend.Run(Record("img"), png_);
    EXPECT_EQ(r.outcome, Outcome::kOk) << r.message;
  }
  backend.Stop();
}

TEST_F(ExternalBackendTest, PersistentRestartsAfterCrash) {
  ExternalOptions o = FastOptions();
  o.persistent = true;
  ExternalProcessBackend backend("fake", {kFake, "--crash"}, o);
  backend.Start({"img"});
  EXPECT_EQ(backend.Run(Record("img"), png_).outcome, Outcome::kBackendError);
  EXPECT_EQ(backend.Run(Record("img"), png_).outcome, Outcome::kBackendError);
}

TEST_F(ExternalBackendTest, BenchmarkThroughProcess) {
  BenchPlan plan;
  plan.image_dir = dir_.path();
  plan.images = {Record("img")};
  plan.repetitions = 2;
  ExternalProcessBackend backend("fake", {kFake}, FastOptions());
  const auto samples = RunBenchmark(plan, backend);
  ASSERT_EQ(samples.size(), 3u);
  for (const BenchSample& s : samples) {
    EXPECT_EQ(s.outcome, Outcome::kOk) << s.message;
    EXPECT_EQ(s.timing_source, "backend");
    EXPECT_EQ(s.wall_time_s, 0.01);
  }
}

TEST_F(ExternalBackendTest, LosslessTwinGivesIdenticalDetections) {
  const RasterImage img = ReadPngFile(png_);
  const auto twin = RecompressLossless(img, 9);
  const auto orig_bytes = ReadFile(png_);
  WriteFile(dir_ / "twin.png", std::string(twin.begin(), twin.end()));
  ASSERT_NE(orig_bytes, ReadFile(dir_ / "twin.png"));
  ExternalProcessBackend backend("fake", {kFake}, FastOptions());
  const RunOutcome a = backend.Run(Record("img"), png_);
  const RunOutcome b = backend.Run(Record("img"), dir_ / "twin.png");
  ASSERT_EQ(a.outcome, Outcome::kOk);
  ASSERT_EQ(b.outcome, Outcome::kOk);
  EXPECT_EQ(WriteDetections(a.detections, LabelMap::Dota()),
            WriteDetections(b.detections, LabelMap::Dota()));
  // A different image yields different detections.
  WriteNoisePng(dir_ / "other.png", 8, 6);
  const RunOutcome c = backend.Run(Record("img"), dir_ / "other.png");
  EXPECT_NE(WriteDetections(a.detections, LabelMap::Dota()),
            WriteDetections(c.detections, LabelMap::Dota()));
}

std::optional<uint64_t> MemAvailable() {
  std::ifstream in("/proc/meminfo");
  std::string key;
  uint64_t kb = 0;
  std::string unit;
  while (in >> key >> kb >> unit) {
    if (key == "MemAvailable:") return kb * 1024;
  }
  return std::nullopt;
}

TEST_F(ExternalBackendTest, PeakRssTracksAllocation) {
  const auto avail = MemAvailable();
  if (!avail || *avail < (1ull << 30)) GTEST_SKIP() << "not enough free memory";
  const RunOutcome small = RunOnce({"--alloc-mib", "8"});
  const RunOutcome big = RunOnce({"--alloc-mib", "256"});
  ASSERT_EQ(big.outcome, Outcome::kOk);
  ASSERT_TRUE(big.peak_rss.has_value());
  ASSERT_TRUE(small.peak_rss.has_value());
  EXPECT_GE(*big.peak_rss, 256ull << 20);
  EXPECT_GT(*big.peak_rss, *small.peak_rss + (200ull << 20));
}

TEST(MemoryReadingTest, OwnProcess) {
  const auto rss = ReadProcessRss(::getpid());
  ASSERT_TRUE(rss.has_value());
  EXPECT_GT(*rss, 0u);
  const auto hwm = ReadProcessPeakRss(::getpid());
  ASSERT_TRUE(hwm.has_value());
  EXPECT_GE(*hwm, *rss / 2);
  EXPECT_FALSE(ReadProcessRss(-5).has_value());
}

TEST(MemoryReadingTest, SamplerStops) {
  MemorySampler sampler(::getpid(), 5ms);
  std::this_thread::sleep_for(50ms);
  const MemoryReading r = sampler.Stop();
  EXPECT_GT(r.samples, 1u);
  EXPECT_TRUE(r.peak_rss.has_value());
}

}  // namespace
}  // namespace detbench
