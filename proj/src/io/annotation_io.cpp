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

#include "detbench/annotation_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "detbench/error.hpp"
#include "detbench/png_codec.hpp"

namespace detbench {

namespace {

std::vector<std::string_view> SplitWhitespace(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

bool ParseReal(std::string_view token, double* out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, *out);
  return ec == std::errc() && ptr == last;
}

bool ParseInt(std::string_view token, int* out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), *out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

bool IsHeaderLine(const std::vector<std::string_view>& tokens) {
  return tokens.size() == 1 && tokens[0].find(':') != std::string_view::npos;
}

std::string LineError(size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

// ---------------------------------------------------------------------------
// LabelMap

LabelMap::LabelMap(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.id < b.id; });
  std::set<std::string> names;
  for (size_t i = 0; i < entries_.size(); ++i) {
    const Entry& e = entries_[i];
    if (i > 0 && entries_[i - 1].id == e.id) {
      throw Error(ErrorKind::kLabelMap, "duplicate id " + std::to_string(e.id));
    }
    if (e.id != static_cast<int>(i) + 1) {
      throw Error(ErrorKind::kLabelMap,
                  "ids must be contiguous from 1; found " + std::to_string(e.id) +
                      " at position " + std::to_string(i + 1));
    }
    if (e.name.empty()) throw Error(ErrorKind::kLabelMap, "empty class name");
    if (!names.insert(e.name).second) {
      throw Error(ErrorKind::kLabelMap, "duplicate name '" + e.name + "'");
    }
  }
}

LabelMap LabelMap::Dota() {
  static const char* const kNames[] = {
      "plane",           "ship",         "storage-tank",       "baseball-diamond",
      "tennis-court",    "basketball-court", "ground-track-field", "harbor",
      "bridge",          "large-vehicle", "small-vehicle",     "helicopter",
      "roundabout",      "soccer-ball-field", "swimming-pool"};
  std::vector<Entry> entries;
  int id = 1;
  for (const char* name : kNames) entries.push_back({id++, name});
  return LabelMap(std::move(entries));
}

bool LabelMap::contains(std::string_view name) const { return id_of(name).has_value(); }

std::optional<int> LabelMap::id_of(std::string_view name) const {
  for (const Entry& e : entries_) {
    if (e.name == name) return e.id;
  }
  return std::nullopt;
}

const std::string& LabelMap::name_of(int id) const {
  if (id < 1 || id > static_cast<int>(entries_.size())) {
    throw Error(ErrorKind::kLabelMap, "no class with id " + std::to_string(id));
  }
  return entries_[id - 1].name;
}

LabelMap LoadLabelMap(std::string_view text) {
  std::vector<LabelMap::Entry> entries;
  const std::string s(text);
  if (s.find('{') != std::string::npos) {
    static const std::regex kItem(R"(item\s*\{([^}]*)\})");
    static const std::regex kId(R"(\bid\s*:\s*(-?\d+))");
    static const std::regex kName(R"(\bname\s*:\s*['"]([^'"]*)['"])");
    for (auto it = std::sregex_iterator(s.begin(), s.end(), kItem); it != std::sregex_iterator();
         ++it) {
      const std::string body = (*it)[1].str();
      std::smatch id_match;
      std::smatch name_match;
      if (!std::regex_search(body, id_match, kId) || !std::regex_search(body, name_match, kName)) {
        throw Error(ErrorKind::kLabelMap, "item block without id or name");
      }
      entries.push_back({std::stoi(id_match[1].str()), name_match[1].str()});
    }
  } else {
    size_t lineno = 0;
    for (std::string_view line : SplitLines(text)) {
      ++lineno;
      auto tokens = SplitWhitespace(line);
      if (tokens.empty() || tokens[0].front() == '#') continue;
      int id = 0;
      if (tokens.size() != 2 || !ParseInt(tokens[0], &id)) {
        throw Error(ErrorKind::kLabelMap, LineError(lineno, "expected 'id name'"));
      }
      entries.push_back({id, std::string(tokens[1])});
    }
  }
  if (entries.empty()) throw Error(ErrorKind::kLabelMap, "label map has no entries");
  return LabelMap(std::move(entries));
}

// ---------------------------------------------------------------------------
// Ground truth

GroundTruthParse ParseGroundTruthLenient(std::string_view text, const LabelMap& labels) {
  GroundTruthParse result;
  size_t lineno = 0;
  for (std::string_view line : SplitLines(text)) {
    ++lineno;
    const auto tokens = SplitWhitespace(line);
    if (tokens.empty()) {
      ++result.blank_lines;
      continue;
    }
    if (IsHeaderLine(tokens)) {
      ++result.header_lines;
      continue;
    }
    if (tokens.size() != 10) {
      result.issues.push_back(
          {lineno, LineError(lineno, "expected 10 fields, got " + std::to_string(tokens.size()))});
      continue;
    }
    GroundTruthBox box;
    bool ok = true;
    for (int k = 0; k < 4 && ok; ++k) {
      ok = ParseReal(tokens[2 * k], &box.quad[k].x) && ParseReal(tokens[2 * k + 1], &box.quad[k].y) &&
           std::isfinite(box.quad[k].x) && std::isfinite(box.quad[k].y);
    }
    if (!ok) {
      result.issues.push_back({lineno, LineError(lineno, "bad coordinate")});
      continue;
    }
    box.category = std::string(tokens[8]);
    if (!labels.contains(box.category)) {
      result.issues.push_back(
          {lineno, LineError(lineno, "unknown category '" + box.category + "'")});
      continue;
    }
    if (tokens[9] == "0") {
      box.difficult = false;
    } else if (tokens[9] == "1") {
      box.difficult = true;
    } else {
      result.issues.push_back(
          {lineno, LineError(lineno, "difficulty must be 0 or 1, got '" + std::string(tokens[9]) + "'")});
      continue;
    }
    box.hbb = HbbFromQuad(box.quad);
    result.boxes.push_back(std::move(box));
  }
  return result;
}

std::vector<GroundTruthBox> ParseGroundTruth(std::string_view text, const LabelMap& labels) {
  GroundTruthParse parsed = ParseGroundTruthLenient(text, labels);
  if (!parsed.issues.empty()) {
    const AnnotationIssue& first = parsed.issues.front();
    const bool unknown = first.message.find("unknown category") != std::string::npos;
    throw Error(unknown ? ErrorKind::kUnknownCategory : ErrorKind::kMalformedAnnotation,
                first.message);
  }
  return std::move(parsed.boxes);
}

std::string WriteGroundTruth(const std::vector<GroundTruthBox>& boxes) {
  std::string out;
  for (const GroundTruthBox& b : boxes) {
    for (const Point& p : b.quad) {
      out += FormatDouble(p.x);
      out += ' ';
      out += FormatDouble(p.y);
      out += ' ';
    }
    out += b.category;
    out += b.difficult ? " 1\n" : " 0\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Detections

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error(ErrorKind::kInvalidArgument, "unformattable number");
  return std::string(buf, ptr);
}

std::string WriteDetections(const std::vector<Detection>& dets, const LabelMap& labels) {
  std::string out;
  for (const Detection& d : dets) {
    if (!labels.contains(d.category)) {
      throw Error(ErrorKind::kUnknownCategory, "unknown category '" + d.category + "'");
    }
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
      throw Error(ErrorKind::kInvalidArgument, "confidence outside [0,1]");
    }
    if (!d.hbb.valid()) throw Error(ErrorKind::kInvalidArgument, "invalid detection box");
    out += d.category;
    for (double v : {d.confidence, d.hbb.xmin, d.hbb.ymin, d.hbb.xmax, d.hbb.ymax}) {
      out += ' ';
      out += FormatDouble(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<Detection> ParseDetections(std::string_view text) {
  std::vector<Detection> out;
  size_t lineno = 0;
  for (std::string_view line : SplitLines(text)) {
    ++lineno;
    const auto tokens = SplitWhitespace(line);
    if (tokens.empty() || tokens[0].front() == '#') continue;
    if (tokens.size() != 6) {
      throw Error(ErrorKind::kMalformedAnnotation,
                  LineError(lineno, "expected 6 fields, got " + std::to_string(tokens.size())));
    }
    Detection d;
    d.category = std::string(tokens[0]);
    double v[5];
    for (int k = 0; k < 5; ++k) {
      if (!ParseReal(tokens[k + 1], &v[k]) || !std::isfinite(v[k])) {
        throw Error(ErrorKind::kMalformedAnnotation, LineError(lineno, "bad number"));
      }
    }
    if (!(v[0] >= 0.0 && v[0] <= 1.0)) {
      throw Error(ErrorKind::kMalformedAnnotation, LineError(lineno, "confidence outside [0,1]"));
    }
    if (v[3] < v[1] || v[4] < v[2]) {
      throw Error(ErrorKind::kMalformedAnnotation, LineError(lineno, "xmax<xmin or ymax<ymin"));
    }
    d.confidence = v[0];
    d.hbb = Hbb{v[1], v[2], v[3], v[4]};
    out.push_back(std::move(d));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dataset

const ImageRecord* DatasetIndex::find(std::string_view id) const {
  for (const ImageRecord& rec : images) {
    if (rec.id == id) return &rec;
  }
  return nullptr;
}

std::vector<std::string> DatasetIndex::ids_by_pixels() const {
  std::vector<const ImageRecord*> sorted;
  for (const ImageRecord& rec : images) sorted.push_back(&rec);
  std::sort(sorted.begin(), sorted.end(), [](const ImageRecord* a, const ImageRecord* b) {
    const int64_t pa = TotalPixels(*a);
    const int64_t pb = TotalPixels(*b);
    if (pa != pb) return pa < pb;
    return a->id < b->id;
  });
  std::vector<std::string> ids;
  for (const ImageRecord* rec : sorted) ids.push_back(rec->id);
  return ids;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::filesystem::path& path, std::string_view data) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorKind::kIo, "cannot create " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorKind::kIo, "short write to " + path.string());
}

DatasetIndex LoadDataset(const std::filesystem::path& root, const LabelMap& labels) {
  namespace fs = std::filesystem;
  const fs::path image_dir = root / "images";
  const fs::path label_dir = root / "labelTxt";
  if (!fs::is_directory(image_dir)) {
    throw Error(ErrorKind::kIo, "no images/ directory under " + root.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(image_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  DatasetIndex index;
  for (const fs::path& file : files) {
    const PngInfo info = ProbePngFile(file);
    ImageRecord rec;
    rec.id = file.stem().string();
    rec.width = info.width;
    rec.height = info.height;
    rec.bit_depth = 8 * info.channels;
    rec.file_size = fs::file_size(file);
    const fs::path label = label_dir / (rec.id + ".txt");
    if (fs::exists(label)) {
      index.annotations[rec.id] = ParseGroundTruth(ReadFile(label), labels);
    } else {
      index.missing_labels.push_back(rec.id);
    }
    index.images.push_back(std::move(rec));
  }
  return index;
}

}  // namespace detbench
