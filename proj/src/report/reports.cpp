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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "detbench/error.hpp"
#include "detbench/report.hpp"

namespace detbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string Pad(const std::string& s, size_t width, bool left = false) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return left ? s + fill : fill + s;
}

std::string XmlEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string ManifestComment(const json& manifest) { return "manifest: " + manifest.dump(); }

}  // namespace

IndexStats ComputeIndexStats(const DatasetIndex& index) {
  IndexStats s;
  s.images = index.images.size();
  s.missing_labels = index.missing_labels;
  for (const auto& [id, boxes] : index.annotations) s.instances += boxes.size();
  if (!index.annotations.empty()) {
    s.mean_boxes_per_image =
        static_cast<double>(s.instances) / static_cast<double>(index.annotations.size());
  }
  if (!index.images.empty()) {
    const std::vector<std::string> order = index.ids_by_pixels();
    s.smallest_id = order.front();
    s.smallest_pixels = TotalPixels(*index.find(order.front()));
    s.largest_id = order.back();
    s.largest_pixels = TotalPixels(*index.find(order.back()));
  }
  return s;
}

std::string FormatBenchTable(const std::vector<ImageSummary>& summaries) {
  std::string out = Pad("image", 24, true) + Pad("pixels", 12) + Pad("runs", 6) +
                    Pad("mean_time_s", 13) + Pad("peak_rss_mib", 14) + Pad("swap_mib", 10) + '\n';
  const double mib = 1024.0 * 1024.0;
  for (const ImageSummary& s : summaries) {
    std::string time;
    if (s.oom) {
      time = "X";
    } else if (!s.runnable) {
      time = "ERR";
    } else {
      time = s.mean_time_s ? Fixed(*s.mean_time_s, 4) : "NA";
    }
    const std::string rss = s.mean_peak_rss ? Fixed(*s.mean_peak_rss / mib, 1) : "NA";
    const std::string swap = s.mean_final_swap ? Fixed(*s.mean_final_swap / mib, 1) : "NA";
    out += Pad(s.image_id, 24, true) + Pad(std::to_string(s.total_pixels), 12) +
           Pad(std::to_string(s.ok) + "/" + std::to_string(s.attempted), 6) + Pad(time, 13) +
           Pad(rss, 14) + Pad(swap, 10) + '\n';
  }
  return out;
}

std::string WriteEvalReport(const DatasetEval& eval, const GroundTruthSet& gts,
                            const DetectionSet& dets, const json& manifest) {
  std::ostringstream out;
  out << "# " << ManifestComment(manifest) << "\n";
  out << "mAP (11-point): " << Fixed(eval.map, 4) << "\n";
  out << "COCO AP@[.50:.95]: " << Fixed(eval.coco.ap_ladder, 4)
      << "  AP50: " << Fixed(eval.coco.ap50, 4) << "  AP75: " << Fixed(eval.coco.ap75, 4) << "\n";
  out << "accuracy: " << eval.accuracy.accurate << "/" << eval.accuracy.total << " ("
      << Fixed(100.0 * eval.accuracy.ratio(), 2) << "%)\n";
  out << "totals: tp " << eval.totals.tp << " fp " << eval.totals.fp << " fn " << eval.totals.fn
      << " fn_misclassified " << eval.totals.fn_misclassified << "\n\n";

  out << Pad("class", 20, true) << Pad("gts", 7) << Pad("dets", 7) << Pad("tp", 7) << Pad("fp", 7)
      << Pad("fn", 7) << Pad("ap", 9) << "\n";
  for (const ClassReport& c : eval.classes) {
    out << Pad(c.category, 20, true) << Pad(std::to_string(c.num_gt), 7)
        << Pad(std::to_string(c.num_det), 7) << Pad(std::to_string(c.counts.tp), 7)
        << Pad(std::to_string(c.counts.fp), 7) << Pad(std::to_string(c.counts.fn), 7)
        << Pad(c.ap ? Fixed(*c.ap, 4) : "NA", 9) << "\n";
  }

  out << "\nIoU thresholds:\n";
  for (const auto& [iou, ap] : eval.coco.per_threshold) {
    out << "  " << Fixed(iou, 2) << "  mAP " << Fixed(ap, 4) << "\n";
  }

  static const std::vector<GroundTruthBox> kNoGts;
  static const std::vector<Detection> kNoDets;
  for (const ImageReport& img : eval.images) {
    const auto git = gts.find(img.id);
    const auto dit = dets.find(img.id);
    const auto& g = git == gts.end() ? kNoGts : git->second;
    const auto& d = dit == dets.end() ? kNoDets : dit->second;
    out << "\nimage " << img.id << "  accuracy " << img.accuracy.accurate << "/"
        << img.accuracy.total << "  tp " << img.counts.tp << " fp " << img.counts.fp << " fn "
        << img.counts.fn << "\n";
    for (const MatchedPair& p : img.pairs) {
      out << "  gt " << p.gt << " " << g[p.gt].category << "  det " << p.det << " "
          << d[p.det].category << "  iou " << Fixed(p.iou, 4) << "  conf "
          << Fixed(p.confidence, 4) << "  " << (p.true_positive ? "TP" : "miss") << "\n";
    }
  }
  return out.str();
}

json EvalSummaryJson(const DatasetEval& eval, const json& manifest) {
  json classes = json::array();
  for (const ClassReport& c : eval.classes) {
    classes.push_back({{"category", c.category},
                       {"gts", c.num_gt},
                       {"dets", c.num_det},
                       {"tp", c.counts.tp},
                       {"fp", c.counts.fp},
                       {"fn", c.counts.fn},
                       {"ap", c.ap ? json(*c.ap) : json(nullptr)}});
  }
  json ladder = json::array();
  for (const auto& [iou, ap] : eval.coco.per_threshold) ladder.push_back({{"iou", iou}, {"map", ap}});
  json images = json::array();
  for (const ImageReport& img : eval.images) {
    images.push_back({{"id", img.id},
                      {"accurate", img.accuracy.accurate},
                      {"total", img.accuracy.total},
                      {"accuracy", img.accuracy.ratio()},
                      {"tp", img.counts.tp},
                      {"fp", img.counts.fp},
                      {"fn", img.counts.fn}});
  }
  return {{"manifest", manifest},
          {"map", eval.map},
          {"coco", {{"ap", eval.coco.ap_ladder}, {"ap50", eval.coco.ap50}, {"ap75", eval.coco.ap75},
                    {"per_threshold", ladder}}},
          {"accuracy", {{"accurate", eval.accuracy.accurate}, {"total", eval.accuracy.total}}},
          {"totals", {{"tp", eval.totals.tp}, {"fp", eval.totals.fp}, {"fn", eval.totals.fn},
                      {"fn_misclassified", eval.totals.fn_misclassified}}},
          {"classes", classes},
          {"images", images}};
}

std::string RenderScatterSvg(const std::vector<ScatterSeries>& series, const std::string& title,
                             const json& manifest) {
  const double width = 720, height = 480;
  const double left = 80, right = 170, top = 60, bottom = 60;
  const double plot_w = width - left - right, plot_h = height - top - bottom;

  double max_px = 1, max_t = 0;
  for (const ScatterSeries& s : series) {
    for (const ImageSummary& p : s.points) {
      max_px = std::max(max_px, static_cast<double>(p.total_pixels));
      if (p.mean_time_s) max_t = std::max(max_t, *p.mean_time_s);
    }
  }
  if (max_t <= 0) max_t = 1;
  max_px *= 1.05;
  max_t *= 1.1;
  auto sx = [&](double px) { return left + plot_w * px / max_px; };
  auto sy = [&](double t) { return top + plot_h * (1 - t / max_t); };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<metadata>" << XmlEscape(manifest.dump()) << "</metadata>\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"30\" text-anchor=\"middle\" font-size=\"16\">"
      << XmlEscape(title) << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double px = max_px * i / 4, t = max_t * i / 4;
    out << "<text x=\"" << Fixed(sx(px), 1) << "\" y=\"" << top + plot_h + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << Fixed(px / 1e6, 1) << "M</text>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << Fixed(sy(t) + 4, 1)
        << "\" text-anchor=\"end\" font-size=\"11\">" << Fixed(t, 2) << "</text>\n";
  }
  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15
      << "\" text-anchor=\"middle\" font-size=\"12\">total pixels</text>\n";
  out << "<text x=\"20\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 20 "
      << top + plot_h / 2 << ")\" text-anchor=\"middle\" font-size=\"12\">mean time (s)</text>\n";

  for (size_t i = 0; i < series.size(); ++i) {
    const ScatterSeries& s = series[i];
    out << "<g class=\"series\" fill=\"" << XmlEscape(s.color) << "\">\n";
    for (const ImageSummary& p : s.points) {
      const double x = sx(static_cast<double>(p.total_pixels));
      if (p.oom) {
        out << "  <text class=\"oom\" x=\"" << Fixed(x, 1) << "\" y=\"" << Fixed(top + 12, 1)
            << "\" text-anchor=\"middle\" font-size=\"14\" fill=\"red\">X</text>\n";
      } else if (p.mean_time_s) {
        out << "  <circle cx=\"" << Fixed(x, 1) << "\" cy=\"" << Fixed(sy(*p.mean_time_s), 1)
            << "\" r=\"3\"><title>" << XmlEscape(p.image_id) << "</title></circle>\n";
      }
    }
    out << "</g>\n";
    const double ly = top + 20 + 18.0 * i;
    out << "<circle cx=\"" << width - right + 20 << "\" cy=\"" << ly - 4 << "\" r=\"4\" fill=\""
        << XmlEscape(s.color) << "\"/>\n";
    out << "<text x=\"" << width - right + 30 << "\" y=\"" << ly
        << "\" font-size=\"12\">" << XmlEscape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

// --- compare ---------------------------------------------------------------

namespace {

std::optional<double> Delta(const std::optional<double>& a, const std::optional<double>& b) {
  if (!a || !b) return std::nullopt;
  return *b - *a;
}

std::string OptCell(const std::optional<double>& v) { return v ? FormatDouble(*v) : "NA"; }

}  // namespace

std::optional<double> CompareRow::time_delta() const { return Delta(time_a, time_b); }
std::optional<double> CompareRow::rss_delta() const { return Delta(rss_a, rss_b); }
std::optional<double> CompareRow::accuracy_delta() const { return Delta(accuracy_a, accuracy_b); }

ReportData LoadReportDir(const fs::path& dir) {
  const fs::path summary = dir / "bench_summary.tsv";
  if (!fs::exists(summary)) {
    throw Error(ErrorKind::kIo, "no bench_summary.tsv in " + dir.string());
  }
  ReportData data;
  data.summaries = ParseSummaries(ReadFile(summary));
  const fs::path eval = dir / "eval_summary.json";
  if (fs::exists(eval)) {
    try {
      const json j = json::parse(ReadFile(eval));
      for (const json& img : j.at("images")) {
        data.accuracy[img.at("id").get<std::string>()] = img.at("accuracy").get<double>();
      }
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kIo, "bad eval_summary.json in " + dir.string() + ": " + e.what());
    }
  }
  return data;
}

std::vector<CompareRow> CompareReports(const ReportData& a, const ReportData& b) {
  std::map<std::string, const ImageSummary*> in_b;
  for (const ImageSummary& s : b.summaries) in_b[s.image_id] = &s;
  std::vector<CompareRow> rows;
  for (const ImageSummary& sa : a.summaries) {
    const auto it = in_b.find(sa.image_id);
    if (it == in_b.end()) continue;
    const ImageSummary& sb = *it->second;
    CompareRow r;
    r.image_id = sa.image_id;
    r.pixels_a = sa.total_pixels;
    r.pixels_b = sb.total_pixels;
    r.time_a = sa.mean_time_s;
    r.time_b = sb.mean_time_s;
    r.rss_a = sa.mean_peak_rss;
    r.rss_b = sb.mean_peak_rss;
    r.oom_a = sa.oom;
    r.oom_b = sb.oom;
    if (auto acc = a.accuracy.find(r.image_id); acc != a.accuracy.end()) r.accuracy_a = acc->second;
    if (auto acc = b.accuracy.find(r.image_id); acc != b.accuracy.end()) r.accuracy_b = acc->second;
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw Error(ErrorKind::kInvalidArgument, "reports share no image ids");
  std::sort(rows.begin(), rows.end(),
            [](const CompareRow& x, const CompareRow& y) { return x.image_id < y.image_id; });
  return rows;
}

std::string WriteCompareTable(const std::vector<CompareRow>& rows, const json& manifest) {
  std::string out = "# " + ManifestComment(manifest) + "\n";
  out +=
      "# image_id\tpixels_a\tpixels_b\ttime_a\ttime_b\ttime_delta\trss_a\trss_b\trss_delta\t"
      "accuracy_a\taccuracy_b\taccuracy_delta\toom_a\toom_b\n";
  for (const CompareRow& r : rows) {
    out += r.image_id + '\t' + std::to_string(r.pixels_a) + '\t' + std::to_string(r.pixels_b) +
           '\t' + OptCell(r.time_a) + '\t' + OptCell(r.time_b) + '\t' + OptCell(r.time_delta()) +
           '\t' + OptCell(r.rss_a) + '\t' + OptCell(r.rss_b) + '\t' + OptCell(r.rss_delta()) +
           '\t' + OptCell(r.accuracy_a) + '\t' + OptCell(r.accuracy_b) + '\t' +
           OptCell(r.accuracy_delta()) + '\t' + (r.oom_a ? "1" : "0") + '\t' +
           (r.oom_b ? "1" : "0") + '\n';
  }
  return out;
}

}  // namespace detbench
