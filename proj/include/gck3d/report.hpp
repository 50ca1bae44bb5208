// Copyright 2026 The gck3d Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GCK3D__REPORT_HPP_
#define GCK3D__REPORT_HPP_

#include "gck3d/io.hpp"
#include "gck3d/metrics.hpp"

#include <cstdio>
#include <optional>
#include <string>

namespace gck3d::report
{

using io::Json;

namespace detail
{

inline Json opt(const std::optional<double> & v) { return v ? Json(*v) : Json(nullptr); }

inline std::string percent(const std::optional<double> & v)
{
  if (!v) {
    return "-";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * *v);
  return buf;
}

inline std::string pad(const std::string & s, std::size_t width, bool right = true)
{
  if (s.size() >= width) {
    return s;
  }
  const std::string fill(width - s.size(), ' ');
  return right ? fill + s : s + fill;
}

inline const DifficultyResult * find(const ClassResult & c, Difficulty d)
{
  for (const auto & r : c.difficulties) {
    if (r.difficulty == d) {
      return &r;
    }
  }
  return nullptr;
}

}  // namespace detail

/// Absent metrics (no ground truth) are written as null.
inline Json to_json(const EvalReport & report)
{
  Json j;
  j["frames"] = report.frames;
  Json classes = Json::array();
  for (const auto & c : report.classes) {
    Json cj;
    cj["class"] = c.class_id;
    cj["iou_min"] = c.iou_min;
    Json diffs = Json::array();
    for (const auto & d : c.difficulties) {
      Json dj;
      dj["difficulty"] = to_string(d.difficulty);
      dj["ap3d"] = detail::opt(d.ap3d);
      dj["aos"] = detail::opt(d.aos);
      Json cd = Json::array();
      for (const auto & r : d.cd_ap) {
        cd.push_back({{"threshold", r.threshold}, {"ap", detail::opt(r.ap)}});
      }
      dj["cd_ap"] = cd;
      dj["cd_ap_mean"] = detail::opt(d.cd_mean);
      dj["num_gt"] = d.num_gt;
      dj["tp"] = d.tp;
      dj["fp"] = d.fp;
      dj["fn"] = d.fn;
      diffs.push_back(dj);
    }
    cj["difficulties"] = diffs;
    classes.push_back(cj);
  }
  j["classes"] = classes;
  return j;
}

/// Easy / Moderate / Hard columns of 3D AP and AOS in percent, then center-distance AP.
inline std::string text_table(const EvalReport & report)
{
  using detail::pad;
  using detail::percent;
  constexpr std::array<Difficulty, 3> kCols{Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard};
  std::string out;
  out += pad("Class", 12, false) + pad("IoU", 6);
  for (const auto d : kCols) {
    out += " | " + pad(to_string(d), 17, false);
  }
  out += "\n" + std::string(12 + 6, ' ');
  for (std::size_t i = 0; i < kCols.size(); ++i) {
    out += " | " + pad("AP", 8) + " " + pad("AOS", 8);
  }
  out += "\n" + std::string(18 + 3 * 20, '-') + "\n";
  for (const auto & c : report.classes) {
    char iou[16];
    std::snprintf(iou, sizeof(iou), "%.2f", c.iou_min);
    out += pad(c.class_id, 12, false) + pad(iou, 6);
    for (const auto d : kCols) {
      const DifficultyResult * r = detail::find(c, d);
      out += " | " + pad(percent(r ? r->ap3d : std::nullopt), 8) + " " +
             pad(percent(r ? r->aos : std::nullopt), 8);
    }
    out += "\n";
  }
  out += "\nCenter-distance AP (mean over thresholds)\n";
  for (const auto & c : report.classes) {
    out += pad(c.class_id, 12, false) + pad("", 6);
    for (const auto d : kCols) {
      const DifficultyResult * r = detail::find(c, d);
      out += " | " + pad(percent(r ? r->cd_mean : std::nullopt), 17);
    }
    out += "\n";
  }
  return out;
}

/// One row per class, difficulty and recall-grid point.
inline std::string pr_csv(const EvalReport & report)
{
  std::string out = "class,difficulty,index,recall,precision,similarity\n";
  for (const auto & c : report.classes) {
    for (const auto & d : c.difficulties) {
      if (!d.ap3d) {
        continue;
      }
      for (std::size_t k = 0; k < kRecallPoints; ++k) {
        out += c.class_id + "," + to_string(d.difficulty) + "," + std::to_string(k) + "," +
               io::format_double(d.curve.recall[k]) + "," + io::format_double(d.curve.precision[k]) +
               "," + io::format_double(d.curve.similarity[k]) + "\n";
      }
    }
  }
  return out;
}

}  // namespace gck3d::report

#endif  // GCK3D__REPORT_HPP_
