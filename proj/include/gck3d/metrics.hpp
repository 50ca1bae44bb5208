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

/**
 * @file metrics.hpp
 *
 * KITTI-style 3D average precision over 40 recall points, Average Orientation
 * Similarity and nuScenes-style center-distance AP.
 *
 *   AP       = 1/40 * sum_{r in grid} p_interp(r)
 *   p_interp = max_{r' >= r} p(r')            (0 when no operating point reaches r)
 *   s(r)     = 1/|D(r)| * sum_{i in D(r)} (1 + cos dtheta_i) / 2 * delta_i
 *
 * Operating points are score thresholds: detections with equal scores enter
 * the ranked list together, which makes AP invariant to monotone rescaling of
 * scores.
 */

#ifndef GCK3D__METRICS_HPP_
#define GCK3D__METRICS_HPP_

#include "gck3d/box3d.hpp"
#include "gck3d/boxes.hpp"
#include "gck3d/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gck3d
{

enum class Difficulty { Easy, Moderate, Hard, ModerateHardCombined };

inline std::string to_string(Difficulty d)
{
  switch (d) {
    case Difficulty::Easy: return "Easy";
    case Difficulty::Moderate: return "Moderate";
    case Difficulty::Hard: return "Hard";
    case Difficulty::ModerateHardCombined: return "ModerateHard";
  }
  return "Unknown";
}

struct DifficultyThresholds
{
  double min_height{0.0};
  int max_occlusion{0};
  double max_truncation{0.0};
};

/// KITTI object benchmark defaults.
struct DifficultyProfiles
{
  DifficultyThresholds easy{40.0, 0, 0.15};
  DifficultyThresholds moderate{25.0, 1, 0.30};
  DifficultyThresholds hard{25.0, 2, 0.50};
};

struct GtBox
{
  Box3D box{};
  double bbox_height{0.0};
  int occlusion{0};
  double truncation{0.0};

  bool attributes_valid() const
  {
    return bbox_height >= 0.0 && occlusion >= 0 && occlusion <= 3 && truncation >= 0.0 &&
           truncation <= 1.0;
  }
};

inline bool passes(const GtBox & gt, const DifficultyThresholds & t)
{
  return gt.bbox_height >= t.min_height && gt.occlusion <= t.max_occlusion &&
         gt.truncation <= t.max_truncation;
}

inline bool included(const GtBox & gt, Difficulty d, const DifficultyProfiles & p)
{
  switch (d) {
    case Difficulty::Easy: return passes(gt, p.easy);
    case Difficulty::Moderate: return passes(gt, p.moderate);
    case Difficulty::Hard: return passes(gt, p.hard);
    case Difficulty::ModerateHardCombined: return passes(gt, p.moderate) || passes(gt, p.hard);
  }
  return false;
}

inline std::vector<bool> difficulty_filter(
  const std::vector<GtBox> & gts, Difficulty d, const DifficultyProfiles & p = {})
{
  std::vector<bool> out;
  out.reserve(gts.size());
  for (const auto & g : gts) {
    out.push_back(included(g, d, p));
  }
  return out;
}

enum class MatchOutcome { TruePositive, FalsePositive, Ignored };

struct DetectionMatch
{
  std::size_t detection{0};
  double score{0.0};
  MatchOutcome outcome{MatchOutcome::FalsePositive};
  std::optional<std::size_t> gt{};
  double yaw_error{0.0};
};

struct Assignment
{
  /// In descending-score order.
  std::vector<DetectionMatch> matches;
  std::size_t num_gt{0};
  std::size_t true_positives{0};
  std::size_t false_positives{0};
  std::size_t false_negatives{0};
};

/**
 * Greedy one-to-one assignment. Detections are visited by descending score;
 * each takes the untaken GT with the best affinity among those that
 * `accept`, excluded GTs included. Taking an excluded GT, or only hitting
 * excluded GTs that are already taken, makes the detection ignored.
 * `better(a, b)` orders affinities.
 */
inline Assignment greedy_assign(
  const std::vector<Box3D> & dets, const std::vector<GtBox> & gts, const std::vector<bool> & include,
  const std::function<double(const Box3D &, const Box3D &)> & affinity,
  const std::function<bool(double)> & accept, const std::function<bool(double, double)> & better)
{
  Assignment out;
  std::vector<bool> taken(gts.size(), false);
  const auto counted = [&](std::size_t g) { return include.empty() || include[g]; };
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (counted(g)) {
      ++out.num_gt;
    }
  }
  for (const std::size_t d : score_order(dets.size(), [&](std::size_t k) { return dets[k].score; })) {
    DetectionMatch m;
    m.detection = d;
    m.score = dets[d].score;
    std::optional<std::size_t> best;
    double best_aff = 0.0;
    bool hits_excluded = false;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double aff = affinity(dets[d], gts[g].box);
      if (!accept(aff)) {
        continue;
      }
      if (!counted(g)) {
        hits_excluded = true;
      }
      if (taken[g]) {
        continue;
      }
      if (!best || better(aff, best_aff)) {
        best = g;
        best_aff = aff;
      }
    }
    if (best) {
      taken[*best] = true;
    }
    if (best && counted(*best)) {
      m.outcome = MatchOutcome::TruePositive;
      m.gt = best;
      m.yaw_error = angle_diff(dets[d].angles.yaw, gts[*best].box.angles.yaw);
      ++out.true_positives;
    } else if (best || hits_excluded) {
      m.outcome = MatchOutcome::Ignored;
      m.gt = best;
    } else {
      ++out.false_positives;
    }
    out.matches.push_back(m);
  }
  out.false_negatives = out.num_gt - out.true_positives;
  return out;
}

/// IoU-based assignment; iou_min defaults to 0.7 for cars.
inline Assignment match_3d(
  const std::vector<Box3D> & dets, const std::vector<GtBox> & gts, double iou_min = 0.7,
  const std::vector<bool> & include = {})
{
  return greedy_assign(
    dets, gts, include, [](const Box3D & a, const Box3D & b) { return iou3d(a, b); },
    [iou_min](double iou) { return iou >= iou_min; }, [](double a, double b) { return a > b; });
}

/// Planar distance between box centers on the (x, z) ground plane.
inline double center_distance(const Box3D & a, const Box3D & b)
{
  const Point3 ca = a.center();
  const Point3 cb = b.center();
  return std::hypot(ca.x() - cb.x(), ca.z() - cb.z());
}

/// Center-distance assignment, boundary inclusive.
inline Assignment match_center_distance(
  const std::vector<Box3D> & dets, const std::vector<GtBox> & gts, double threshold,
  const std::vector<bool> & include = {})
{
  return greedy_assign(
    dets, gts, include, center_distance, [threshold](double d) { return d <= threshold; },
    [](double a, double b) { return a < b; });
}

struct RankedDetection
{
  double score{0.0};
  bool true_positive{false};
  double yaw_error{0.0};
};

/// Drop ignored detections, keep the rest in descending-score order.
inline std::vector<RankedDetection> ranked(const Assignment & a)
{
  std::vector<RankedDetection> out;
  for (const auto & m : a.matches) {
    if (m.outcome != MatchOutcome::Ignored) {
      out.push_back({m.score, m.outcome == MatchOutcome::TruePositive, m.yaw_error});
    }
  }
  return out;
}

/// Inclusive grid {0, 1/39, ..., 1}; the deployed benchmark uses {1/40, ..., 1}.
enum class RecallGrid { Inclusive, Deployed };

constexpr std::size_t kRecallPoints = 40;

inline std::array<double, kRecallPoints> recall_grid(RecallGrid g)
{
  std::array<double, kRecallPoints> r{};
  for (std::size_t k = 0; k < kRecallPoints; ++k) {
    r[k] = g == RecallGrid::Inclusive ? static_cast<double>(k) / 39.0
                                         : static_cast<double>(k + 1) / 40.0;
  }
  return r;
}

struct OperatingPoint
{
  double score{0.0};
  double recall{0.0};
  double precision{0.0};
  double similarity{0.0};
  std::size_t tp{0};
  std::size_t fp{0};
};

struct PrCurve
{
  std::array<double, kRecallPoints> recall{};
  std::array<double, kRecallPoints> precision{};
  std::array<double, kRecallPoints> similarity{};
  std::vector<OperatingPoint> raw;
};

/**
 * Interpolated precision and orientation similarity over the recall grid.
 * `dets` may be in any order; it is stably sorted by descending score.
 */
inline PrCurve build_curve(
  std::vector<RankedDetection> dets, std::size_t num_gt, RecallGrid grid = RecallGrid::Inclusive)
{
  std::stable_sort(dets.begin(), dets.end(), [](const RankedDetection & a, const RankedDetection & b) {
    return a.score > b.score;
  });
  PrCurve curve;
  curve.recall = recall_grid(grid);
  std::size_t tp = 0;
  std::size_t fp = 0;
  double sim = 0.0;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (dets[i].true_positive) {
      ++tp;
      sim += (1.0 + std::cos(dets[i].yaw_error)) / 2.0;
    } else {
      ++fp;
    }
    const bool group_end = i + 1 == dets.size() || dets[i + 1].score != dets[i].score;
    if (!group_end) {
      continue;
    }
    OperatingPoint op;
    op.score = dets[i].score;
    op.tp = tp;
    op.fp = fp;
    op.recall = num_gt == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(num_gt);
    op.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    op.similarity = sim / static_cast<double>(tp + fp);
    curve.raw.push_back(op);
  }
  for (std::size_t k = 0; k < kRecallPoints; ++k) {
    double p = 0.0;
    double s = 0.0;
    for (const auto & op : curve.raw) {
      if (op.recall >= curve.recall[k]) {
        p = std::max(p, op.precision);
        s = std::max(s, op.similarity);
      }
    }
    curve.precision[k] = p;
    curve.similarity[k] = s;
  }
  return curve;
}

inline double mean40(const std::array<double, kRecallPoints> & v)
{
  double sum = 0.0;
  for (const double x : v) {
    sum += x;
  }
  return sum / static_cast<double>(kRecallPoints);
}

/// Empty when there is no ground truth to recall.
inline std::optional<double> ap40(
  const std::vector<RankedDetection> & dets, std::size_t num_gt,
  RecallGrid grid = RecallGrid::Inclusive)
{
  if (num_gt == 0) {
    return std::nullopt;
  }
  return mean40(build_curve(dets, num_gt, grid).precision);
}

inline std::optional<double> aos(
  const std::vector<RankedDetection> & dets, std::size_t num_gt,
  RecallGrid grid = RecallGrid::Inclusive)
{
  if (num_gt == 0) {
    return std::nullopt;
  }
  return mean40(build_curve(dets, num_gt, grid).similarity);
}

/// Detections and ground truth of one image.
struct FrameData
{
  std::string name;
  std::vector<Box3D> detections;
  std::vector<GtBox> ground_truth;
};

struct EvalConfig
{
  std::vector<std::string> classes{"Car"};
  std::map<std::string, double> iou_min{{"Car", 0.7}};
  double default_iou_min{0.5};
  std::vector<double> cd_thresholds{0.5, 1.0, 2.0, 4.0};
  std::vector<Difficulty> difficulties{Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard};
  DifficultyProfiles profiles{};
  RecallGrid grid{RecallGrid::Inclusive};
  unsigned jobs{1};

  double iou_threshold(const std::string & cls) const
  {
    const auto it = iou_min.find(cls);
    return it == iou_min.end() ? default_iou_min : it->second;
  }
};

struct CdResult
{
  double threshold{0.0};
  std::optional<double> ap;
};

struct DifficultyResult
{
  Difficulty difficulty{Difficulty::Moderate};
  std::optional<double> ap3d;
  std::optional<double> aos;
  std::vector<CdResult> cd_ap;
  std::optional<double> cd_mean;
  std::size_t num_gt{0};
  std::size_t tp{0};
  std::size_t fp{0};
  std::size_t fn{0};
  PrCurve curve{};
};

struct ClassResult
{
  std::string class_id;
  double iou_min{0.7};
  std::vector<DifficultyResult> difficulties;
};

struct EvalReport
{
  std::vector<ClassResult> classes;
  std::size_t frames{0};
};

/// Mean of the present entries; empty when every entry is absent.
inline std::optional<double> mean_present(const std::vector<CdResult> & v)
{
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto & r : v) {
    if (r.ap) {
      sum += *r.ap;
      ++n;
    }
  }
  if (n == 0) {
    return std::nullopt;
  }
  return sum / static_cast<double>(n);
}

/**
 * Full evaluation. Frames are matched in parallel; ranked lists are
 * concatenated in frame order, so the result does not depend on `jobs`.
 */
inline EvalReport evaluate(const std::vector<FrameData> & frames, const EvalConfig & cfg)
{
  struct Partial
  {
    std::vector<RankedDetection> iou;
    std::vector<std::vector<RankedDetection>> cd;
    std::size_t num_gt{0};
    std::size_t tp{0};
    std::size_t fp{0};
    std::size_t fn{0};
  };
  const std::size_t n_cls = cfg.classes.size();
  const std::size_t n_diff = cfg.difficulties.size();
  const std::size_t slots = n_cls * n_diff;
  std::vector<std::vector<Partial>> per_frame(frames.size(), std::vector<Partial>(slots));

  parallel_for(frames.size(), cfg.jobs, [&](std::size_t f) {
    const FrameData & frame = frames[f];
    for (std::size_t c = 0; c < n_cls; ++c) {
      const std::string & cls = cfg.classes[c];
      std::vector<Box3D> dets;
      std::vector<GtBox> gts;
      for (const auto & d : frame.detections) {
        if (d.class_id == cls) {
          dets.push_back(d);
        }
      }
      for (const auto & g : frame.ground_truth) {
        if (g.box.class_id == cls) {
          gts.push_back(g);
        }
      }
      for (std::size_t k = 0; k < n_diff; ++k) {
        const auto include = difficulty_filter(gts, cfg.difficulties[k], cfg.profiles);
        Partial & part = per_frame[f][c * n_diff + k];
        const Assignment a = match_3d(dets, gts, cfg.iou_threshold(cls), include);
        part.iou = ranked(a);
        part.num_gt = a.num_gt;
        part.tp = a.true_positives;
        part.fp = a.false_positives;
        part.fn = a.false_negatives;
        for (const double t : cfg.cd_thresholds) {
          part.cd.push_back(ranked(match_center_distance(dets, gts, t, include)));
        }
      }
    }
  });

  EvalReport report;
  report.frames = frames.size();
  for (std::size_t c = 0; c < n_cls; ++c) {
    ClassResult cr;
    cr.class_id = cfg.classes[c];
    cr.iou_min = cfg.iou_threshold(cr.class_id);
    for (std::size_t k = 0; k < n_diff; ++k) {
      DifficultyResult dr;
      dr.difficulty = cfg.difficulties[k];
      std::vector<RankedDetection> all;
      std::vector<std::vector<RankedDetection>> cd_all(cfg.cd_thresholds.size());
      for (const auto & frame_parts : per_frame) {
        const Partial & p = frame_parts[c * n_diff + k];
        all.insert(all.end(), p.iou.begin(), p.iou.end());
        for (std::size_t t = 0; t < cfg.cd_thresholds.size(); ++t) {
          cd_all[t].insert(cd_all[t].end(), p.cd[t].begin(), p.cd[t].end());
        }
        dr.num_gt += p.num_gt;
        dr.tp += p.tp;
        dr.fp += p.fp;
        dr.fn += p.fn;
      }
      dr.curve = build_curve(all, dr.num_gt, cfg.grid);
      if (dr.num_gt > 0) {
        dr.ap3d = mean40(dr.curve.precision);
        dr.aos = mean40(dr.curve.similarity);
      }
      for (std::size_t t = 0; t < cfg.cd_thresholds.size(); ++t) {
        dr.cd_ap.push_back({cfg.cd_thresholds[t], ap40(cd_all[t], dr.num_gt, cfg.grid)});
      }
      dr.cd_mean = mean_present(dr.cd_ap);
      cr.difficulties.push_back(std::move(dr));
    }
    report.classes.push_back(std::move(cr));
  }
  return report;
}

}  // namespace gck3d

#endif  // GCK3D__METRICS_HPP_
