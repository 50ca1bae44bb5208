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

#ifndef GCK3D__BOXES_HPP_
#define GCK3D__BOXES_HPP_

#include "gck3d/box2d.hpp"
#include "gck3d/box3d.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <vector>

namespace gck3d
{

/// Modal (visible) and amodal (full extent) boxes of one detection.
struct DetectionPair
{
  Box2D modal{};
  Box2D amodal{};
  std::size_t payload{0};
};

namespace detail
{

struct Vec2
{
  double x;
  double y;
};

inline double cross(const Vec2 & o, const Vec2 & a, const Vec2 & b)
{
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline double polygon_area(const std::vector<Vec2> & poly)
{
  double a = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Vec2 & p = poly[i];
    const Vec2 & q = poly[(i + 1) % n];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

/// Sutherland-Hodgman clip of `subject` against the convex CCW polygon `clip`.
inline std::vector<Vec2> clip_convex(std::vector<Vec2> subject, const std::vector<Vec2> & clip)
{
  constexpr double kEps = 1e-12;
  for (std::size_t e = 0, n = clip.size(); e < n && !subject.empty(); ++e) {
    const Vec2 & a = clip[e];
    const Vec2 & b = clip[(e + 1) % n];
    std::vector<Vec2> out;
    out.reserve(subject.size() + 1);
    for (std::size_t i = 0, m = subject.size(); i < m; ++i) {
      const Vec2 & p = subject[i];
      const Vec2 & q = subject[(i + 1) % m];
      const double dp = cross(a, b, p);
      const double dq = cross(a, b, q);
      const bool p_in = dp >= -kEps;
      const bool q_in = dq >= -kEps;
      if (p_in) {
        out.push_back(p);
      }
      if (p_in != q_in) {
        const double t = dp / (dp - dq);
        out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      }
    }
    subject = std::move(out);
  }
  return subject;
}

/// Counter-clockwise footprint in (x, z) of the yaw-only reduction of `b`.
inline std::vector<Vec2> footprint(const Box3D & b)
{
  const Point3 c = b.center();
  const double cy = std::cos(b.angles.yaw);
  const double sy = std::sin(b.angles.yaw);
  constexpr std::array<std::array<double, 2>, 4> kSigns{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};
  std::vector<Vec2> out;
  for (const auto & s : kSigns) {
    const double lx = s[0] * b.dims.width / 2.0;
    const double lz = s[1] * b.dims.length / 2.0;
    out.push_back({c.x() + cy * lx + sy * lz, c.z() - sy * lx + cy * lz});
  }
  if (polygon_area(out) < 0.0) {
    std::reverse(out.begin(), out.end());
  }
  return out;
}

}  // namespace detail

/// Bird's-eye-view overlap area of the yaw-only footprints.
inline double bev_intersection_area(const Box3D & a, const Box3D & b)
{
  const auto poly = detail::clip_convex(detail::footprint(a), detail::footprint(b));
  if (poly.size() < 3) {
    return 0.0;
  }
  return std::max(0.0, detail::polygon_area(poly));
}

/**
 * 3D IoU after reducing both boxes to yaw only about their centers, as the
 * KITTI benchmark does: footprint overlap times vertical interval overlap.
 */
inline double iou3d(const Box3D & a, const Box3D & b)
{
  const double ya = a.center().y();
  const double yb = b.center().y();
  const double top = std::max(ya - a.dims.height / 2.0, yb - b.dims.height / 2.0);
  const double bottom = std::min(ya + a.dims.height / 2.0, yb + b.dims.height / 2.0);
  const double dy = bottom - top;
  if (dy <= 0.0) {
    return 0.0;
  }
  const double inter = bev_intersection_area(a, b) * dy;
  const double uni = a.volume() + b.volume() - inter;
  if (!(uni > 0.0)) {
    return 0.0;
  }
  return std::clamp(inter / uni, 0.0, 1.0);
}

/// Indices ordered by descending score; equal scores keep the lower index first.
template <typename ScoreFn>
std::vector<std::size_t> score_order(std::size_t n, ScoreFn && score)
{
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return score(i) > score(j);
  });
  return order;
}

/// Greedy suppression. Returns kept indices in descending-score order.
inline std::vector<std::size_t> nms(const std::vector<Box2D> & dets, double iou_threshold)
{
  std::vector<std::size_t> kept;
  for (const std::size_t i : score_order(dets.size(), [&](std::size_t k) { return dets[k].score; })) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return iou2d(dets[i], dets[k]) > iou_threshold;
    });
    if (!suppressed) {
      kept.push_back(i);
    }
  }
  return kept;
}

/// Suppression decided on the modal boxes; the caller lifts the survivors' amodal boxes.
inline std::vector<std::size_t> vg_nms(const std::vector<DetectionPair> & pairs, double iou_threshold)
{
  std::vector<Box2D> modal;
  modal.reserve(pairs.size());
  for (const auto & p : pairs) {
    modal.push_back(p.modal);
  }
  return nms(modal, iou_threshold);
}

inline std::vector<Box2D> gather_amodal(
  const std::vector<DetectionPair> & pairs, const std::vector<std::size_t> & kept)
{
  std::vector<Box2D> out;
  out.reserve(kept.size());
  for (const std::size_t k : kept) {
    out.push_back(pairs[k].amodal);
  }
  return out;
}

}  // namespace gck3d

#endif  // GCK3D__BOXES_HPP_
