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

#ifndef GCK3D__BOX2D_HPP_
#define GCK3D__BOX2D_HPP_

#include <algorithm>
#include <cmath>

namespace gck3d
{

/// Axis-aligned image box in pixels.
struct Box2D
{
  double x_min{0.0};
  double y_min{0.0};
  double x_max{0.0};
  double y_max{0.0};
  double score{0.0};

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return std::max(0.0, width()) * std::max(0.0, height()); }

  bool valid() const
  {
    return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
           std::isfinite(y_max) && x_min <= x_max && y_min <= y_max;
  }
  bool non_degenerate() const { return valid() && x_min < x_max && y_min < y_max; }

  bool same_extent(const Box2D & o) const
  {
    return x_min == o.x_min && y_min == o.y_min && x_max == o.x_max && y_max == o.y_max;
  }
};

inline double intersection_area(const Box2D & a, const Box2D & b)
{
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0.0 || ih <= 0.0) {
    return 0.0;
  }
  return iw * ih;
}

/// Intersection over union; 0 whenever the union has zero area.
inline double iou2d(const Box2D & a, const Box2D & b)
{
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  if (!(uni > 0.0)) {
    return 0.0;
  }
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace gck3d

#endif  // GCK3D__BOX2D_HPP_
