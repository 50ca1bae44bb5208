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
 * @file box3d.hpp
 *
 * Oriented 3D box anchored at its keypoint O.
 *
 * The object frame mirrors the camera frame: local x is lateral (width),
 * local y points down (height grows along -y) and local z is the heading
 * (length). A yaw of 0 therefore means the object points along the optical
 * axis, and the yaw angle is measured the same way as the azimuth of a camera
 * ray, atan(x / z).
 *
 * O is a bottom corner. `corner` records the local directions in which the
 * box extends from O, so that O can be any of the four bottom corners while
 * the rotation stays proper. Vertex layout (local, before rotation):
 *
 *   0: O   (0, 0, 0)              4: B   (0, -h, 0)
 *   1: A   (sx*w, 0, 0)           5:     (sx*w, -h, 0)
 *   2:     (sx*w, 0, sz*l)        6:     (sx*w, -h, sz*l)
 *   3: C   (0, 0, sz*l)           7:     (0, -h, sz*l)
 */

#ifndef GCK3D__BOX3D_HPP_
#define GCK3D__BOX3D_HPP_

#include "gck3d/geometry.hpp"

#include <array>
#include <cstddef>
#include <string>

namespace gck3d
{

struct Dimensions
{
  double length{0.0};
  double height{0.0};
  double width{0.0};

  bool valid() const { return length > 0.0 && height > 0.0 && width > 0.0; }
};

/// Local axis directions (+1 / -1) along which the box extends from O.
struct CornerSigns
{
  int x{1};
  int z{1};

  bool operator==(const CornerSigns &) const = default;
};

enum class Keypoint : std::size_t { O = 0, A = 1, C = 3, B = 4 };

struct Box3D
{
  Point3 origin{Point3::Zero()};
  Dimensions dims{};
  RotationTriple angles{};
  CornerSigns corner{};
  std::string class_id{"Car"};
  double score{1.0};

  Matrix3 rotation() const { return compose_rotation(angles); }

  /// Offset of the unit-box corner `index` after scaling, in the object frame.
  Point3 local_vertex(std::size_t index) const
  {
    const double a = (index == 1 || index == 2 || index == 5 || index == 6) ? 1.0 : 0.0;
    const double b = index >= 4 ? 1.0 : 0.0;
    const double c = (index % 4 == 2 || index % 4 == 3) ? 1.0 : 0.0;
    return {corner.x * dims.width * a, -dims.height * b, corner.z * dims.length * c};
  }

  std::array<Point3, 8> vertices() const
  {
    const Matrix3 r = rotation();
    std::array<Point3, 8> out;
    for (std::size_t i = 0; i < 8; ++i) {
      out[i] = origin + r * local_vertex(i);
    }
    return out;
  }

  Point3 keypoint(Keypoint k) const
  {
    return origin + rotation() * local_vertex(static_cast<std::size_t>(k));
  }

  Point3 center() const
  {
    const Point3 half(corner.x * dims.width / 2.0, -dims.height / 2.0, corner.z * dims.length / 2.0);
    return origin + rotation() * half;
  }

  double volume() const { return dims.length * dims.height * dims.width; }

  /// Index (0..3) of the bottom vertex closest to the camera; lowest index wins ties.
  std::size_t closest_bottom_vertex() const
  {
    const auto v = vertices();
    std::size_t best = 0;
    for (std::size_t i = 1; i < 4; ++i) {
      if (v[i].norm() < v[best].norm()) {
        best = i;
      }
    }
    return best;
  }

  bool valid() const
  {
    return dims.valid() && origin.allFinite() && origin.z() > 0.0 && std::isfinite(angles.yaw) &&
           std::isfinite(angles.pitch) && std::isfinite(angles.roll) &&
           (corner.x == 1 || corner.x == -1) && (corner.z == 1 || corner.z == -1);
  }

  /**
   * Box with the given geometric center, re-anchored at the camera-closest
   * bottom corner. Candidates are visited in local (x, z) sign order
   * (-,-), (+,-), (+,+), (-,+); the first minimum wins.
   */
  static Box3D from_center(
    const Point3 & center, const Dimensions & dims, const RotationTriple & angles,
    std::string class_id = "Car", double score = 1.0)
  {
    const Matrix3 r = compose_rotation(angles);
    constexpr std::array<std::array<int, 2>, 4> kSigns{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};
    Box3D box;
    box.dims = dims;
    box.angles = angles;
    box.class_id = std::move(class_id);
    box.score = score;
    double best = 0.0;
    bool first = true;
    for (const auto & s : kSigns) {
      const Point3 corner =
        center + r * Point3(s[0] * dims.width / 2.0, dims.height / 2.0, s[1] * dims.length / 2.0);
      const double d = corner.norm();
      if (first || d < best) {
        first = false;
        best = d;
        box.origin = corner;
        box.corner = CornerSigns{-s[0], -s[1]};
      }
    }
    return box;
  }

  /// Same volume, re-anchored so that O is the camera-closest bottom corner.
  Box3D reanchored() const { return from_center(center(), dims, angles, class_id, score); }
};

}  // namespace gck3d

#endif  // GCK3D__BOX3D_HPP_
