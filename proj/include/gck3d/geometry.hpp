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
 * @file geometry.hpp
 *
 * Camera model, pinhole projection, distance-constrained back-projection and
 * Euler composition.
 *
 * Camera frame: x right, y down, z forward (right-handed). Rotations follow
 * an intrinsic y-x-z sequence:
 *
 *   R = R_y(yaw) * R_x(pitch) * R_z(roll)
 *
 * with the usual right-handed elementary rotations. Yaw-only rotations are the
 * KITTI `rotation_y` matrices.
 */

#ifndef GCK3D__GEOMETRY_HPP_
#define GCK3D__GEOMETRY_HPP_

#include "gck3d/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>

namespace gck3d
{

using Point2 = Eigen::Vector2d;
using Point3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Matrix4 = Eigen::Matrix4d;
using Projection = Eigen::Matrix<double, 3, 4>;

constexpr double kPi = std::numbers::pi;

/// Wrap into (-pi, pi]; -pi maps to +pi.
inline double wrap_angle(double a)
{
  double w = std::atan2(std::sin(a), std::cos(a));
  if (w <= -kPi) {
    w = kPi;
  }
  return w;
}

/// Smallest signed difference a - b, in (-pi, pi].
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

struct RotationTriple
{
  double yaw{0.0};
  double pitch{0.0};
  double roll{0.0};

  RotationTriple wrapped() const { return {wrap_angle(yaw), wrap_angle(pitch), wrap_angle(roll)}; }
};

struct CameraModel
{
  Projection projection{Projection::Zero()};
  double image_width{0.0};
  double image_height{0.0};
  double extrinsic_pitch{0.0};
  double extrinsic_roll{0.0};

  /// Pinhole camera with zero translation column.
  static CameraModel pinhole(
    double fx, double fy, double cx, double cy, double width = 1242.0, double height = 375.0)
  {
    CameraModel cam;
    cam.projection << fx, 0.0, cx, 0.0, 0.0, fy, cy, 0.0, 0.0, 0.0, 1.0, 0.0;
    cam.image_width = width;
    cam.image_height = height;
    return cam;
  }

  Matrix3 intrinsic_block() const { return projection.leftCols<3>(); }

  /// Throws InvalidCamera when the model violates its invariants.
  void validate() const
  {
    if (!projection.allFinite()) {
      throw Error(ErrorKind::InvalidCamera, "projection has non-finite entries");
    }
    if (!(image_width > 0.0) || !(image_height > 0.0)) {
      throw Error(ErrorKind::InvalidCamera, "image size must be positive");
    }
    const double det = intrinsic_block().determinant();
    const double scale = intrinsic_block().cwiseAbs().maxCoeff();
    if (!(std::abs(det) > 1e-12 * scale * scale * scale)) {
      throw Error(ErrorKind::InvalidCamera, "left 3x3 block of the projection is singular");
    }
    if (!std::isfinite(extrinsic_pitch) || !std::isfinite(extrinsic_roll)) {
      throw Error(ErrorKind::InvalidCamera, "extrinsics must be finite");
    }
  }

  /// Optical center in the camera frame: the null vector of the projection.
  Point3 center() const
  {
    return -intrinsic_block().partialPivLu().solve(projection.col(3));
  }
};

/// Dehomogenized P * (x, y, z, 1). Throws PointBehindCamera for z <= 1e-9.
inline Point2 project(const Point3 & p, const CameraModel & cam)
{
  if (!(p.z() > 1e-9)) {
    throw Error(
      ErrorKind::PointBehindCamera, "point z=" + std::to_string(p.z()) + " is not in front of the camera");
  }
  const Eigen::Vector3d h = cam.projection * p.homogeneous();
  return {h.x() / h.z(), h.y() / h.z()};
}

/**
 * Point on the viewing ray of `pix` whose Euclidean distance from the frame
 * origin equals `dist`.
 *
 * The ray is C + t * M^-1 (u, v, 1) with M the left 3x3 block and C the
 * optical center. Solving |C + t d| = dist is a quadratic in t; the larger
 * root is taken and must lie in front of the camera. For a zero translation
 * column this is exactly dist * normalize(M^-1 (u, v, 1)).
 */
inline Point3 backproject_at_distance(const Point2 & pix, double dist, const CameraModel & cam)
{
  if (!(dist > 0.0) || !std::isfinite(dist)) {
    throw Error(ErrorKind::NoForwardSolution, "distance must be positive and finite");
  }
  const auto lu = cam.intrinsic_block().partialPivLu();
  const Point3 dir = lu.solve(Eigen::Vector3d(pix.x(), pix.y(), 1.0));
  const Point3 origin = -lu.solve(cam.projection.col(3));

  const double a = dir.squaredNorm();
  const double b = origin.dot(dir);
  const double c = origin.squaredNorm() - dist * dist;
  const double disc = b * b - a * c;
  if (disc < 0.0) {
    throw Error(ErrorKind::NoForwardSolution, "viewing ray never reaches the requested distance");
  }
  // Larger root of a t^2 + 2 b t + c, computed without cancellation.
  const double sq = std::sqrt(disc);
  double t = 0.0;
  if (b <= 0.0) {
    t = (-b + sq) / a;
  } else {
    t = -c / (b + sq);
  }
  // Homogeneous depth of C + t d equals t, so t > 0 is "in front".
  const Point3 q = origin + t * dir;
  if (!(t > 0.0) || !(q.z() > 1e-9)) {
    throw Error(ErrorKind::NoForwardSolution, "no forward intersection at the requested distance");
  }
  return q;
}

inline Matrix3 rotation_y(double a)
{
  const double c = std::cos(a);
  const double s = std::sin(a);
  Matrix3 r;
  r << c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c;
  return r;
}

inline Matrix3 rotation_x(double a)
{
  const double c = std::cos(a);
  const double s = std::sin(a);
  Matrix3 r;
  r << 1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c;
  return r;
}

inline Matrix3 rotation_z(double a)
{
  const double c = std::cos(a);
  const double s = std::sin(a);
  Matrix3 r;
  r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return r;
}

inline Matrix3 compose_rotation(const RotationTriple & angles)
{
  return rotation_y(angles.yaw) * rotation_x(angles.pitch) * rotation_z(angles.roll);
}

/// Inverse of compose_rotation with pitch in [-pi/2, pi/2]. Throws GimbalLock
/// when |cos(pitch)| < 1e-6; the split between yaw and roll is then undefined.
inline RotationTriple decompose_rotation(const Matrix3 & r)
{
  // Middle row of R_y R_x R_z is (cp sr, cp cr, -sp).
  const double cos_pitch = std::hypot(r(1, 0), r(1, 1));
  if (cos_pitch < 1e-6) {
    throw Error(ErrorKind::GimbalLock, "pitch is within 1e-6 of +-pi/2");
  }
  RotationTriple out;
  out.pitch = std::atan2(-r(1, 2), cos_pitch);
  out.roll = std::atan2(r(1, 0), r(1, 1));
  out.yaw = std::atan2(r(0, 2), r(2, 2));
  return out.wrapped();
}

}  // namespace gck3d

#endif  // GCK3D__GEOMETRY_HPP_
