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
 * @file lifting.hpp
 *
 * Keypoint-constrained lifting of a 2D detection to an oriented 3D box, and
 * the encoder that maps a 3D box back to the regression/classification
 * parameters that reproduce it.
 *
 * Lifting chain:
 *   1. O's pixel from the amodal box and the side ratio; O's 3D position by
 *      back-projection at the predicted distance (translation T).
 *   2. Height from the top edge of the amodal box; length and width from
 *      per-class aspect priors times the predicted corrections (scale S).
 *   3. Yaw prior from the camera ray azimuth and the side ratio, pitch/roll
 *      priors from the inverted camera extrinsics, all refined by the
 *      predicted deltas (rotation R).
 *   4. The unit box is mapped by T * R * S.
 */

#ifndef GCK3D__LIFTING_HPP_
#define GCK3D__LIFTING_HPP_

#include "gck3d/box2d.hpp"
#include "gck3d/box3d.hpp"
#include "gck3d/error.hpp"
#include "gck3d/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>

namespace gck3d
{

enum class Facing { Back, Front };
enum class Side { Left, Right };

struct AspectPrior
{
  double length_to_height{2.8};
  double width_to_height{1.1};
};

struct ClassPriors
{
  std::map<std::string, AspectPrior> table{{"Car", AspectPrior{2.8, 1.1}}};

  const AspectPrior & at(const std::string & class_id) const
  {
    const auto it = table.find(class_id);
    if (it == table.end()) {
      throw Error(ErrorKind::InvalidParams, "no aspect prior for class '" + class_id + "'");
    }
    return it->second;
  }

  bool contains(const std::string & class_id) const { return table.count(class_id) != 0; }

  void validate() const
  {
    for (const auto & [name, p] : table) {
      if (!(p.length_to_height > 0.0) || !(p.width_to_height > 0.0)) {
        throw Error(ErrorKind::InvalidParams, "aspect prior for '" + name + "' must be positive");
      }
    }
  }
};

struct AspectDelta
{
  double length{1.0};
  double width{1.0};
};

/// Per-object prediction vector consumed by the box generator.
struct GckParams
{
  Box2D box_init{};
  std::optional<Box2D> box_pix{};
  double side_ratio{0.0};
  RotationTriple delta_angles{};
  AspectDelta delta_aspect{};
  double inv_depth{0.1};
  std::string class_id{"Car"};
  Facing fb{Facing::Back};
  Side lr{Side::Left};
  double score{1.0};

  /// Throws InvalidParams on any invariant violation.
  void validate() const
  {
    if (!box_init.non_degenerate()) {
      throw Error(ErrorKind::InvalidParams, "box_init must satisfy x_min < x_max and y_min < y_max");
    }
    if (box_pix && !box_pix->valid()) {
      throw Error(ErrorKind::InvalidParams, "box_pix is not a valid box");
    }
    if (!(side_ratio >= 0.0 && side_ratio <= 1.0)) {
      throw Error(ErrorKind::InvalidParams, "side_ratio must lie in [0, 1]");
    }
    if (!(inv_depth > 0.0) || !std::isfinite(inv_depth)) {
      throw Error(ErrorKind::InvalidParams, "inv_depth must be positive");
    }
    if (!(score >= 0.0 && score <= 1.0)) {
      throw Error(ErrorKind::InvalidParams, "score must lie in [0, 1]");
    }
    if (!(delta_aspect.length > 0.0) || !(delta_aspect.width > 0.0)) {
      throw Error(ErrorKind::InvalidParams, "aspect corrections must be positive");
    }
    if (
      !std::isfinite(delta_angles.yaw) || !std::isfinite(delta_angles.pitch) ||
      !std::isfinite(delta_angles.roll)) {
      throw Error(ErrorKind::InvalidParams, "angle corrections must be finite");
    }
  }
};

/// Homogeneous scale, rotation and translation of the box generator.
struct TransformSet
{
  Matrix4 scale{Matrix4::Identity()};
  Matrix4 rotation{Matrix4::Identity()};
  Matrix4 translation{Matrix4::Identity()};

  Matrix4 composed() const { return translation * rotation * scale; }
};

/// Relative keypoint positions inside the box enclosing all 8 projected vertices.
struct KeypointOffsets
{
  Box2D box_full{};
  Point2 a{Point2::Zero()};
  Point2 b{Point2::Zero()};
  Point2 c{Point2::Zero()};
  Point2 o{Point2::Zero()};

  /// (A, B, C, O) x (x, y) in that order.
  std::array<double, 8> flat() const
  {
    return {a.x(), a.y(), b.x(), b.y(), c.x(), c.y(), o.x(), o.y()};
  }
};

struct OriginSolution
{
  Point2 pixel{Point2::Zero()};
  Point3 origin{Point3::Zero()};
  Matrix4 translation{Matrix4::Identity()};
};

struct LiftResult
{
  Box3D box{};
  TransformSet transforms{};
};

constexpr double kMinDepth = 0.5;
constexpr double kMaxDepth = 500.0;

inline Matrix4 translation_matrix(const Point3 & t)
{
  Matrix4 m = Matrix4::Identity();
  m.block<3, 1>(0, 3) = t;
  return m;
}

inline Matrix4 rotation_matrix(const Matrix3 & r)
{
  Matrix4 m = Matrix4::Identity();
  m.block<3, 3>(0, 0) = r;
  return m;
}

/// diag(w, h, l, 1): local x carries the width, y the height, z the length.
inline Matrix4 scale_matrix(const Dimensions & d)
{
  return Eigen::Vector4d(d.width, d.height, d.length, 1.0).asDiagonal();
}

/// Corners of the 1 m cube with O at the local origin, laid out as in Box3D.
inline std::array<Eigen::Vector4d, 8> unit_box(const CornerSigns & corner)
{
  Box3D unit;
  unit.dims = {1.0, 1.0, 1.0};
  unit.corner = corner;
  std::array<Eigen::Vector4d, 8> out;
  for (std::size_t i = 0; i < 8; ++i) {
    out[i] = unit.local_vertex(i).homogeneous();
  }
  return out;
}

inline TransformSet make_transforms(const Box3D & box)
{
  return {scale_matrix(box.dims), rotation_matrix(box.rotation()), translation_matrix(box.origin)};
}

/// Apply T * R * S to the unit box of `corner`.
inline std::array<Point3, 8> transform_unit_box(const TransformSet & t, const CornerSigns & corner)
{
  const Matrix4 m = t.composed();
  std::array<Point3, 8> out;
  const auto unit = unit_box(corner);
  for (std::size_t i = 0; i < 8; ++i) {
    out[i] = (m * unit[i]).head<3>();
  }
  return out;
}

/**
 * Placement of the box relative to O. Seen from the back, the heading points
 * away from the camera and the box extends forward from O; the lateral
 * direction is toward the camera-left for a right-hand side view and
 * camera-right for a left-hand one. A visible front turns the heading by pi,
 * which flips both local directions while keeping the same volume.
 */
constexpr CornerSigns corner_for(Facing fb, Side lr)
{
  const int x = lr == Side::Right ? -1 : 1;
  return fb == Facing::Back ? CornerSigns{x, 1} : CornerSigns{-x, -1};
}

constexpr std::pair<Facing, Side> orientation_classes(const CornerSigns & corner)
{
  const Facing fb = corner.z > 0 ? Facing::Back : Facing::Front;
  const int back_x = fb == Facing::Back ? corner.x : -corner.x;
  return {fb, back_x > 0 ? Side::Left : Side::Right};
}

/// O's pixel from the amodal box and its 3D position at the predicted distance.
inline OriginSolution solve_origin(const GckParams & p, const CameraModel & cam)
{
  p.validate();
  const double dist = 1.0 / p.inv_depth;
  if (!(dist > kMinDepth && dist < kMaxDepth)) {
    throw Error(
      ErrorKind::DepthOutOfRange, "distance " + std::to_string(dist) + " m outside (0.5, 500)");
  }
  const Box2D & b = p.box_init;
  const double w2d = b.x_max - b.x_min;
  OriginSolution out;
  out.pixel.x() = p.lr == Side::Left ? b.x_min + p.side_ratio * w2d : b.x_max - p.side_ratio * w2d;
  out.pixel.y() = b.y_max;
  out.origin = backproject_at_distance(out.pixel, dist, cam);
  out.translation = translation_matrix(out.origin);
  return out;
}

/**
 * Height h such that (x, y - h, z) projects onto image row `b_y`.
 *
 * With X(h) = (x, y - h, z, 1), the rows give v(h) = (r1.X - h P11) / (r2.X - h P21),
 * which is linear in h after cross-multiplying.
 */
inline double solve_height(const Point3 & origin, double b_y, const CameraModel & cam)
{
  const Eigen::Vector4d x = origin.homogeneous();
  const double num0 = cam.projection.row(1).dot(x);
  const double den0 = cam.projection.row(2).dot(x);
  const double coeff = b_y * cam.projection(2, 1) - cam.projection(1, 1);
  if (std::abs(coeff) < 1e-12 * std::max(1.0, std::abs(cam.projection(1, 1)))) {
    throw Error(ErrorKind::SingularProjection, "image row does not depend on height");
  }
  const double h = (b_y * den0 - num0) / coeff;
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorKind::NonPositiveHeight, "height solve gave h=" + std::to_string(h));
  }
  return h;
}

inline Dimensions compute_dims(
  double h, const std::string & class_id, const AspectDelta & delta, const ClassPriors & priors)
{
  if (!(h > 0.0)) {
    throw Error(ErrorKind::NonPositiveHeight, "height must be positive");
  }
  const AspectPrior & ar = priors.at(class_id);
  return {ar.length_to_height * h * delta.length, h, ar.width_to_height * h * delta.width};
}

/// Azimuth of the camera ray through O.
inline double camera_ray_yaw(const Point3 & origin) { return std::atan(origin.x() / origin.z()); }

inline double compute_yaw_prior(const Point3 & origin, double side_ratio, Side lr)
{
  const double offset = std::asin(std::clamp(side_ratio, 0.0, 1.0));
  const double cam_yaw = camera_ray_yaw(origin);
  return lr == Side::Right ? cam_yaw + offset : cam_yaw - offset;
}

inline RotationTriple compute_angles(
  double yaw_init, const CameraModel & cam, const RotationTriple & delta, Facing fb)
{
  RotationTriple out;
  out.yaw = yaw_init + delta.yaw + (fb == Facing::Front ? kPi : 0.0);
  out.pitch = -cam.extrinsic_pitch + delta.pitch;
  out.roll = -cam.extrinsic_roll + delta.roll;
  return out.wrapped();
}

inline LiftResult lift(const GckParams & p, const CameraModel & cam, const ClassPriors & priors)
{
  const OriginSolution o = solve_origin(p, cam);
  const double h = solve_height(o.origin, p.box_init.y_min, cam);

  LiftResult out;
  Box3D & box = out.box;
  box.origin = o.origin;
  box.dims = compute_dims(h, p.class_id, p.delta_aspect, priors);
  box.angles = compute_angles(compute_yaw_prior(o.origin, p.side_ratio, p.lr), cam, p.delta_angles, p.fb);
  box.corner = corner_for(p.fb, p.lr);
  box.class_id = p.class_id;
  box.score = p.score;

  out.transforms.translation = o.translation;
  out.transforms.scale = scale_matrix(box.dims);
  out.transforms.rotation = rotation_matrix(box.rotation());
  return out;
}

/// Box_Full and the relative keypoint offsets of a box.
inline KeypointOffsets project_box(const Box3D & b, const CameraModel & cam)
{
  std::array<Point2, 8> pix;
  const auto v = b.vertices();
  for (std::size_t i = 0; i < 8; ++i) {
    pix[i] = project(v[i], cam);
  }
  KeypointOffsets out;
  Box2D & full = out.box_full;
  full.x_min = full.x_max = pix[0].x();
  full.y_min = full.y_max = pix[0].y();
  for (const auto & q : pix) {
    full.x_min = std::min(full.x_min, q.x());
    full.x_max = std::max(full.x_max, q.x());
    full.y_min = std::min(full.y_min, q.y());
    full.y_max = std::max(full.y_max, q.y());
  }
  full.score = b.score;
  const double w = full.width();
  const double h = full.height();
  const auto rel = [&](const Point2 & q) {
    return Point2(
      w > 0.0 ? std::clamp((q.x() - full.x_min) / w, 0.0, 1.0) : 0.0,
      h > 0.0 ? std::clamp((q.y() - full.y_min) / h, 0.0, 1.0) : 0.0);
  };
  out.a = rel(pix[static_cast<std::size_t>(Keypoint::A)]);
  out.b = rel(pix[static_cast<std::size_t>(Keypoint::B)]);
  out.c = rel(pix[static_cast<std::size_t>(Keypoint::C)]);
  out.o = rel(pix[static_cast<std::size_t>(Keypoint::O)]);
  return out;
}

/**
 * Parameters that lift back to `b`.
 *
 * F/B and L/R come from the box's corner placement; the side ratio is
 * |sin| of the geometric yaw relative to the camera ray and any remainder
 * goes into the yaw delta. The top edge of Box_Init is the projection of O
 * raised by h along the camera's vertical, which is what the height solve
 * inverts; the horizontal extent spans the projections of O, A and C and is
 * shifted so that O lands at the side-ratio position.
 */
inline GckParams encode(const Box3D & b, const CameraModel & cam, const ClassPriors & priors)
{
  if (!b.valid()) {
    throw Error(ErrorKind::Unencodable, "box violates its invariants");
  }
  const AspectPrior & ar = priors.at(b.class_id);

  Box3D canon = b;
  canon.angles = decompose_rotation(b.rotation());

  std::array<Point2, 8> pix;
  try {
    const auto v = canon.vertices();
    for (std::size_t i = 0; i < 8; ++i) {
      pix[i] = project(v[i], cam);
    }
  } catch (const Error & e) {
    throw Error(ErrorKind::Unencodable, e.what());
  }

  const Point3 & o = canon.origin;
  const double dist = o.norm();
  if (!(dist > kMinDepth && dist < kMaxDepth)) {
    throw Error(ErrorKind::Unencodable, "origin distance outside (0.5, 500) m");
  }

  GckParams p;
  std::tie(p.fb, p.lr) = orientation_classes(canon.corner);
  p.class_id = canon.class_id;
  p.score = std::clamp(canon.score, 0.0, 1.0);
  p.inv_depth = 1.0 / dist;

  const double cam_yaw = camera_ray_yaw(o);
  const double flip = p.fb == Facing::Front ? kPi : 0.0;
  const double rel = angle_diff(canon.angles.yaw - flip, cam_yaw);
  p.side_ratio = std::clamp(std::abs(std::sin(rel)), 0.0, 1.0);
  const double yaw_init = compute_yaw_prior(o, p.side_ratio, p.lr);
  p.delta_angles.yaw = angle_diff(canon.angles.yaw - flip, yaw_init);
  p.delta_angles.pitch = wrap_angle(canon.angles.pitch + cam.extrinsic_pitch);
  p.delta_angles.roll = wrap_angle(canon.angles.roll + cam.extrinsic_roll);

  const double h = canon.dims.height;
  p.delta_aspect.length = canon.dims.length / (ar.length_to_height * h);
  p.delta_aspect.width = canon.dims.width / (ar.width_to_height * h);

  const Point2 o_pix = pix[static_cast<std::size_t>(Keypoint::O)];
  const Point2 a_pix = pix[static_cast<std::size_t>(Keypoint::A)];
  const Point2 c_pix = pix[static_cast<std::size_t>(Keypoint::C)];
  const double top = project(Point3(o.x(), o.y() - h, o.z()), cam).y();
  const double w2d = std::max({o_pix.x(), a_pix.x(), c_pix.x()}) -
                     std::min({o_pix.x(), a_pix.x(), c_pix.x()});
  if (!(w2d > 0.0) || !(top < o_pix.y())) {
    throw Error(ErrorKind::Unencodable, "keypoints do not span a non-degenerate 2D box");
  }
  Box2D & bi = p.box_init;
  if (p.lr == Side::Left) {
    bi.x_min = o_pix.x() - p.side_ratio * w2d;
    bi.x_max = bi.x_min + w2d;
  } else {
    bi.x_max = o_pix.x() + p.side_ratio * w2d;
    bi.x_min = bi.x_max - w2d;
  }
  bi.y_min = top;
  bi.y_max = o_pix.y();
  bi.score = p.score;
  return p;
}

}  // namespace gck3d

#endif  // GCK3D__LIFTING_HPP_
