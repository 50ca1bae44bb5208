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
 * @file synth.hpp
 *
 * Synthetic scenes: random upright-ish cars in front of a KITTI-like pinhole
 * camera, their encoded parameters and optional parameter noise.
 *
 * Random numbers: frame i seeds a std::mt19937_64 with splitmix64(seed + i).
 * Uniform doubles are (next() >> 11) * 2^-53 and normals use Box-Muller on
 * two such uniforms, so every platform produces the same scenes.
 */

#ifndef GCK3D__SYNTH_HPP_
#define GCK3D__SYNTH_HPP_

#include "gck3d/boxes.hpp"
#include "gck3d/error.hpp"
#include "gck3d/io.hpp"
#include "gck3d/lifting.hpp"
#include "gck3d/parallel.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

namespace gck3d::synth
{

inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Integer in [lo, hi].
  int uniform_int(int lo, int hi)
  {
    const int v = lo + static_cast<int>(uniform() * static_cast<double>(hi - lo + 1));
    return std::min(v, hi);
  }

  double normal(double mean = 0.0, double stddev = 1.0)
  {
    if (stddev == 0.0) {
      return mean;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

private:
  std::mt19937_64 engine_;
};

struct Range
{
  double min{0.0};
  double max{0.0};

  bool valid() const { return std::isfinite(min) && std::isfinite(max) && min <= max; }
};

/// Standard deviations of the perturbation applied to encoded parameters.
struct NoiseModel
{
  double depth_rel{0.0};     ///< relative to the origin distance
  double side_ratio{0.0};
  double delta_yaw{0.0};
  double delta_pitch{0.0};
  double delta_roll{0.0};
  double delta_aspect{0.0};
  double box_pixels{0.0};    ///< each Box_Init edge

  bool valid() const
  {
    for (const double s :
         {depth_rel, side_ratio, delta_yaw, delta_pitch, delta_roll, delta_aspect, box_pixels}) {
      if (!(s >= 0.0) || !std::isfinite(s)) {
        return false;
      }
    }
    return true;
  }

  bool zero() const
  {
    return depth_rel == 0.0 && side_ratio == 0.0 && delta_yaw == 0.0 && delta_pitch == 0.0 &&
           delta_roll == 0.0 && delta_aspect == 0.0 && box_pixels == 0.0;
  }
};

struct SceneSpec
{
  std::uint64_t seed{0};
  int num_frames{10};
  int min_boxes{1};
  int max_boxes{20};
  Range depth{8.0, 60.0};          ///< camera z of the box center
  Range yaw{-kPi, kPi};
  double pitch_roll_jitter{3.0 * kPi / 180.0};
  Range camera_height{1.5, 1.8};
  Range length{3.5, 5.0};
  Range width{1.5, 2.0};
  Range height{1.4, 1.8};
  Range score{0.5, 1.0};
  NoiseModel noise{};
  std::string class_id{"Car"};
  double fx{721.5377};
  double fy{721.5377};
  double cx{609.5593};
  double cy{172.854};
  double image_width{1242.0};
  double image_height{375.0};
  int max_attempts{200};            ///< per box

  void validate() const
  {
    const auto fail = [](const char * what) { throw Error(ErrorKind::InvalidParams, what); };
    if (num_frames < 0) {
      fail("num_frames must be non-negative");
    }
    if (min_boxes < 0 || min_boxes > max_boxes) {
      fail("boxes-per-frame range is empty");
    }
    for (const Range * r : {&depth, &yaw, &camera_height, &length, &width, &height, &score}) {
      if (!r->valid()) {
        fail("sampling ranges must be finite with min <= max");
      }
    }
    if (!(depth.min > 0.0) || !(length.min > 0.0) || !(width.min > 0.0) || !(height.min > 0.0)) {
      fail("depth and dimension ranges must be positive");
    }
    if (!(score.min >= 0.0) || !(score.max <= 1.0)) {
      fail("score range must lie in [0, 1]");
    }
    if (!(pitch_roll_jitter >= 0.0)) {
      fail("pitch/roll jitter must be non-negative");
    }
    if (!noise.valid()) {
      fail("noise standard deviations must be non-negative");
    }
    if (max_attempts < 1) {
      fail("max_attempts must be positive");
    }
  }

  CameraModel camera() const { return CameraModel::pinhole(fx, fy, cx, cy, image_width, image_height); }
};

namespace detail
{

inline bool inside_image(const Box3D & b, const CameraModel & cam)
{
  for (const auto & v : b.vertices()) {
    if (v.z() <= 1e-6) {
      return false;
    }
    const Point2 p = project(v, cam);
    if (p.x() < 0.0 || p.x() > cam.image_width || p.y() < 0.0 || p.y() > cam.image_height) {
      return false;
    }
  }
  return true;
}

/// Encodes and checks that lifting reproduces the box closely.
inline std::optional<GckParams> encodable(
  const Box3D & b, const CameraModel & cam, const ClassPriors & priors)
{
  try {
    GckParams p = encode(b, cam, priors);
    const Box3D back = lift(p, cam, priors).box;
    if ((back.origin - b.origin).norm() > 1e-6 || back.corner != b.corner) {
      return std::nullopt;
    }
    return p;
  } catch (const Error &) {
    return std::nullopt;
  }
}

inline GckParams perturb(GckParams p, const NoiseModel & n, Rng & rng)
{
  if (n.zero()) {
    return p;
  }
  const double dist = 1.0 / p.inv_depth;
  const double noisy = dist * std::max(0.05, 1.0 + rng.normal(0.0, n.depth_rel));
  p.inv_depth = 1.0 / noisy;
  p.side_ratio = std::clamp(p.side_ratio + rng.normal(0.0, n.side_ratio), 0.0, 1.0);
  p.delta_angles.yaw += rng.normal(0.0, n.delta_yaw);
  p.delta_angles.pitch += rng.normal(0.0, n.delta_pitch);
  p.delta_angles.roll += rng.normal(0.0, n.delta_roll);
  p.delta_aspect.length = std::max(0.05, p.delta_aspect.length + rng.normal(0.0, n.delta_aspect));
  p.delta_aspect.width = std::max(0.05, p.delta_aspect.width + rng.normal(0.0, n.delta_aspect));
  Box2D b = p.box_init;
  b.x_min += rng.normal(0.0, n.box_pixels);
  b.y_min += rng.normal(0.0, n.box_pixels);
  b.x_max += rng.normal(0.0, n.box_pixels);
  b.y_max += rng.normal(0.0, n.box_pixels);
  if (b.non_degenerate()) {
    p.box_init = b;
  }
  return p;
}

}  // namespace detail

inline std::string frame_name(std::size_t index)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06zu", index);
  return buf;
}

/// One frame; depends only on the spec and the frame index.
inline io::SceneFile generate_frame(
  const SceneSpec & spec, std::size_t index, const ClassPriors & priors)
{
  Rng rng(spec.seed + index);
  const CameraModel cam = spec.camera();

  io::SceneFile scene;
  scene.name = frame_name(index);
  scene.camera = cam;

  const double cam_height = rng.uniform(spec.camera_height.min, spec.camera_height.max);
  const int target = rng.uniform_int(spec.min_boxes, spec.max_boxes);
  std::vector<Box3D> placed;

  for (int k = 0; k < target; ++k) {
    for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
      const Dimensions dims{
        rng.uniform(spec.length.min, spec.length.max), rng.uniform(spec.height.min, spec.height.max),
        rng.uniform(spec.width.min, spec.width.max)};
      const double z = rng.uniform(spec.depth.min, spec.depth.max);
      const double half_fov_left = spec.cx / spec.fx;
      const double half_fov_right = (spec.image_width - spec.cx) / spec.fx;
      const double x = rng.uniform(-half_fov_left * z, half_fov_right * z);
      const RotationTriple angles{
        rng.uniform(spec.yaw.min, spec.yaw.max),
        rng.uniform(-spec.pitch_roll_jitter, spec.pitch_roll_jitter),
        rng.uniform(-spec.pitch_roll_jitter, spec.pitch_roll_jitter)};
      const double score = rng.uniform(spec.score.min, spec.score.max);
      const Point3 center(x, cam_height - dims.height / 2.0, z);

      Box3D box = Box3D::from_center(center, dims, angles.wrapped(), spec.class_id, score);
      if (!box.valid() || !detail::inside_image(box, cam)) {
        continue;
      }
      const bool overlaps = std::any_of(placed.begin(), placed.end(), [&](const Box3D & o) {
        return bev_intersection_area(box, o) > 0.0;
      });
      if (overlaps) {
        continue;
      }
      const auto params = detail::encodable(box, cam, priors);
      if (!params) {
        continue;
      }

      GtBox gt;
      gt.box = box;
      gt.box.score = 1.0;
      gt.bbox_height = project_box(box, cam).box_full.height();
      gt.occlusion = 0;
      gt.truncation = 0.0;
      scene.ground_truth.push_back(gt);
      scene.detections.emplace_back(detail::perturb(*params, spec.noise, rng));
      placed.push_back(box);
      break;
    }
  }
  return scene;
}

/// Frames are independent, so the result does not depend on `jobs`.
inline std::vector<io::SceneFile> generate(
  const SceneSpec & spec, const ClassPriors & priors = {}, unsigned jobs = 1)
{
  spec.validate();
  priors.at(spec.class_id);
  std::vector<io::SceneFile> out(static_cast<std::size_t>(spec.num_frames));
  parallel_for(out.size(), jobs, [&](std::size_t i) { out[i] = generate_frame(spec, i, priors); });
  return out;
}

}  // namespace gck3d::synth

#endif  // GCK3D__SYNTH_HPP_
