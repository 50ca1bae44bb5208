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

// Encodes a car box into detection parameters, lifts it back, and prints
// both together with the KITTI label line of the result.

#include "gck3d/io.hpp"
#include "gck3d/lifting.hpp"

#include <cstdio>

using namespace gck3d;

int main()
{
  const CameraModel cam = io::parse_kitti_calib(
    "P2: 721.5377 0 609.5593 44.85728 0 721.5377 172.854 0.2163791 0 0 1 0.002745884\n");
  const ClassPriors priors;

  // A 4.2 m car, 18 m ahead and slightly left, turned 30 degrees.
  const Box3D truth = Box3D::from_center(
    {-2.5, 0.9, 18.0}, Dimensions{4.2, 1.5, 1.8}, RotationTriple{0.52, 0.0, 0.0});

  const GckParams p = io::parse_params_line(io::format_params_line(encode(truth, cam, priors)));
  std::printf("params: %s\n", io::format_params_line(p).c_str());

  const LiftResult lifted = lift(p, cam, priors);
  const Box3D & b = lifted.box;
  std::printf("origin: %.6f %.6f %.6f\n", b.origin.x(), b.origin.y(), b.origin.z());
  std::printf("dims (l h w): %.6f %.6f %.6f\n", b.dims.length, b.dims.height, b.dims.width);
  std::printf("yaw: %.6f (truth %.6f)\n", b.angles.yaw, truth.angles.yaw);
  std::printf("origin error: %.3e m\n", (b.origin - truth.origin).norm());
  std::printf("kitti: %s\n", io::format_kitti_label(io::to_kitti(b, &cam)).c_str());
  return 0;
}
