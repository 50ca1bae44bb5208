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

#include "gck3d/geometry.hpp"
#include "gck3d/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace gck3d;

namespace
{

CameraModel kitti_like()
{
  CameraModel cam;
  cam.projection << 721.5377, 0.0, 609.5593, 44.85728, 0.0, 721.5377, 172.854, 0.2163791, 0.0, 0.0,
    1.0, 0.002745884;
  cam.image_width = 1242;
  cam.image_height = 375;
  return cam;
}

}  // namespace

TEST(WrapAngle, MapsIntoHalfOpenInterval)
{
  EXPECT_DOUBLE_EQ(wrap_angle(0.0), 0.0);
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(3.0 * kPi / 2.0), -kPi / 2.0, 1e-15);
  EXPECT_NEAR(wrap_angle(7.0), 7.0 - 2.0 * kPi, 1e-15);
  for (double a = -20.0; a < 20.0; a += 0.37) {
    const double w = wrap_angle(a);
    EXPECT_GT(w, -kPi);
    EXPECT_LE(w, kPi);
    EXPECT_NEAR(std::sin(w), std::sin(a), 1e-12);
    EXPECT_NEAR(std::cos(w), std::cos(a), 1e-12);
  }
}

TEST(Project, OpticalAxisMapsToPrincipalPoint)
{
  const auto cam = CameraModel::pinhole(1, 1, 0, 0);
  const Point2 p = project({0, 0, 5}, cam);
  EXPECT_DOUBLE_EQ(p.x(), 0.0);
  EXPECT_DOUBLE_EQ(p.y(), 0.0);
}

TEST(Project, PinholeArithmetic)
{
  const Point2 p = project({1, 2, 2}, CameraModel::pinhole(100, 100, 0, 0));
  EXPECT_DOUBLE_EQ(p.x(), 50.0);
  EXPECT_DOUBLE_EQ(p.y(), 100.0);
  const Point2 q = project({0, 0.15, 10}, CameraModel::pinhole(700, 700, 180, 180));
  EXPECT_NEAR(q.y(), 700.0 * 0.15 / 10.0 + 180.0, 1e-12);
  EXPECT_NEAR(q.y(), 190.5, 1e-12);
}

TEST(Project, RejectsPointsBehindCamera)
{
  const auto cam = CameraModel::pinhole(100, 100, 0, 0);
  try {
    project({0, 0, 0}, cam);
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.kind(), ErrorKind::PointBehindCamera);
  }
  EXPECT_THROW(project({0, 0, -1}, cam), Error);
}

TEST(Project, InvariantUnderProjectionScale)
{
  auto cam = kitti_like();
  const Point3 x(1.3, 0.8, 17.0);
  const Point2 a = project(x, cam);
  cam.projection *= 3.7;
  const Point2 b = project(x, cam);
  EXPECT_NEAR(a.x(), b.x(), 1e-9);
  EXPECT_NEAR(a.y(), b.y(), 1e-9);
}

TEST(Backproject, OpticalAxis)
{
  const Point3 q = backproject_at_distance({0, 0}, 7.0, CameraModel::pinhole(1, 1, 0, 0));
  EXPECT_NEAR(q.x(), 0.0, 1e-15);
  EXPECT_NEAR(q.y(), 0.0, 1e-15);
  EXPECT_NEAR(q.z(), 7.0, 1e-15);
}

TEST(Backproject, DiagonalRay)
{
  const Point3 q =
    backproject_at_distance({100, 0}, std::sqrt(2.0), CameraModel::pinhole(100, 100, 0, 0));
  EXPECT_NEAR(q.x(), 1.0, 1e-12);
  EXPECT_NEAR(q.y(), 0.0, 1e-12);
  EXPECT_NEAR(q.z(), 1.0, 1e-12);
}

TEST(Backproject, RoundTripsWithTranslationColumn)
{
  const auto cam = kitti_like();
  synth::Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const Point2 pix(rng.uniform(-300, 1500), rng.uniform(-200, 600));
    const double d = rng.uniform(1.0, 200.0);
    const Point3 q = backproject_at_distance(pix, d, cam);
    EXPECT_NEAR(q.norm(), d, 1e-9);
    EXPECT_GT(q.z(), 0.0);
    const Point2 back = project(q, cam);
    EXPECT_NEAR(back.x(), pix.x(), 1e-6);
    EXPECT_NEAR(back.y(), pix.y(), 1e-6);
  }
}

TEST(Backproject, NoForwardSolutionWhenCenterIsFarther)
{
  // Optical center at distance 5 from the origin: a 1 m sphere is never reached.
  auto cam = CameraModel::pinhole(100, 100, 0, 0);
  cam.projection(0, 3) = -500.0;
  try {
    backproject_at_distance({0, 0}, 1.0, cam);
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoForwardSolution);
  }
}

TEST(Rotation, ZeroIsIdentity)
{
  EXPECT_TRUE(compose_rotation({0, 0, 0}).isApprox(Matrix3::Identity(), 0.0));
}

TEST(Rotation, HalfTurnAboutVertical)
{
  const Matrix3 r = compose_rotation({kPi, 0, 0});
  EXPECT_TRUE((r * Point3(1, 0, 0)).isApprox(Point3(-1, 0, 0), 1e-12));
  EXPECT_TRUE((r * Point3(0, 0, 1)).isApprox(Point3(0, 0, -1), 1e-12));
  EXPECT_TRUE((r * Point3(0, 1, 0)).isApprox(Point3(0, 1, 0), 1e-12));
}

TEST(Rotation, YawTurnsHeadingTowardCameraRight)
{
  // Local z heading with yaw a points along (sin a, 0, cos a), the azimuth atan(x/z).
  const double a = 0.4;
  const Point3 h = compose_rotation({a, 0, 0}) * Point3(0, 0, 1);
  EXPECT_NEAR(std::atan(h.x() / h.z()), a, 1e-15);
}

TEST(Rotation, OrthonormalWithUnitDeterminant)
{
  synth::Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const RotationTriple t{rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi)};
    const Matrix3 r = compose_rotation(t);
    EXPECT_LT((r.transpose() * r - Matrix3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(std::abs(r.determinant() - 1.0), 1e-12);
  }
}

TEST(Rotation, DecomposeIdentity)
{
  const RotationTriple t = decompose_rotation(Matrix3::Identity());
  EXPECT_EQ(t.yaw, 0.0);
  EXPECT_EQ(t.pitch, 0.0);
  EXPECT_EQ(t.roll, 0.0);
}

TEST(Rotation, DecomposeRecoversAngles)
{
  const RotationTriple t = decompose_rotation(compose_rotation({0.3, 0.1, -0.2}));
  EXPECT_NEAR(t.yaw, 0.3, 1e-9);
  EXPECT_NEAR(t.pitch, 0.1, 1e-9);
  EXPECT_NEAR(t.roll, -0.2, 1e-9);
}

TEST(Rotation, DecomposeComposeIsIdentityAwayFromGimbalLock)
{
  synth::Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const RotationTriple t{
      rng.uniform(-kPi, kPi), rng.uniform(-kPi / 2 + 1e-3, kPi / 2 - 1e-3), rng.uniform(-kPi, kPi)};
    const RotationTriple back = decompose_rotation(compose_rotation(t));
    EXPECT_NEAR(angle_diff(back.yaw, t.yaw), 0.0, 1e-9);
    EXPECT_NEAR(angle_diff(back.pitch, t.pitch), 0.0, 1e-9);
    EXPECT_NEAR(angle_diff(back.roll, t.roll), 0.0, 1e-9);
    EXPECT_TRUE(compose_rotation(back).isApprox(compose_rotation(t), 1e-9));
  }
}

TEST(Rotation, GimbalLockIsReported)
{
  for (const double yaw : {0.0, 0.7, -2.0}) {
    try {
      decompose_rotation(compose_rotation({yaw, kPi / 2, 0.3}));
      FAIL();
    } catch (const Error & e) {
      EXPECT_EQ(e.kind(), ErrorKind::GimbalLock);
    }
  }
}

TEST(Camera, ValidationRejectsSingularBlock)
{
  CameraModel cam = CameraModel::pinhole(100, 100, 50, 50);
  EXPECT_NO_THROW(cam.validate());
  cam.projection(0, 0) = 0.0;
  cam.projection(0, 2) = 0.0;
  EXPECT_THROW(cam.validate(), Error);
  cam = CameraModel::pinhole(100, 100, 50, 50, 0.0, 10.0);
  EXPECT_THROW(cam.validate(), Error);
}

TEST(Camera, CenterIsNullVector)
{
  const auto cam = kitti_like();
  const Eigen::Vector3d h = cam.projection * cam.center().homogeneous();
  EXPECT_LT(h.norm(), 1e-9);
}
