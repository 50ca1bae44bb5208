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

#include "gck3d/boxes.hpp"
#include "gck3d/metrics.hpp"
#include "gck3d/synth.hpp"

#include <gtest/gtest.h>

using namespace gck3d;
using namespace gck3d::synth;

namespace
{

std::string concat(const std::vector<io::SceneFile> & frames)
{
  std::string s;
  for (const auto & f : frames) {
    s += io::save_scene(f);
  }
  return s;
}

std::vector<FrameData> lifted(const std::vector<io::SceneFile> & frames)
{
  std::vector<FrameData> out;
  for (const auto & f : frames) {
    const auto l = io::lift_scene(f, ClassPriors{});
    EXPECT_TRUE(l.failures.empty());
    out.push_back(l.frame);
  }
  return out;
}

}  // namespace

TEST(Rng, SplitMixReferenceValue)
{
  EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
}

TEST(Rng, EngineIsStandardMersenneTwister)
{
  std::mt19937_64 e;
  e.discard(9999);
  EXPECT_EQ(e(), 9981545732273789042ULL);
}

TEST(Rng, UniformUsesTop53Bits)
{
  Rng a(42);
  std::mt19937_64 e(splitmix64(42));
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.uniform(), static_cast<double>(e() >> 11) / 9007199254740992.0);
  }
}

TEST(Rng, NormalMoments)
{
  Rng rng(9);
  double sum = 0.0;
  double sq = 0.0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal(2.0, 0.5);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 2.0, 0.01);
  EXPECT_NEAR(std::sqrt(sq / n - mean * mean), 0.5, 0.01);
}

TEST(Rng, UniformIntCoversClosedRange)
{
  Rng rng(1);
  std::array<int, 5> hits{};
  for (int i = 0; i < 10000; ++i) {
    const int v = rng.uniform_int(1, 5);
    ASSERT_GE(v, 1);
    ASSERT_LE(v, 5);
    ++hits[static_cast<std::size_t>(v - 1)];
  }
  for (const int h : hits) {
    EXPECT_GT(h, 1800);
  }
}

TEST(Synth, SameSeedIsByteIdentical)
{
  SceneSpec spec;
  spec.seed = 77;
  spec.num_frames = 6;
  spec.noise.depth_rel = 0.05;
  EXPECT_EQ(concat(generate(spec)), concat(generate(spec)));
  SceneSpec other = spec;
  other.seed = 78;
  EXPECT_NE(concat(generate(spec)), concat(generate(other)));
}

TEST(Synth, IndependentOfJobCount)
{
  SceneSpec spec;
  spec.seed = 3;
  spec.num_frames = 12;
  spec.noise.delta_yaw = 0.05;
  EXPECT_EQ(concat(generate(spec, {}, 1)), concat(generate(spec, {}, 4)));
}

TEST(Synth, FrameDependsOnlyOnIndex)
{
  SceneSpec spec;
  spec.seed = 5;
  spec.num_frames = 3;
  const auto few = generate(spec);
  spec.num_frames = 8;
  const auto many = generate(spec);
  for (std::size_t i = 0; i < few.size(); ++i) {
    EXPECT_EQ(io::save_scene(few[i]), io::save_scene(many[i]));
  }
  EXPECT_EQ(many[7].name, "000007");
}

TEST(Synth, BoxesAreValidVisibleAndSeparated)
{
  SceneSpec spec;
  spec.seed = 21;
  spec.num_frames = 30;
  const auto frames = generate(spec);
  const CameraModel cam = spec.camera();
  std::size_t total = 0;
  for (const auto & f : frames) {
    ASSERT_EQ(f.detections.size(), f.ground_truth.size());
    EXPECT_LE(f.ground_truth.size(), 20u);
    total += f.ground_truth.size();
    for (std::size_t i = 0; i < f.ground_truth.size(); ++i) {
      const GtBox & g = f.ground_truth[i];
      ASSERT_TRUE(g.box.valid());
      EXPECT_TRUE(g.attributes_valid());
      EXPECT_EQ(g.box.closest_bottom_vertex(), 0u);
      EXPECT_GE(g.box.center().z(), spec.depth.min - 1e-9);
      EXPECT_LE(g.box.center().z(), spec.depth.max + 1e-9);
      EXPECT_LE(std::abs(g.box.angles.pitch), spec.pitch_roll_jitter);
      for (const auto & v : g.box.vertices()) {
        ASSERT_GT(v.z(), 0.0);
        const Point2 p = project(v, cam);
        EXPECT_GE(p.x(), 0.0);
        EXPECT_LE(p.x(), cam.image_width);
        EXPECT_GE(p.y(), 0.0);
        EXPECT_LE(p.y(), cam.image_height);
      }
      for (std::size_t j = 0; j < i; ++j) {
        EXPECT_EQ(bev_intersection_area(g.box, f.ground_truth[j].box), 0.0);
      }
    }
  }
  EXPECT_GT(total, 30u * 5u);
}

TEST(Synth, ZeroNoiseLiftsExactly)
{
  SceneSpec spec;
  spec.seed = 8;
  spec.num_frames = 10;
  for (const auto & f : generate(spec)) {
    const auto l = io::lift_scene(f, ClassPriors{});
    ASSERT_TRUE(l.failures.empty());
    for (std::size_t i = 0; i < f.ground_truth.size(); ++i) {
      const Box3D & g = f.ground_truth[i].box;
      const Box3D & d = l.frame.detections[i];
      EXPECT_LT((g.origin - d.origin).norm(), 1e-6);
      EXPECT_NEAR(g.dims.length, d.dims.length, 1e-6);
      EXPECT_NEAR(angle_diff(g.angles.yaw, d.angles.yaw), 0.0, 1e-6);
    }
  }
}

TEST(Synth, ZeroNoiseEvaluatesPerfectly)
{
  SceneSpec spec;
  spec.seed = 13;
  spec.num_frames = 40;
  const EvalReport r = evaluate(lifted(generate(spec)), EvalConfig{});
  for (const auto & d : r.classes.at(0).difficulties) {
    if (d.num_gt == 0) {
      continue;
    }
    EXPECT_DOUBLE_EQ(*d.ap3d, 1.0) << to_string(d.difficulty);
    EXPECT_DOUBLE_EQ(*d.aos, 1.0) << to_string(d.difficulty);
    EXPECT_EQ(d.fp, 0u);
  }
}

TEST(Synth, DepthNoiseAtThirtyMetresLowersAp)
{
  SceneSpec spec;
  spec.seed = 4;
  spec.num_frames = 40;
  spec.depth = {29.0, 31.0};
  spec.noise.depth_rel = 0.05;
  const EvalReport r = evaluate(lifted(generate(spec)), EvalConfig{});
  const auto & moderate = r.classes.at(0).difficulties.at(1);
  ASSERT_TRUE(moderate.ap3d.has_value());
  // 5 % of 30 m is 1.5 m, well beyond what IoU 0.7 tolerates for a car.
  EXPECT_LT(*moderate.ap3d, 0.5);
  EXPECT_GT(moderate.fp, 0u);
  // Orientation is unaffected by depth noise.
  EXPECT_GT(*moderate.aos, 0.0);
  const EvalReport again = evaluate(lifted(generate(spec)), EvalConfig{});
  EXPECT_EQ(*again.classes[0].difficulties[1].ap3d, *moderate.ap3d);
}

TEST(Synth, SpecValidation)
{
  SceneSpec spec;
  EXPECT_NO_THROW(spec.validate());
  auto broken = spec;
  broken.min_boxes = 5;
  broken.max_boxes = 2;
  EXPECT_THROW(broken.validate(), Error);
  broken = spec;
  broken.depth = {10.0, 5.0};
  EXPECT_THROW(broken.validate(), Error);
  broken = spec;
  broken.noise.depth_rel = -0.1;
  EXPECT_THROW(broken.validate(), Error);
  broken = spec;
  broken.score = {0.5, 1.5};
  EXPECT_THROW(broken.validate(), Error);
  broken = spec;
  broken.class_id = "Truck";
  EXPECT_THROW(generate(broken), Error);
}
