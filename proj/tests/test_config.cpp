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

#include "gck3d/config.hpp"
#include "gck3d/report.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

using namespace gck3d;
using namespace gck3d::config;

namespace
{

std::string temp_file(const std::string & name, const std::string & content)
{
  const auto path = std::filesystem::temp_directory_path() / ("gck3d_test_" + name);
  io::write_file(path.string(), content);
  return path.string();
}

std::string schema_error(const std::string & text)
{
  try {
    parse_config(text);
  } catch (const Error & e) {
    EXPECT_EQ(e.kind(), ErrorKind::SchemaViolation);
    return e.what();
  }
  ADD_FAILURE() << "accepted: " << text;
  return {};
}

}  // namespace

TEST(Config, DefaultConstants)
{
  const RunConfig c;
  EXPECT_EQ(c.priors.at("Car").length_to_height, 2.8);
  EXPECT_EQ(c.priors.at("Car").width_to_height, 1.1);
  const auto & w = c.weights;
  for (const double v : {w.alpha, w.beta, w.gamma, w.zeta, w.kappa, w.mu, w.nu, w.xi}) {
    EXPECT_EQ(v, 1.0);
  }
  EXPECT_EQ(w.eta, 0.5);
  EXPECT_EQ(w.tau, 2.0);
  EXPECT_EQ(c.focal.gamma, 2.0);
  EXPECT_EQ(c.focal.alpha, 0.25);
  EXPECT_EQ(c.eval.iou_threshold("Car"), 0.7);
  EXPECT_EQ(c.eval.default_iou_min, 0.5);
  EXPECT_EQ(c.eval.grid, RecallGrid::Inclusive);
  EXPECT_EQ(c.eval.cd_thresholds, (std::vector<double>{0.5, 1.0, 2.0, 4.0}));
  EXPECT_EQ(c.eval.profiles.moderate.min_height, 25.0);
  EXPECT_EQ(c.eval.profiles.moderate.max_occlusion, 1);
  EXPECT_EQ(c.eval.profiles.hard.max_truncation, 0.5);
  EXPECT_EQ(c.roundtrip.origin, 1e-6);
  EXPECT_EQ(c.roundtrip.dims, 1e-9);
  EXPECT_EQ(c.roundtrip.angles, 1e-9);
  EXPECT_EQ(c.jobs, 0u);
  EXPECT_GE(c.effective_jobs(), 1u);
}

TEST(Config, DumpParsesBackToSameDump)
{
  const std::string text = dump(RunConfig{});
  const RunConfig c = parse_config(text);
  EXPECT_EQ(dump(c), text);
}

TEST(Config, EmptyObjectKeepsDefaults)
{
  EXPECT_EQ(dump(parse_config("{}")), dump(RunConfig{}));
}

TEST(Config, OverlayChangesOnlyNamedMembers)
{
  const RunConfig c = parse_config(R"({
    "loss_weights": {"tau": 3.5},
    "eval": {"recall_grid": "deployed", "iou_min": {"Car": 0.5, "Pedestrian": 0.25},
             "classes": ["Car", "Pedestrian"]},
    "synth": {"seed": 99, "boxes_per_frame": [2, 4], "noise": {"depth_rel": 0.05}},
    "priors": {"Car": {"length_to_height": 3.0, "width_to_height": 1.2},
               "Pedestrian": {"length_to_height": 0.5, "width_to_height": 0.4}},
    "jobs": 2
  })");
  EXPECT_EQ(c.weights.tau, 3.5);
  EXPECT_EQ(c.weights.eta, 0.5);
  EXPECT_EQ(c.eval.grid, RecallGrid::Deployed);
  EXPECT_EQ(c.eval.iou_threshold("Pedestrian"), 0.25);
  EXPECT_EQ(c.eval.iou_threshold("Cyclist"), 0.5);
  EXPECT_EQ(c.eval.classes.size(), 2u);
  EXPECT_EQ(c.synth.seed, 99u);
  EXPECT_EQ(c.synth.min_boxes, 2);
  EXPECT_EQ(c.synth.max_boxes, 4);
  EXPECT_EQ(c.synth.noise.depth_rel, 0.05);
  EXPECT_EQ(c.synth.depth.max, 60.0);
  EXPECT_EQ(c.priors.at("Pedestrian").width_to_height, 0.4);
  EXPECT_EQ(c.jobs, 2u);
  EXPECT_EQ(c.effective_jobs(), 2u);
}

TEST(Config, UnknownKeysAreRejectedWithPath)
{
  EXPECT_NE(schema_error(R"({"bogus": 1})").find("/bogus"), std::string::npos);
  EXPECT_NE(schema_error(R"({"loss_weights": {"lambda": 1}})").find("/loss_weights/lambda"), std::string::npos);
  EXPECT_NE(
    schema_error(R"({"eval": {"difficulty": {"easy": {"min_hieght": 40}}}})")
      .find("/eval/difficulty/easy/min_hieght"),
    std::string::npos);
  EXPECT_NE(
    schema_error(R"({"priors": {"Car": {"length_to_height": 2.8, "width_to_height": 1.1, "x": 1}}})")
      .find("/priors/Car/x"),
    std::string::npos);
}

TEST(Config, InvalidValuesAreRejected)
{
  schema_error(R"({"version": 2})");
  schema_error(R"({"loss_weights": {"tau": -1}})");
  schema_error(R"({"loss_weights": {"tau": "two"}})");
  schema_error(R"({"eval": {"recall_grid": "eleven"}})");
  schema_error(R"({"eval": {"iou_min": {"Car": 1.5}}})");
  schema_error(R"({"eval": {"cd_thresholds": []}})");
  schema_error(R"({"synth": {"boxes_per_frame": [5, 1]}})");
  schema_error(R"({"priors": {"Car": {"length_to_height": 0}}})");
  schema_error(R"({"jobs": 1.5})");
  schema_error("[1, 2]");
  schema_error("{");
}

TEST(Config, ExplicitPathThenEnvironmentThenDefaults)
{
  const std::string a = temp_file("a.json", R"({"loss_weights": {"tau": 4}})");
  const std::string b = temp_file("b.json", R"({"loss_weights": {"tau": 5}})");
  ::unsetenv(kConfigEnv);
  std::string source = "unset";
  EXPECT_EQ(load_config("", &source).weights.tau, 2.0);
  EXPECT_TRUE(source.empty());

  ::setenv(kConfigEnv, b.c_str(), 1);
  EXPECT_EQ(load_config("", &source).weights.tau, 5.0);
  EXPECT_EQ(source, b);
  EXPECT_EQ(load_config(a, &source).weights.tau, 4.0);
  EXPECT_EQ(source, a);
  ::unsetenv(kConfigEnv);

  EXPECT_THROW(load_config("/nonexistent/gck3d.json"), Error);
}

TEST(Report, AbsentValuesSerializeAsNull)
{
  EvalReport r;
  ClassResult c;
  c.class_id = "Car";
  DifficultyResult d;
  d.difficulty = Difficulty::Moderate;
  d.cd_ap.push_back({2.0, std::nullopt});
  c.difficulties.push_back(d);
  r.classes.push_back(c);
  const io::Json j = report::to_json(r);
  const auto & m = j["classes"][0]["difficulties"][0];
  EXPECT_TRUE(m["ap3d"].is_null());
  EXPECT_TRUE(m["aos"].is_null());
  const std::string table = report::text_table(r);
  EXPECT_NE(table.find('-'), std::string::npos);
  EXPECT_EQ(report::pr_csv(r).rfind("class,difficulty,index,recall,precision,similarity", 0), 0u);
}
