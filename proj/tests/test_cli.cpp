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

// Drives the installed command-line binary end to end.

#include "gck3d/io.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

namespace fs = std::filesystem;
using gck3d::io::Json;
using gck3d::io::read_file;
using gck3d::io::write_file;

namespace
{

struct Result
{
  int code{-1};
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test
{
protected:
  void SetUp() override
  {
    const auto * info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("gck3d_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string & rel) const { return (dir_ / rel).string(); }

  void put(const std::string & rel, const std::string & content) const
  {
    fs::create_directories((dir_ / rel).parent_path());
    write_file(path(rel), content);
  }

  /// Runs the binary with `args`; `env` is prepended verbatim.
  Result run(const std::string & args, const std::string & env = "GCK3D_CONFIG=") const
  {
    const std::string out = path("stdout.txt");
    const std::string err = path("stderr.txt");
    const std::string cmd =
      env + " '" + std::string(GCK3D_CLI_PATH) + "' " + args + " >'" + out + "' 2>'" + err + "'";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(out);
    r.err = read_file(err);
    return r;
  }

  Json eval_json(const std::string & args)
  {
    const Result r = run("eval " + args + " --json '" + path("report.json") + "'");
    EXPECT_EQ(r.code, 0) << r.err;
    return Json::parse(read_file(path("report.json")));
  }

  fs::path dir_;
};

const std::string kCalib = "P2: 721.5377 0 609.5593 44.85728 0 721.5377 172.854 0.2163791 0 0 1 0.002745884\n";

/// Moderate-difficulty entry of the first class.
const Json & moderate(const Json & report) { return report["classes"][0]["difficulties"][1]; }

}  // namespace

TEST_F(Cli, HelpExitsCleanly)
{
  const Result r = run("--help");
  EXPECT_EQ(r.code, 0);
  for (const char * sub : {"lift", "eval", "roundtrip", "synth"}) {
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
  }
}

TEST_F(Cli, UnknownOptionIsInputError) { EXPECT_EQ(run("eval --bogus").code, 2); }

TEST_F(Cli, LiftMalformedInputReportsLines)
{
  put("calib.txt", kCalib);
  put(
    "params.txt",
    "Car 600 160 700 200 0.3 0 0 0 1 1 0.05 B R 0.4\n"
    "Car 600 160 700 200 0.3 0 0 0 1 1 0.05 X R 0.4\n"
    "Car 600 160 700 200 0.3 0 0 0 1 1\n");
  const Result r =
    run("lift --params '" + path("params.txt") + "' --calib '" + path("calib.txt") + "' --out '" +
        path("out.txt") + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("params.txt:2: "), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("field 12"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("params.txt:3: "), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("field 11"), std::string::npos) << r.err;
}

TEST_F(Cli, LiftMissingCalibProjection)
{
  put("calib.txt", "P0: 1 0 0 0 0 1 0 0 0 0 1 0\n");
  put("params.txt", "Car 600 160 700 200 0.3 0 0 0 1 1 0.05 B R 0.4\n");
  const Result r =
    run("lift --params '" + path("params.txt") + "' --calib '" + path("calib.txt") + "' --out '" +
        path("out.txt") + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("MissingProjection"), std::string::npos) << r.err;
}

TEST_F(Cli, ZeroNoiseSynthLiftsToGroundTruth)
{
  ASSERT_EQ(run("synth --kitti --frames 4 --seed 12 --out '" + path("syn") + "'").code, 0);
  fs::create_directories(path("lifted"));
  for (const auto & e : fs::directory_iterator(path("syn/params"))) {
    const std::string stem = e.path().stem().string();
    const Result r =
      run("lift --params '" + e.path().string() + "' --calib '" + path("syn/calib/" + stem + ".txt") +
          "' --out '" + path("lifted/" + stem + ".txt") + "'");
    ASSERT_EQ(r.code, 0) << r.err;
  }
  const Json rep = eval_json(
    "--pred '" + path("lifted") + "' --gt '" + path("syn/label_2") + "' --calib '" +
    path("syn/calib") + "'");
  for (const auto & d : rep["classes"][0]["difficulties"]) {
    if (d["num_gt"].get<int>() > 0) {
      EXPECT_EQ(d["ap3d"].get<double>(), 1.0);
      EXPECT_EQ(d["aos"].get<double>(), 1.0);
    }
  }
}

TEST_F(Cli, EvalGroundTruthAgainstItself)
{
  const std::string gt = std::string(GCK3D_TEST_DATA) + "/kitti/label_2";
  const Json rep = eval_json("--pred '" + gt + "' --gt '" + gt + "'");
  const Json & m = moderate(rep);
  EXPECT_EQ(m["ap3d"].get<double>(), 1.0);
  EXPECT_EQ(m["aos"].get<double>(), 1.0);
  EXPECT_EQ(m["fp"].get<int>(), 0);
  EXPECT_EQ(m["fn"].get<int>(), 0);
}

TEST_F(Cli, EvalThirteenCentimetreShiftScoresZero)
{
  // 4.7 x 1.8 x 1.4 m car; the prediction is shifted 0.13 m along every axis.
  put("gt/000000.txt", "Car 0 0 -1.61 560 150 660 210 1.4 1.8 4.7 1 1.6 20 -1.57\n");
  put("pred/000000.txt", "Car -1 -1 -1.61 560 150 660 210 1.4 1.8 4.7 1.13 1.73 20.13 -1.57 0.9\n");
  const Json rep = eval_json("--pred '" + path("pred") + "' --gt '" + path("gt") + "'");
  const Json & m = moderate(rep);
  EXPECT_EQ(m["ap3d"].get<double>(), 0.0);
  EXPECT_EQ(m["tp"].get<int>(), 0);
  EXPECT_EQ(m["fp"].get<int>(), 1);
  EXPECT_EQ(m["fn"].get<int>(), 1);
}

TEST_F(Cli, EvalEmptyPredictionDirectory)
{
  const std::string gt = std::string(GCK3D_TEST_DATA) + "/kitti/label_2";
  fs::create_directories(path("empty"));
  const Result r = run("eval --pred '" + path("empty") + "' --gt '" + gt + "' --json '" + path("r.json") + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  const Json rep = Json::parse(read_file(path("r.json")));
  for (const auto & d : rep["classes"][0]["difficulties"]) {
    EXPECT_EQ(d["fn"], d["num_gt"]);
    if (d["num_gt"].get<int>() > 0) {
      EXPECT_EQ(d["ap3d"].get<double>(), 0.0);
    }
  }
  EXPECT_NE(r.out.find("Moderate"), std::string::npos);
}

TEST_F(Cli, EvalRejectsUnalignedFrames)
{
  const std::string gt = std::string(GCK3D_TEST_DATA) + "/kitti/label_2";
  put("pred/999999.txt", "");
  const Result r = run("eval --pred '" + path("pred") + "' --gt '" + gt + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("999999"), std::string::npos);
}

TEST_F(Cli, EvalWritesCsv)
{
  const std::string gt = std::string(GCK3D_TEST_DATA) + "/kitti/label_2";
  const Result r = run("eval --pred '" + gt + "' --gt '" + gt + "' --csv '" + path("pr.csv") + "'");
  ASSERT_EQ(r.code, 0);
  const std::string csv = read_file(path("pr.csv"));
  EXPECT_EQ(csv.rfind("class,difficulty,index,recall,precision,similarity\n", 0), 0u);
  EXPECT_NE(csv.find("Car,Moderate,39,"), std::string::npos);
}

TEST_F(Cli, RoundtripCleanCorruptedAndGimbalScenes)
{
  ASSERT_EQ(run("synth --frames 1 --seed 3 --out '" + path("syn") + "'").code, 0);
  const std::string scene = path("syn/scenes/000000.json");
  const Result clean = run("roundtrip '" + scene + "'");
  EXPECT_EQ(clean.code, 0) << clean.out << clean.err;
  EXPECT_NE(clean.out.find("result:               ok"), std::string::npos);

  Json j = Json::parse(read_file(scene));
  ASSERT_GE(j["ground_truth"].size(), 1u);
  Json broken = j;
  broken["ground_truth"][0]["angles"]["yaw"] = broken["ground_truth"][0]["angles"]["yaw"].get<double>() + 0.02;
  put("broken.json", broken.dump(2));
  const Result bad = run("roundtrip '" + path("broken.json") + "'");
  EXPECT_EQ(bad.code, 1) << bad.out;
  EXPECT_NE(bad.err.find("box 0"), std::string::npos);

  Json gimbal = j;
  gimbal["ground_truth"][0]["angles"]["pitch"] = 1.5707963267948966;
  put("gimbal.json", gimbal.dump(2));
  const Result skipped = run("roundtrip '" + path("gimbal.json") + "'");
  EXPECT_EQ(skipped.code, 0) << skipped.err;
  EXPECT_NE(skipped.err.find("skipped"), std::string::npos);
  EXPECT_NE(skipped.out.find("boxes skipped:        1"), std::string::npos);
}

TEST_F(Cli, RoundtripSynthetic)
{
  const Result r = run("--jobs 2 roundtrip --synth --frames 20 --seed 4");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(run("roundtrip").code, 2);
}

TEST_F(Cli, SynthIsDeterministicAcrossJobs)
{
  ASSERT_EQ(run("--jobs 1 synth --kitti --frames 6 --seed 9 --out '" + path("a") + "'").code, 0);
  ASSERT_EQ(run("--jobs 3 synth --kitti --frames 6 --seed 9 --out '" + path("b") + "'").code, 0);
  std::size_t files = 0;
  for (const auto & e : fs::recursive_directory_iterator(path("a"))) {
    if (!e.is_regular_file()) {
      continue;
    }
    const fs::path rel = fs::relative(e.path(), path("a"));
    EXPECT_EQ(read_file(e.path().string()), read_file((fs::path(path("b")) / rel).string())) << rel;
    ++files;
  }
  EXPECT_EQ(files, 6u * 4u);
}

TEST_F(Cli, ConfigFromEnvironmentAndBadConfig)
{
  put("cfg.json", R"({"loss_weights": {"tau": 7}})");
  const Result r = run("config", "GCK3D_CONFIG='" + path("cfg.json") + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["loss_weights"]["tau"], 7.0);

  put("bad.json", R"({"loss_weights": {"lambda": 7}})");
  const Result bad = run("--config '" + path("bad.json") + "' config");
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("/loss_weights/lambda"), std::string::npos);
}
