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

// gck3d command-line tool: lift, eval, roundtrip, synth, config.
//
// Exit codes: 0 success, 1 tolerance failure, 2 input error.

#include "gck3d/config.hpp"
#include "gck3d/io.hpp"
#include "gck3d/lifting.hpp"
#include "gck3d/metrics.hpp"
#include "gck3d/report.hpp"
#include "gck3d/synth.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace gck3d;

namespace
{

constexpr int kOk = 0;
constexpr int kToleranceFailure = 1;
constexpr int kInputError = 2;

/// Raised for problems with user input that are not library errors.
struct InputError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct Globals
{
  std::string config_path;
  unsigned jobs{0};
  config::RunConfig cfg;

  void load()
  {
    std::string source;
    cfg = config::load_config(config_path, &source);
    if (jobs != 0) {
      cfg.jobs = jobs;
    }
    cfg.eval.jobs = cfg.effective_jobs();
  }
};

/// Sorted stems of `*.ext` files directly under `dir`.
std::map<std::string, fs::path> files_by_stem(const fs::path & dir, const std::string & ext)
{
  if (!fs::is_directory(dir)) {
    throw InputError("not a directory: " + dir.string());
  }
  std::map<std::string, fs::path> out;
  for (const auto & e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ext) {
      out.emplace(e.path().stem().string(), e.path());
    }
  }
  return out;
}

void write_or_throw(const fs::path & path, const std::string & content)
{
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  io::write_file(path.string(), content);
}

// ---------------------------------------------------------------------------
// lift

struct LiftOptions
{
  std::string params;
  std::string calib;
  std::string out;
  std::vector<double> image_size{1242.0, 375.0};
};

int cmd_lift(const Globals & g, const LiftOptions & o)
{
  CameraModel cam = io::parse_kitti_calib(io::read_file(o.calib));
  cam.image_width = o.image_size[0];
  cam.image_height = o.image_size[1];

  const std::string text = io::read_file(o.params);
  struct Record
  {
    int line;
    GckParams params;
  };
  std::vector<Record> records;
  std::vector<std::string> problems;
  int n = 0;
  for (const auto line : io::split_lines(text)) {
    ++n;
    if (io::is_blank(line) || line.front() == '#') {
      continue;
    }
    try {
      records.push_back({n, io::parse_params_line(line, n)});
    } catch (const ParseError & e) {
      problems.push_back(o.params + ":" + std::to_string(e.line()) + ": " + e.what());
    }
  }

  std::vector<std::optional<Box3D>> boxes(records.size());
  std::vector<std::string> lift_errors(records.size());
  parallel_for(records.size(), g.cfg.effective_jobs(), [&](std::size_t i) {
    try {
      boxes[i] = lift(records[i].params, cam, g.cfg.priors).box;
    } catch (const Error & e) {
      lift_errors[i] = e.what();
    }
  });

  std::vector<io::KittiLabelRecord> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (boxes[i]) {
      out.push_back(io::to_kitti(*boxes[i], &cam));
    } else {
      problems.push_back(o.params + ":" + std::to_string(records[i].line) + ": " + lift_errors[i]);
    }
  }
  write_or_throw(o.out, io::format_kitti_labels(out));
  std::cerr << "lifted " << out.size() << " of " << out.size() + problems.size() << " records\n";
  for (const auto & p : problems) {
    std::cerr << p << "\n";
  }
  return problems.empty() ? kOk : kInputError;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions
{
  std::string pred_dir;
  std::string gt_dir;
  std::string calib_dir;
  std::string scene_dir;
  std::string json_out;
  std::string csv_out;
  bool deployed{false};
};

std::vector<GtBox> read_ground_truth(const fs::path & path)
{
  std::vector<GtBox> out;
  for (const auto & r : io::parse_kitti_labels(io::read_file(path.string()))) {
    if (r.type == "DontCare") {
      continue;
    }
    GtBox g = io::to_gt(r);
    if (!g.box.valid() || !g.attributes_valid()) {
      throw InputError(path.string() + ": invalid ground-truth record of type " + r.type);
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<Box3D> read_predictions(const fs::path & path)
{
  std::vector<Box3D> out;
  for (const auto & r : io::parse_kitti_labels(io::read_file(path.string()))) {
    if (r.type == "DontCare") {
      continue;
    }
    Box3D b = io::to_box(r);
    if (!b.valid()) {
      throw InputError(path.string() + ": invalid predicted box of type " + r.type);
    }
    out.push_back(std::move(b));
  }
  return out;
}

/// Prefixes parse diagnostics with the offending file.
template <typename Fn>
auto with_file(const fs::path & path, Fn && fn)
{
  try {
    return fn();
  } catch (const Error & e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::vector<FrameData> kitti_frames(const EvalOptions & o)
{
  const auto gts = files_by_stem(o.gt_dir, ".txt");
  const auto preds = files_by_stem(o.pred_dir, ".txt");
  for (const auto & [stem, path] : preds) {
    if (gts.count(stem) == 0) {
      throw InputError("prediction " + path.string() + " has no ground-truth frame");
    }
  }
  if (!o.calib_dir.empty()) {
    const auto calibs = files_by_stem(o.calib_dir, ".txt");
    for (const auto & [stem, path] : gts) {
      const auto it = calibs.find(stem);
      if (it == calibs.end()) {
        throw InputError("frame " + stem + " has no calibration file");
      }
      with_file(it->second, [&] { return io::parse_kitti_calib(io::read_file(it->second.string())); });
    }
  }
  std::vector<FrameData> frames;
  for (const auto & [stem, path] : gts) {
    FrameData f;
    f.name = stem;
    f.ground_truth = with_file(path, [&] { return read_ground_truth(path); });
    const auto it = preds.find(stem);
    if (it != preds.end()) {
      f.detections = with_file(it->second, [&] { return read_predictions(it->second); });
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<FrameData> scene_frames(const Globals & g, const EvalOptions & o)
{
  const auto scenes = files_by_stem(o.scene_dir, ".json");
  std::vector<io::SceneFile> loaded;
  for (const auto & [stem, path] : scenes) {
    auto l = with_file(path, [&] { return io::load_scene(io::read_file(path.string()), &g.cfg.priors); });
    for (const auto & w : l.warnings) {
      std::cerr << path.string() << ": warning: " << w << "\n";
    }
    loaded.push_back(std::move(l.scene));
  }
  std::vector<FrameData> frames(loaded.size());
  std::vector<std::vector<std::pair<std::size_t, std::string>>> failures(loaded.size());
  parallel_for(loaded.size(), g.cfg.effective_jobs(), [&](std::size_t i) {
    auto lifted = io::lift_scene(loaded[i], g.cfg.priors);
    frames[i] = std::move(lifted.frame);
    failures[i] = std::move(lifted.failures);
  });
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    for (const auto & [index, msg] : failures[i]) {
      std::cerr << loaded[i].name << ": warning: detection " << index << " dropped: " << msg << "\n";
    }
  }
  return frames;
}

int cmd_eval(Globals & g, const EvalOptions & o)
{
  if (o.deployed) {
    g.cfg.eval.grid = RecallGrid::Deployed;
  }
  const bool scene_mode = !o.scene_dir.empty();
  if (scene_mode == (!o.gt_dir.empty() || !o.pred_dir.empty())) {
    throw InputError("give either --scenes or both --pred and --gt");
  }
  if (!scene_mode && (o.gt_dir.empty() || o.pred_dir.empty())) {
    throw InputError("--pred and --gt are both required");
  }
  const auto frames = scene_mode ? scene_frames(g, o) : kitti_frames(o);
  const EvalReport report = evaluate(frames, g.cfg.eval);

  std::cout << report::text_table(report);
  for (const auto & c : report.classes) {
    for (const auto & d : c.difficulties) {
      std::cout << c.class_id << " " << to_string(d.difficulty) << ": gt " << d.num_gt << ", tp "
                << d.tp << ", fp " << d.fp << ", fn " << d.fn << "\n";
    }
  }
  if (!o.json_out.empty()) {
    write_or_throw(o.json_out, report::to_json(report).dump(2) + "\n");
  }
  if (!o.csv_out.empty()) {
    write_or_throw(o.csv_out, report::pr_csv(report));
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// roundtrip

struct RoundtripOptions
{
  std::string scene;
  bool synth{false};
  bool no_stored{false};
  std::optional<std::uint64_t> seed;
  std::optional<int> frames;
};

struct Residual
{
  double origin{0.0};
  double dims{0.0};
  double angles{0.0};
  bool corner_mismatch{false};

  void merge(const Residual & r)
  {
    origin = std::max(origin, r.origin);
    dims = std::max(dims, r.dims);
    angles = std::max(angles, r.angles);
    corner_mismatch = corner_mismatch || r.corner_mismatch;
  }

  bool within(const config::Tolerances & t) const
  {
    return !corner_mismatch && origin < t.origin && dims < t.dims && angles < t.angles;
  }
};

Residual residual(const Box3D & got, const Box3D & want)
{
  Residual r;
  r.origin = (got.origin - want.origin).norm();
  r.dims = std::max(
    {std::abs(got.dims.length - want.dims.length), std::abs(got.dims.height - want.dims.height),
     std::abs(got.dims.width - want.dims.width)});
  const RotationTriple a = decompose_rotation(compose_rotation(got.angles));
  const RotationTriple b = decompose_rotation(compose_rotation(want.angles));
  r.angles = std::max(
    {std::abs(angle_diff(a.yaw, b.yaw)), std::abs(angle_diff(a.pitch, b.pitch)),
     std::abs(angle_diff(a.roll, b.roll))});
  r.corner_mismatch = got.corner != want.corner;
  return r;
}

struct SceneCheck
{
  Residual encoded;
  Residual stored;
  std::size_t checked{0};
  std::size_t stored_checked{0};
  std::vector<std::string> warnings;
  std::vector<std::string> failures;
};

SceneCheck check_scene(const io::SceneFile & s, const config::RunConfig & cfg, bool stored)
{
  SceneCheck out;
  const auto & tol = cfg.roundtrip;
  const bool paired = stored && s.detections.size() == s.ground_truth.size() &&
                      std::all_of(s.detections.begin(), s.detections.end(), [](const auto & d) {
                        return std::holds_alternative<GckParams>(d);
                      });
  for (std::size_t i = 0; i < s.ground_truth.size(); ++i) {
    const Box3D & gt = s.ground_truth[i].box;
    const std::string where = s.name + " box " + std::to_string(i);
    try {
      const Box3D back = lift(encode(gt, s.camera, cfg.priors), s.camera, cfg.priors).box;
      const Residual r = residual(back, gt);
      out.encoded.merge(r);
      ++out.checked;
      if (!r.within(tol)) {
        out.failures.push_back(where + ": encode/lift residual exceeds tolerance");
      }
    } catch (const Error & e) {
      out.warnings.push_back(where + " skipped: " + e.what());
      continue;
    }
    if (paired) {
      try {
        const Box3D lifted = lift(std::get<GckParams>(s.detections[i]), s.camera, cfg.priors).box;
        const Residual r = residual(lifted, gt);
        out.stored.merge(r);
        ++out.stored_checked;
        if (!r.within(tol)) {
          out.failures.push_back(where + ": stored parameters do not lift to the ground truth");
        }
      } catch (const Error & e) {
        out.failures.push_back(where + ": stored parameters fail to lift: " + e.what());
      }
    }
  }
  return out;
}

int cmd_roundtrip(const Globals & g, const RoundtripOptions & o)
{
  std::vector<io::SceneFile> scenes;
  bool stored = !o.no_stored;
  if (o.synth == !o.scene.empty()) {
    throw InputError("give either a scene file or --synth");
  }
  if (o.synth) {
    synth::SceneSpec spec = g.cfg.synth;
    if (o.seed) {
      spec.seed = *o.seed;
    }
    if (o.frames) {
      spec.num_frames = *o.frames;
    }
    stored = stored && spec.noise.zero();
    scenes = synth::generate(spec, g.cfg.priors, g.cfg.effective_jobs());
  } else {
    auto l = with_file(o.scene, [&] { return io::load_scene(io::read_file(o.scene), &g.cfg.priors); });
    for (const auto & w : l.warnings) {
      std::cerr << o.scene << ": warning: " << w << "\n";
    }
    scenes.push_back(std::move(l.scene));
  }

  std::vector<SceneCheck> checks(scenes.size());
  parallel_for(scenes.size(), g.cfg.effective_jobs(), [&](std::size_t i) {
    checks[i] = check_scene(scenes[i], g.cfg, stored);
  });

  SceneCheck total;
  for (const auto & c : checks) {
    total.encoded.merge(c.encoded);
    total.stored.merge(c.stored);
    total.checked += c.checked;
    total.stored_checked += c.stored_checked;
    for (const auto & w : c.warnings) {
      std::cerr << "warning: " << w << "\n";
      total.warnings.push_back(w);
    }
    for (const auto & f : c.failures) {
      std::cerr << "error: " << f << "\n";
      total.failures.push_back(f);
    }
  }
  std::printf("boxes checked:        %zu\n", total.checked);
  std::printf("boxes skipped:        %zu\n", total.warnings.size());
  std::printf("max origin residual:  %.3e m\n", total.encoded.origin);
  std::printf("max dims residual:    %.3e m\n", total.encoded.dims);
  std::printf("max angle residual:   %.3e rad\n", total.encoded.angles);
  if (total.stored_checked > 0) {
    std::printf("stored params checked: %zu\n", total.stored_checked);
    std::printf("stored max origin:    %.3e m\n", total.stored.origin);
    std::printf("stored max dims:      %.3e m\n", total.stored.dims);
    std::printf("stored max angle:     %.3e rad\n", total.stored.angles);
  }
  std::printf("result:               %s\n", total.failures.empty() ? "ok" : "FAIL");
  return total.failures.empty() ? kOk : kToleranceFailure;
}

// ---------------------------------------------------------------------------
// synth

struct SynthOptions
{
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> frames;
  std::optional<double> depth_noise;
  bool kitti{false};
};

int cmd_synth(const Globals & g, const SynthOptions & o)
{
  synth::SceneSpec spec = g.cfg.synth;
  if (o.seed) {
    spec.seed = *o.seed;
  }
  if (o.frames) {
    spec.num_frames = *o.frames;
  }
  if (o.depth_noise) {
    spec.noise.depth_rel = *o.depth_noise;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto scenes = synth::generate(spec, g.cfg.priors, g.cfg.effective_jobs());
  const fs::path root(o.out_dir);
  std::size_t boxes = 0;
  for (const auto & s : scenes) {
    boxes += s.ground_truth.size();
    write_or_throw(root / "scenes" / (s.name + ".json"), io::save_scene(s));
    if (!o.kitti) {
      continue;
    }
    std::vector<io::KittiLabelRecord> labels;
    std::string params;
    for (std::size_t i = 0; i < s.ground_truth.size(); ++i) {
      const GtBox & gt = s.ground_truth[i];
      io::KittiLabelRecord r = io::to_kitti(gt.box, &s.camera, false);
      r.truncated = gt.truncation;
      r.occluded = gt.occlusion;
      labels.push_back(r);
      params += io::format_params_line(std::get<GckParams>(s.detections[i])) + "\n";
    }
    write_or_throw(root / "label_2" / (s.name + ".txt"), io::format_kitti_labels(labels));
    write_or_throw(root / "params" / (s.name + ".txt"), params);
    io::KittiCalib calib;
    std::vector<double> p2;
    for (int k = 0; k < 12; ++k) {
      p2.push_back(s.camera.projection(k / 4, k % 4));
    }
    calib.rows.emplace_back("P2", p2);
    write_or_throw(root / "calib" / (s.name + ".txt"), io::format_kitti_calib(calib));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "wrote " << scenes.size() << " frames, " << boxes << " boxes to " << o.out_dir << " in "
            << secs << " s\n";
  return kOk;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Lift, evaluate and synthesize monocular 3D car detections"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Config file (default: $GCK3D_CONFIG, then built-in)");
  app.add_option("--jobs", g.jobs, "Worker threads; 0 uses every core")->check(CLI::NonNegativeNumber);

  LiftOptions lift_o;
  auto * lift_cmd = app.add_subcommand("lift", "Lift parameter lines to KITTI prediction labels");
  lift_cmd->add_option("--params", lift_o.params, "Parameter file, one detection per line")->required();
  lift_cmd->add_option("--calib", lift_o.calib, "KITTI calibration file with a P2 row")->required();
  lift_cmd->add_option("--out", lift_o.out, "Output KITTI label file")->required();
  lift_cmd->add_option("--image-size", lift_o.image_size, "Image width and height for 2D boxes")
    ->expected(2);

  EvalOptions eval_o;
  auto * eval_cmd = app.add_subcommand("eval", "Evaluate predictions against ground truth");
  eval_cmd->add_option("--pred", eval_o.pred_dir, "Directory of KITTI prediction labels");
  eval_cmd->add_option("--gt", eval_o.gt_dir, "Directory of KITTI ground-truth labels");
  eval_cmd->add_option("--calib", eval_o.calib_dir, "Directory of KITTI calibration files");
  eval_cmd->add_option("--scenes", eval_o.scene_dir, "Directory of scene JSON files");
  eval_cmd->add_option("--json", eval_o.json_out, "Write the report as JSON");
  eval_cmd->add_option("--csv", eval_o.csv_out, "Write precision/recall curves as CSV");
  eval_cmd->add_flag("--deployed-grid", eval_o.deployed, "Use recall points (k+1)/40");

  RoundtripOptions rt_o;
  auto * rt_cmd = app.add_subcommand("roundtrip", "Check that encode then lift reproduces boxes");
  rt_cmd->add_option("scene", rt_o.scene, "Scene JSON file");
  rt_cmd->add_flag("--synth", rt_o.synth, "Check freshly generated synthetic frames");
  rt_cmd->add_flag("--no-stored", rt_o.no_stored, "Skip checking stored parameter detections");
  rt_cmd->add_option("--seed", rt_o.seed, "Synthetic seed override");
  rt_cmd->add_option("--frames", rt_o.frames, "Synthetic frame count override");

  SynthOptions synth_o;
  auto * synth_cmd = app.add_subcommand("synth", "Generate synthetic scenes");
  synth_cmd->add_option("--out", synth_o.out_dir, "Output directory")->required();
  synth_cmd->add_option("--seed", synth_o.seed, "Seed override");
  synth_cmd->add_option("--frames", synth_o.frames, "Frame count override");
  synth_cmd->add_option("--depth-noise", synth_o.depth_noise, "Relative depth noise (std dev)");
  synth_cmd->add_flag("--kitti", synth_o.kitti, "Also write label_2/, params/ and calib/");

  auto * config_cmd = app.add_subcommand("config", "Print the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    g.load();
    if (*lift_cmd) {
      return cmd_lift(g, lift_o);
    }
    if (*eval_cmd) {
      return cmd_eval(g, eval_o);
    }
    if (*rt_cmd) {
      return cmd_roundtrip(g, rt_o);
    }
    if (*synth_cmd) {
      return cmd_synth(g, synth_o);
    }
    if (*config_cmd) {
      std::cout << config::dump(g.cfg);
      return kOk;
    }
  } catch (const InputError & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const fs::filesystem_error & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
