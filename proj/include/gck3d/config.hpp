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
 * @file config.hpp
 *
 * Run configuration. A config file is JSON; every member is optional and
 * missing members keep their defaults, so `{"version": 1}` is the default
 * configuration. Unknown members are rejected to catch typos.
 */

#ifndef GCK3D__CONFIG_HPP_
#define GCK3D__CONFIG_HPP_

#include "gck3d/error.hpp"
#include "gck3d/io.hpp"
#include "gck3d/lifting.hpp"
#include "gck3d/losses.hpp"
#include "gck3d/metrics.hpp"
#include "gck3d/synth.hpp"

#include <cstdlib>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace gck3d::config
{

using io::Json;

constexpr int kConfigVersion = 1;
constexpr const char * kConfigEnv = "GCK3D_CONFIG";

struct Tolerances
{
  double origin{1e-6};
  double dims{1e-9};
  double angles{1e-9};
};

struct RunConfig
{
  ClassPriors priors{};
  losses::LossWeights weights{};
  losses::FocalParams focal{};
  EvalConfig eval{};
  Tolerances roundtrip{};
  synth::SceneSpec synth{};
  unsigned jobs{0};  ///< 0 selects every available core

  unsigned effective_jobs() const { return jobs == 0 ? default_jobs() : jobs; }

  void validate() const
  {
    priors.validate();
    weights.validate();
    synth.validate();
    if (!(focal.gamma >= 0.0) || !(focal.alpha >= 0.0)) {
      throw Error(ErrorKind::SchemaViolation, "/focal: parameters must be non-negative");
    }
    for (const auto & [cls, t] : eval.iou_min) {
      if (!(t >= 0.0 && t <= 1.0)) {
        throw Error(ErrorKind::SchemaViolation, "/eval/iou_min/" + cls + ": must lie in [0, 1]");
      }
    }
    if (!(roundtrip.origin >= 0.0) || !(roundtrip.dims >= 0.0) || !(roundtrip.angles >= 0.0)) {
      throw Error(ErrorKind::SchemaViolation, "/roundtrip_tolerance: must be non-negative");
    }
  }
};

inline const char * to_string(RecallGrid g)
{
  return g == RecallGrid::Deployed ? "deployed" : "inclusive";
}

namespace detail
{

inline Json thresholds_json(const DifficultyThresholds & t)
{
  return {{"min_height", t.min_height}, {"max_occlusion", t.max_occlusion},
          {"max_truncation", t.max_truncation}};
}

inline Json range_json(const synth::Range & r) { return Json::array({r.min, r.max}); }

/// Optional-member reader that rejects unknown keys.
class Section
{
public:
  Section(const Json & j, std::string path) : j_(j), path_(std::move(path))
  {
    if (!j_.is_object()) {
      fail(path_, "expected an object");
    }
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      keys_.push_back(it.key());
    }
  }

  [[noreturn]] static void fail(const std::string & path, const std::string & what)
  {
    throw Error(ErrorKind::SchemaViolation, (path.empty() ? "/" : path) + ": " + what);
  }

  std::string child(const std::string & key) const { return path_ + "/" + key; }

  const Json * get(const std::string & key)
  {
    const auto it = j_.find(key);
    if (it == j_.end()) {
      return nullptr;
    }
    keys_.erase(std::find(keys_.begin(), keys_.end(), key));
    return &*it;
  }

  void number(const std::string & key, double & out)
  {
    if (const Json * v = get(key)) {
      if (!v->is_number() || !std::isfinite(v->get<double>())) {
        fail(child(key), "expected a finite number");
      }
      out = v->get<double>();
    }
  }

  template <typename Int>
  void integer(const std::string & key, Int & out)
  {
    if (const Json * v = get(key)) {
      if (!v->is_number_integer()) {
        fail(child(key), "expected an integer");
      }
      out = v->get<Int>();
    }
  }

  void range(const std::string & key, synth::Range & out)
  {
    if (const Json * v = get(key)) {
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
        fail(child(key), "expected [min, max]");
      }
      out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
    }
  }

  void section(const std::string & key, const std::function<void(Section &)> & fn)
  {
    if (const Json * v = get(key)) {
      Section s(*v, child(key));
      fn(s);
      s.finish();
    }
  }

  void finish() const
  {
    if (!keys_.empty()) {
      fail(child(keys_.front()), "unknown member");
    }
  }

private:
  const Json & j_;
  std::string path_;
  std::vector<std::string> keys_;
};

inline void read_thresholds(Section & s, DifficultyThresholds & t)
{
  s.number("min_height", t.min_height);
  s.integer("max_occlusion", t.max_occlusion);
  s.number("max_truncation", t.max_truncation);
}

}  // namespace detail

inline Json to_json(const RunConfig & c)
{
  Json j;
  j["version"] = kConfigVersion;
  Json priors = Json::object();
  for (const auto & [cls, p] : c.priors.table) {
    priors[cls] = {{"length_to_height", p.length_to_height}, {"width_to_height", p.width_to_height}};
  }
  j["priors"] = priors;
  const auto & w = c.weights;
  j["loss_weights"] = {{"alpha", w.alpha}, {"beta", w.beta}, {"gamma", w.gamma},
                       {"zeta", w.zeta},   {"eta", w.eta},   {"kappa", w.kappa},
                       {"mu", w.mu},       {"nu", w.nu},     {"xi", w.xi},
                       {"tau", w.tau}};
  j["focal"] = {{"gamma", c.focal.gamma}, {"alpha", c.focal.alpha}};

  Json ev;
  ev["classes"] = c.eval.classes;
  Json iou = Json::object();
  for (const auto & [cls, t] : c.eval.iou_min) {
    iou[cls] = t;
  }
  ev["iou_min"] = iou;
  ev["default_iou_min"] = c.eval.default_iou_min;
  ev["cd_thresholds"] = c.eval.cd_thresholds;
  ev["recall_grid"] = to_string(c.eval.grid);
  ev["difficulty"] = {{"easy", detail::thresholds_json(c.eval.profiles.easy)},
                      {"moderate", detail::thresholds_json(c.eval.profiles.moderate)},
                      {"hard", detail::thresholds_json(c.eval.profiles.hard)}};
  j["eval"] = ev;
  j["roundtrip_tolerance"] = {{"origin", c.roundtrip.origin}, {"dims", c.roundtrip.dims},
                              {"angles", c.roundtrip.angles}};

  const auto & s = c.synth;
  Json sy;
  sy["seed"] = s.seed;
  sy["num_frames"] = s.num_frames;
  sy["boxes_per_frame"] = Json::array({s.min_boxes, s.max_boxes});
  sy["depth"] = detail::range_json(s.depth);
  sy["yaw"] = detail::range_json(s.yaw);
  sy["pitch_roll_jitter"] = s.pitch_roll_jitter;
  sy["camera_height"] = detail::range_json(s.camera_height);
  sy["length"] = detail::range_json(s.length);
  sy["width"] = detail::range_json(s.width);
  sy["height"] = detail::range_json(s.height);
  sy["score"] = detail::range_json(s.score);
  sy["class"] = s.class_id;
  sy["intrinsics"] = {{"fx", s.fx}, {"fy", s.fy}, {"cx", s.cx}, {"cy", s.cy},
                      {"image_width", s.image_width}, {"image_height", s.image_height}};
  sy["noise"] = {{"depth_rel", s.noise.depth_rel},       {"side_ratio", s.noise.side_ratio},
                 {"delta_yaw", s.noise.delta_yaw},       {"delta_pitch", s.noise.delta_pitch},
                 {"delta_roll", s.noise.delta_roll},     {"delta_aspect", s.noise.delta_aspect},
                 {"box_pixels", s.noise.box_pixels}};
  sy["max_attempts"] = s.max_attempts;
  j["synth"] = sy;
  j["jobs"] = c.jobs;
  return j;
}

inline std::string dump(const RunConfig & c) { return to_json(c).dump(2) + "\n"; }

/// Overlays the members present in `text` onto the defaults.
inline RunConfig parse_config(std::string_view text)
{
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error & e) {
    throw Error(ErrorKind::SchemaViolation, std::string("/: invalid JSON: ") + e.what());
  }
  RunConfig c;
  detail::Section top(root, "");
  int version = kConfigVersion;
  top.integer("version", version);
  if (version != kConfigVersion) {
    detail::Section::fail("/version", "unsupported version " + std::to_string(version));
  }

  if (const Json * p = top.get("priors")) {
    if (!p->is_object()) {
      detail::Section::fail("/priors", "expected an object");
    }
    c.priors.table.clear();
    for (auto it = p->begin(); it != p->end(); ++it) {
      detail::Section s(it.value(), "/priors/" + it.key());
      AspectPrior a;
      s.number("length_to_height", a.length_to_height);
      s.number("width_to_height", a.width_to_height);
      s.finish();
      c.priors.table[it.key()] = a;
    }
  }
  top.section("loss_weights", [&](detail::Section & s) {
    auto & w = c.weights;
    s.number("alpha", w.alpha);
    s.number("beta", w.beta);
    s.number("gamma", w.gamma);
    s.number("zeta", w.zeta);
    s.number("eta", w.eta);
    s.number("kappa", w.kappa);
    s.number("mu", w.mu);
    s.number("nu", w.nu);
    s.number("xi", w.xi);
    s.number("tau", w.tau);
  });
  top.section("focal", [&](detail::Section & s) {
    s.number("gamma", c.focal.gamma);
    s.number("alpha", c.focal.alpha);
  });
  top.section("eval", [&](detail::Section & s) {
    if (const Json * v = s.get("classes")) {
      if (!v->is_array()) {
        detail::Section::fail(s.child("classes"), "expected an array of strings");
      }
      c.eval.classes.clear();
      for (const auto & e : *v) {
        if (!e.is_string()) {
          detail::Section::fail(s.child("classes"), "expected an array of strings");
        }
        c.eval.classes.push_back(e.get<std::string>());
      }
    }
    if (const Json * v = s.get("iou_min")) {
      if (!v->is_object()) {
        detail::Section::fail(s.child("iou_min"), "expected an object");
      }
      c.eval.iou_min.clear();
      for (auto it = v->begin(); it != v->end(); ++it) {
        if (!it.value().is_number()) {
          detail::Section::fail(s.child("iou_min") + "/" + it.key(), "expected a number");
        }
        c.eval.iou_min[it.key()] = it.value().get<double>();
      }
    }
    s.number("default_iou_min", c.eval.default_iou_min);
    if (const Json * v = s.get("cd_thresholds")) {
      if (!v->is_array() || v->empty()) {
        detail::Section::fail(s.child("cd_thresholds"), "expected a non-empty array of numbers");
      }
      c.eval.cd_thresholds.clear();
      for (const auto & e : *v) {
        if (!e.is_number() || !(e.get<double>() > 0.0)) {
          detail::Section::fail(s.child("cd_thresholds"), "thresholds must be positive numbers");
        }
        c.eval.cd_thresholds.push_back(e.get<double>());
      }
    }
    if (const Json * v = s.get("recall_grid")) {
      const std::string g = v->is_string() ? v->get<std::string>() : "";
      if (g == "inclusive") {
        c.eval.grid = RecallGrid::Inclusive;
      } else if (g == "deployed") {
        c.eval.grid = RecallGrid::Deployed;
      } else {
        detail::Section::fail(s.child("recall_grid"), "expected 'inclusive' or 'deployed'");
      }
    }
    s.section("difficulty", [&](detail::Section & d) {
      d.section("easy", [&](detail::Section & t) { detail::read_thresholds(t, c.eval.profiles.easy); });
      d.section("moderate", [&](detail::Section & t) {
        detail::read_thresholds(t, c.eval.profiles.moderate);
      });
      d.section("hard", [&](detail::Section & t) { detail::read_thresholds(t, c.eval.profiles.hard); });
    });
  });
  top.section("roundtrip_tolerance", [&](detail::Section & s) {
    s.number("origin", c.roundtrip.origin);
    s.number("dims", c.roundtrip.dims);
    s.number("angles", c.roundtrip.angles);
  });
  top.section("synth", [&](detail::Section & s) {
    auto & sp = c.synth;
    s.integer("seed", sp.seed);
    s.integer("num_frames", sp.num_frames);
    if (const Json * v = s.get("boxes_per_frame")) {
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number_integer() ||
          !(*v)[1].is_number_integer()) {
        detail::Section::fail(s.child("boxes_per_frame"), "expected [min, max] integers");
      }
      sp.min_boxes = (*v)[0].get<int>();
      sp.max_boxes = (*v)[1].get<int>();
    }
    s.range("depth", sp.depth);
    s.range("yaw", sp.yaw);
    s.number("pitch_roll_jitter", sp.pitch_roll_jitter);
    s.range("camera_height", sp.camera_height);
    s.range("length", sp.length);
    s.range("width", sp.width);
    s.range("height", sp.height);
    s.range("score", sp.score);
    if (const Json * v = s.get("class")) {
      if (!v->is_string()) {
        detail::Section::fail(s.child("class"), "expected a string");
      }
      sp.class_id = v->get<std::string>();
    }
    s.section("intrinsics", [&](detail::Section & k) {
      k.number("fx", sp.fx);
      k.number("fy", sp.fy);
      k.number("cx", sp.cx);
      k.number("cy", sp.cy);
      k.number("image_width", sp.image_width);
      k.number("image_height", sp.image_height);
    });
    s.section("noise", [&](detail::Section & n) {
      n.number("depth_rel", sp.noise.depth_rel);
      n.number("side_ratio", sp.noise.side_ratio);
      n.number("delta_yaw", sp.noise.delta_yaw);
      n.number("delta_pitch", sp.noise.delta_pitch);
      n.number("delta_roll", sp.noise.delta_roll);
      n.number("delta_aspect", sp.noise.delta_aspect);
      n.number("box_pixels", sp.noise.box_pixels);
    });
    s.integer("max_attempts", sp.max_attempts);
  });
  top.integer("jobs", c.jobs);
  top.finish();

  try {
    c.validate();
  } catch (const Error & e) {
    if (e.kind() == ErrorKind::SchemaViolation) {
      throw;
    }
    throw Error(ErrorKind::SchemaViolation, std::string("/: ") + e.what());
  }
  return c;
}

/**
 * Config from `path`, else from $GCK3D_CONFIG, else the defaults.
 * `source` receives the file that was read, or is left empty.
 */
inline RunConfig load_config(const std::string & path, std::string * source = nullptr)
{
  std::string chosen = path;
  if (chosen.empty()) {
    if (const char * env = std::getenv(kConfigEnv); env != nullptr && *env != '\0') {
      chosen = env;
    }
  }
  if (source != nullptr) {
    *source = chosen;
  }
  if (chosen.empty()) {
    return RunConfig{};
  }
  return parse_config(io::read_file(chosen));
}

}  // namespace gck3d::config

#endif  // GCK3D__CONFIG_HPP_
