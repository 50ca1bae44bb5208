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
 * @file io.hpp
 *
 * KITTI label / calibration text, the per-detection parameter text format
 * and the JSON scene format.
 *
 * All numbers are read with std::from_chars and written with the shortest
 * representation that round-trips (std::to_chars), so neither direction
 * depends on the C locale.
 */

#ifndef GCK3D__IO_HPP_
#define GCK3D__IO_HPP_

#include "gck3d/box3d.hpp"
#include "gck3d/error.hpp"
#include "gck3d/lifting.hpp"
#include "gck3d/metrics.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace gck3d::io
{

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Text helpers

inline std::string format_double(double v)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s)
{
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

inline std::optional<int> parse_int(std::string_view s)
{
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    return std::nullopt;
  }
  return v;
}

inline std::vector<std::string_view> split_fields(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
      ++i;
    }
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
      ++i;
    }
    if (i > start) {
      out.push_back(line.substr(start, i - start));
    }
  }
  return out;
}

inline std::vector<std::string_view> split_lines(std::string_view text)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) {
        out.push_back(text.substr(start));
      }
      break;
    }
    out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

inline bool is_blank(std::string_view line) { return split_fields(line).empty(); }

inline std::string read_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::SchemaViolation, "cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string & path, const std::string & content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::SchemaViolation, "cannot write " + path);
  }
  out << content;
}

// ---------------------------------------------------------------------------
// KITTI labels

struct KittiLabelRecord
{
  std::string type;
  double truncated{0.0};
  int occluded{0};
  double alpha{0.0};
  Box2D bbox{};
  double height{0.0};
  double width{0.0};
  double length{0.0};
  Point3 location{Point3::Zero()};
  double rotation_y{0.0};
  std::optional<double> score;

  bool is_prediction() const { return score.has_value(); }
};

/// 15 fields (ground truth) or 16 (prediction with score).
inline KittiLabelRecord parse_kitti_label(std::string_view line, int line_no = 1)
{
  const auto f = split_fields(line);
  if (f.size() != 15 && f.size() != 16) {
    throw ParseError(
      ErrorKind::MalformedLine, line_no, static_cast<int>(std::min<std::size_t>(f.size(), 15)),
      "expected 15 or 16 fields, got " + std::to_string(f.size()));
  }
  const auto num = [&](std::size_t i) {
    const auto v = parse_double(f[i]);
    if (!v) {
      throw ParseError(
        ErrorKind::MalformedLine, line_no, static_cast<int>(i),
        "'" + std::string(f[i]) + "' is not a finite decimal");
    }
    return *v;
  };
  KittiLabelRecord r;
  r.type = std::string(f[0]);
  r.truncated = num(1);
  const auto occ = parse_int(f[2]);
  if (!occ) {
    throw ParseError(
      ErrorKind::MalformedLine, line_no, 2, "'" + std::string(f[2]) + "' is not an integer");
  }
  r.occluded = *occ;
  r.alpha = num(3);
  r.bbox = {num(4), num(5), num(6), num(7), 0.0};
  r.height = num(8);
  r.width = num(9);
  r.length = num(10);
  r.location = {num(11), num(12), num(13)};
  r.rotation_y = num(14);
  if (f.size() == 16) {
    r.score = num(15);
    r.bbox.score = *r.score;
  }
  return r;
}

inline std::string format_kitti_label(const KittiLabelRecord & r)
{
  std::string s = r.type;
  const auto add = [&](double v) {
    s += ' ';
    s += format_double(v);
  };
  add(r.truncated);
  s += ' ';
  s += std::to_string(r.occluded);
  for (const double v :
       {r.alpha, r.bbox.x_min, r.bbox.y_min, r.bbox.x_max, r.bbox.y_max, r.height, r.width, r.length,
        r.location.x(), r.location.y(), r.location.z(), r.rotation_y}) {
    add(v);
  }
  if (r.score) {
    add(*r.score);
  }
  return s;
}

/// Blank lines are skipped; line numbers in errors are 1-based file lines.
inline std::vector<KittiLabelRecord> parse_kitti_labels(std::string_view text)
{
  std::vector<KittiLabelRecord> out;
  int n = 0;
  for (const auto line : split_lines(text)) {
    ++n;
    if (!is_blank(line)) {
      out.push_back(parse_kitti_label(line, n));
    }
  }
  return out;
}

inline std::string format_kitti_labels(const std::vector<KittiLabelRecord> & records)
{
  std::string s;
  for (const auto & r : records) {
    s += format_kitti_label(r);
    s += '\n';
  }
  return s;
}

/// Heading yaw of this library from KITTI rotation_y (local x) to local z.
inline double yaw_from_rotation_y(double ry) { return wrap_angle(ry + kPi / 2.0); }
inline double rotation_y_from_yaw(double yaw) { return wrap_angle(yaw - kPi / 2.0); }

/// KITTI bottom-face center + rotation_y, re-anchored at the camera-closest bottom corner.
inline Box3D to_box(const KittiLabelRecord & r)
{
  const Dimensions dims{r.length, r.height, r.width};
  const Point3 center = r.location - Point3(0.0, r.height / 2.0, 0.0);
  return Box3D::from_center(
    center, dims, {yaw_from_rotation_y(r.rotation_y), 0.0, 0.0}, r.type, r.score.value_or(1.0));
}

inline GtBox to_gt(const KittiLabelRecord & r)
{
  GtBox g;
  g.box = to_box(r);
  g.bbox_height = r.bbox.height();
  g.occlusion = r.occluded;
  g.truncation = r.truncated;
  return g;
}

/**
 * KITTI record of a box (pitch and roll are dropped). With a camera the 2D
 * box is the projected hull clipped to the image; otherwise it is zero.
 */
inline KittiLabelRecord to_kitti(
  const Box3D & b, const CameraModel * cam = nullptr, bool with_score = true)
{
  KittiLabelRecord r;
  r.type = b.class_id;
  r.truncated = with_score ? -1.0 : 0.0;
  r.occluded = with_score ? -1 : 0;
  r.height = b.dims.height;
  r.width = b.dims.width;
  r.length = b.dims.length;
  const Point3 c = b.center();
  r.location = c + Point3(0.0, b.dims.height / 2.0, 0.0);
  r.rotation_y = rotation_y_from_yaw(b.angles.yaw);
  r.alpha = wrap_angle(r.rotation_y - std::atan2(c.x(), c.z()));
  if (cam != nullptr) {
    const Box2D full = project_box(b, *cam).box_full;
    r.bbox.x_min = std::clamp(full.x_min, 0.0, cam->image_width);
    r.bbox.x_max = std::clamp(full.x_max, 0.0, cam->image_width);
    r.bbox.y_min = std::clamp(full.y_min, 0.0, cam->image_height);
    r.bbox.y_max = std::clamp(full.y_max, 0.0, cam->image_height);
  }
  if (with_score) {
    r.score = b.score;
  }
  return r;
}

// ---------------------------------------------------------------------------
// KITTI calibration

struct KittiCalib
{
  std::vector<std::pair<std::string, std::vector<double>>> rows;

  const std::vector<double> * find(std::string_view key) const
  {
    for (const auto & [k, v] : rows) {
      if (k == key) {
        return &v;
      }
    }
    return nullptr;
  }

  /// Camera from the P2 row. KITTI calib files carry no image size.
  CameraModel camera(double width = 1242.0, double height = 375.0) const
  {
    const auto * p2 = find("P2");
    if (p2 == nullptr || p2->size() != 12) {
      throw Error(ErrorKind::MissingProjection, "calibration has no 12-value P2 row");
    }
    CameraModel cam;
    for (int i = 0; i < 12; ++i) {
      cam.projection(i / 4, i % 4) = (*p2)[static_cast<std::size_t>(i)];
    }
    cam.image_width = width;
    cam.image_height = height;
    return cam;
  }
};

inline KittiCalib parse_kitti_calib_rows(std::string_view text)
{
  KittiCalib calib;
  int n = 0;
  for (const auto line : split_lines(text)) {
    ++n;
    if (is_blank(line)) {
      continue;
    }
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(ErrorKind::MalformedLine, n, 0, "missing 'KEY:' prefix");
    }
    const auto key_fields = split_fields(line.substr(0, colon));
    if (key_fields.size() != 1) {
      throw ParseError(ErrorKind::MalformedLine, n, 0, "malformed key");
    }
    std::vector<double> values;
    const auto fields = split_fields(line.substr(colon + 1));
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto v = parse_double(fields[i]);
      if (!v) {
        throw ParseError(
          ErrorKind::MalformedLine, n, static_cast<int>(i + 1),
          "'" + std::string(fields[i]) + "' is not a finite decimal");
      }
      values.push_back(*v);
    }
    calib.rows.emplace_back(std::string(key_fields[0]), std::move(values));
  }
  return calib;
}

inline std::string format_kitti_calib(const KittiCalib & calib)
{
  std::string s;
  for (const auto & [key, values] : calib.rows) {
    s += key;
    s += ':';
    for (const double v : values) {
      s += ' ';
      s += format_double(v);
    }
    s += '\n';
  }
  return s;
}

/// Camera from the P2 row; extrinsic pitch/roll stay 0.
inline CameraModel parse_kitti_calib(std::string_view text)
{
  return parse_kitti_calib_rows(text).camera();
}

// ---------------------------------------------------------------------------
// Parameter text format, one detection per line:
//
//   class x_min y_min x_max y_max side_ratio d_yaw d_pitch d_roll d_length d_width
//         inv_depth F|B L|R score [pix_x_min pix_y_min pix_x_max pix_y_max]

inline GckParams parse_params_line(std::string_view line, int line_no = 1)
{
  const auto f = split_fields(line);
  if (f.size() != 15 && f.size() != 19) {
    throw ParseError(
      ErrorKind::MalformedLine, line_no, static_cast<int>(std::min<std::size_t>(f.size(), 15)),
      "expected 15 or 19 fields, got " + std::to_string(f.size()));
  }
  const auto num = [&](std::size_t i) {
    const auto v = parse_double(f[i]);
    if (!v) {
      throw ParseError(
        ErrorKind::MalformedLine, line_no, static_cast<int>(i),
        "'" + std::string(f[i]) + "' is not a finite decimal");
    }
    return *v;
  };
  GckParams p;
  p.class_id = std::string(f[0]);
  p.box_init = {num(1), num(2), num(3), num(4), 0.0};
  p.side_ratio = num(5);
  p.delta_angles = {num(6), num(7), num(8)};
  p.delta_aspect = {num(9), num(10)};
  p.inv_depth = num(11);
  if (f[12] != "F" && f[12] != "B") {
    throw ParseError(ErrorKind::MalformedLine, line_no, 12, "F/B must be 'F' or 'B'");
  }
  p.fb = f[12] == "F" ? Facing::Front : Facing::Back;
  if (f[13] != "L" && f[13] != "R") {
    throw ParseError(ErrorKind::MalformedLine, line_no, 13, "L/R must be 'L' or 'R'");
  }
  p.lr = f[13] == "L" ? Side::Left : Side::Right;
  p.score = num(14);
  p.box_init.score = p.score;
  if (f.size() == 19) {
    p.box_pix = Box2D{num(15), num(16), num(17), num(18), p.score};
  }
  try {
    p.validate();
  } catch (const Error & e) {
    throw ParseError(ErrorKind::MalformedLine, line_no, -1, e.what());
  }
  return p;
}

inline std::string format_params_line(const GckParams & p)
{
  std::string s = p.class_id;
  const auto add = [&](double v) {
    s += ' ';
    s += format_double(v);
  };
  for (const double v :
       {p.box_init.x_min, p.box_init.y_min, p.box_init.x_max, p.box_init.y_max, p.side_ratio,
        p.delta_angles.yaw, p.delta_angles.pitch, p.delta_angles.roll, p.delta_aspect.length,
        p.delta_aspect.width, p.inv_depth}) {
    add(v);
  }
  s += p.fb == Facing::Front ? " F" : " B";
  s += p.lr == Side::Left ? " L" : " R";
  add(p.score);
  if (p.box_pix) {
    for (const double v : {p.box_pix->x_min, p.box_pix->y_min, p.box_pix->x_max, p.box_pix->y_max}) {
      add(v);
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Scene JSON

constexpr int kSceneVersion = 1;

using Detection = std::variant<GckParams, Box3D>;

struct SceneFile
{
  std::string name;
  CameraModel camera{};
  std::vector<GtBox> ground_truth;
  std::vector<Detection> detections;
  /// Unrecognised members, keyed by JSON pointer; re-emitted on save.
  std::vector<std::pair<std::string, Json>> extensions;
};

struct LoadedScene
{
  SceneFile scene;
  std::vector<std::string> warnings;
};

namespace detail
{

inline Json to_json(const Box2D & b) { return Json::array({b.x_min, b.y_min, b.x_max, b.y_max}); }

inline Json box_to_json(const Box3D & b)
{
  Json j;
  j["class"] = b.class_id;
  j["origin"] = Json::array({b.origin.x(), b.origin.y(), b.origin.z()});
  j["dims"] = {{"length", b.dims.length}, {"height", b.dims.height}, {"width", b.dims.width}};
  j["angles"] = {{"yaw", b.angles.yaw}, {"pitch", b.angles.pitch}, {"roll", b.angles.roll}};
  j["corner"] = Json::array({b.corner.x, b.corner.z});
  j["score"] = b.score;
  return j;
}

inline Json params_to_json(const GckParams & p)
{
  Json j;
  j["class"] = p.class_id;
  j["box_init"] = to_json(p.box_init);
  if (p.box_pix) {
    j["box_pix"] = to_json(*p.box_pix);
  }
  j["side_ratio"] = p.side_ratio;
  j["delta_angles"] = Json::array({p.delta_angles.yaw, p.delta_angles.pitch, p.delta_angles.roll});
  j["delta_aspect"] = Json::array({p.delta_aspect.length, p.delta_aspect.width});
  j["inv_depth"] = p.inv_depth;
  j["fb"] = p.fb == Facing::Front ? "F" : "B";
  j["lr"] = p.lr == Side::Left ? "L" : "R";
  j["score"] = p.score;
  return j;
}

/// Walks a JSON object, recording which members were consumed.
class Reader
{
public:
  Reader(const Json & j, std::string path, std::vector<std::pair<std::string, Json>> & ext,
         std::vector<std::string> & warnings)
  : j_(j), path_(std::move(path)), ext_(ext), warnings_(warnings)
  {
    if (!j_.is_object()) {
      fail(path_, "expected an object");
    }
  }

  [[noreturn]] static void fail(const std::string & path, const std::string & what)
  {
    throw Error(ErrorKind::SchemaViolation, (path.empty() ? "/" : path) + ": " + what);
  }

  const Json & member(const std::string & key)
  {
    used_.push_back(key);
    const auto it = j_.find(key);
    if (it == j_.end()) {
      fail(path_ + "/" + key, "missing");
    }
    return *it;
  }

  bool has(const std::string & key) const { return j_.contains(key); }

  /// Reader over an object-valued member, sharing the extension sink.
  Reader nested(const std::string & key)
  {
    return Reader(member(key), child(key), ext_, warnings_);
  }

  std::string child(const std::string & key) const { return path_ + "/" + key; }

  double number(const std::string & key)
  {
    const Json & v = member(key);
    if (!v.is_number()) {
      fail(child(key), "expected a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      fail(child(key), "expected a finite number");
    }
    return d;
  }

  int integer(const std::string & key)
  {
    const Json & v = member(key);
    if (!v.is_number_integer()) {
      fail(child(key), "expected an integer");
    }
    return v.get<int>();
  }

  std::string string(const std::string & key)
  {
    const Json & v = member(key);
    if (!v.is_string()) {
      fail(child(key), "expected a string");
    }
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string & key, std::size_t n)
  {
    const Json & v = member(key);
    if (!v.is_array() || v.size() != n) {
      fail(child(key), "expected an array of " + std::to_string(n) + " numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        fail(child(key) + "/" + std::to_string(i), "expected a finite number");
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  /// Records every member that was not consumed.
  void finish()
  {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (std::find(used_.begin(), used_.end(), it.key()) == used_.end()) {
        const std::string p = child(it.key());
        ext_.emplace_back(p, it.value());
        warnings_.push_back("unknown member " + p + " preserved");
      }
    }
  }

private:
  const Json & j_;
  std::string path_;
  std::vector<std::pair<std::string, Json>> & ext_;
  std::vector<std::string> & warnings_;
  std::vector<std::string> used_;
};

inline Box2D box2d_from(const std::vector<double> & v) { return {v[0], v[1], v[2], v[3], 0.0}; }

inline Box3D read_box(Reader & r, const ClassPriors * priors)
{
  Box3D b;
  b.class_id = r.string("class");
  if (priors != nullptr && !priors->contains(b.class_id)) {
    Reader::fail(r.child("class"), "class '" + b.class_id + "' has no prior");
  }
  const auto o = r.numbers("origin", 3);
  b.origin = {o[0], o[1], o[2]};
  {
    Reader d = r.nested("dims");
    b.dims = {d.number("length"), d.number("height"), d.number("width")};
    d.finish();
  }
  {
    Reader a = r.nested("angles");
    b.angles = {a.number("yaw"), a.number("pitch"), a.number("roll")};
    a.finish();
  }
  const auto corner = r.numbers("corner", 2);
  b.corner = {static_cast<int>(corner[0]), static_cast<int>(corner[1])};
  b.score = r.number("score");
  if (!b.valid()) {
    Reader::fail(r.child(""), "box violates its invariants");
  }
  return b;
}

inline GckParams read_params(Reader & r, const ClassPriors * priors)
{
  GckParams p;
  p.class_id = r.string("class");
  if (priors != nullptr && !priors->contains(p.class_id)) {
    Reader::fail(r.child("class"), "class '" + p.class_id + "' has no prior");
  }
  p.box_init = box2d_from(r.numbers("box_init", 4));
  if (r.has("box_pix")) {
    p.box_pix = box2d_from(r.numbers("box_pix", 4));
  }
  p.side_ratio = r.number("side_ratio");
  const auto da = r.numbers("delta_angles", 3);
  p.delta_angles = {da[0], da[1], da[2]};
  const auto dl = r.numbers("delta_aspect", 2);
  p.delta_aspect = {dl[0], dl[1]};
  p.inv_depth = r.number("inv_depth");
  const std::string fb = r.string("fb");
  const std::string lr = r.string("lr");
  if (fb != "F" && fb != "B") {
    Reader::fail(r.child("fb"), "expected 'F' or 'B'");
  }
  if (lr != "L" && lr != "R") {
    Reader::fail(r.child("lr"), "expected 'L' or 'R'");
  }
  p.fb = fb == "F" ? Facing::Front : Facing::Back;
  p.lr = lr == "L" ? Side::Left : Side::Right;
  p.score = r.number("score");
  p.box_init.score = p.score;
  if (p.box_pix) {
    p.box_pix->score = p.score;
  }
  try {
    p.validate();
  } catch (const Error & e) {
    Reader::fail(r.child(""), e.what());
  }
  return p;
}

}  // namespace detail

inline Json scene_to_json(const SceneFile & s)
{
  Json j;
  j["version"] = kSceneVersion;
  j["name"] = s.name;
  Json cam;
  Json proj = Json::array();
  for (int i = 0; i < 12; ++i) {
    proj.push_back(s.camera.projection(i / 4, i % 4));
  }
  cam["projection"] = proj;
  cam["image_width"] = s.camera.image_width;
  cam["image_height"] = s.camera.image_height;
  cam["extrinsic_pitch"] = s.camera.extrinsic_pitch;
  cam["extrinsic_roll"] = s.camera.extrinsic_roll;
  j["camera"] = cam;
  Json gts = Json::array();
  for (const auto & g : s.ground_truth) {
    Json b = detail::box_to_json(g.box);
    b["bbox_height"] = g.bbox_height;
    b["occlusion"] = g.occlusion;
    b["truncation"] = g.truncation;
    gts.push_back(b);
  }
  j["ground_truth"] = gts;
  Json dets = Json::array();
  for (const auto & d : s.detections) {
    Json item;
    if (const auto * p = std::get_if<GckParams>(&d)) {
      item["params"] = detail::params_to_json(*p);
    } else {
      item["box"] = detail::box_to_json(std::get<Box3D>(d));
    }
    dets.push_back(item);
  }
  j["detections"] = dets;
  for (const auto & [pointer, value] : s.extensions) {
    j[Json::json_pointer(pointer)] = value;
  }
  return j;
}

/// Canonical text: two-space indentation and a trailing newline.
inline std::string save_scene(const SceneFile & s) { return scene_to_json(s).dump(2) + "\n"; }

/**
 * Parses and validates a scene. Unknown members are kept in
 * `scene.extensions` and reported as warnings. With `priors`, every class
 * must have an aspect prior.
 */
inline LoadedScene load_scene(std::string_view text, const ClassPriors * priors = nullptr)
{
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error & e) {
    throw Error(ErrorKind::SchemaViolation, std::string("/: invalid JSON: ") + e.what());
  }
  LoadedScene out;
  SceneFile & s = out.scene;
  auto & ext = s.extensions;
  auto & warn = out.warnings;

  detail::Reader top(root, "", ext, warn);
  const int version = top.integer("version");
  if (version != kSceneVersion) {
    detail::Reader::fail("/version", "unsupported version " + std::to_string(version));
  }
  s.name = top.string("name");
  {
    detail::Reader cam = top.nested("camera");
    const auto p = cam.numbers("projection", 12);
    for (int i = 0; i < 12; ++i) {
      s.camera.projection(i / 4, i % 4) = p[static_cast<std::size_t>(i)];
    }
    s.camera.image_width = cam.number("image_width");
    s.camera.image_height = cam.number("image_height");
    s.camera.extrinsic_pitch = cam.number("extrinsic_pitch");
    s.camera.extrinsic_roll = cam.number("extrinsic_roll");
    cam.finish();
    try {
      s.camera.validate();
    } catch (const Error & e) {
      detail::Reader::fail("/camera", e.what());
    }
  }
  const Json & gts = top.member("ground_truth");
  if (!gts.is_array()) {
    detail::Reader::fail("/ground_truth", "expected an array");
  }
  for (std::size_t i = 0; i < gts.size(); ++i) {
    detail::Reader r(gts[i], "/ground_truth/" + std::to_string(i), ext, warn);
    GtBox g;
    g.box = detail::read_box(r, priors);
    g.bbox_height = r.number("bbox_height");
    g.occlusion = r.integer("occlusion");
    g.truncation = r.number("truncation");
    if (!g.attributes_valid()) {
      detail::Reader::fail(r.child(""), "difficulty attributes out of range");
    }
    r.finish();
    s.ground_truth.push_back(std::move(g));
  }
  const Json & dets = top.member("detections");
  if (!dets.is_array()) {
    detail::Reader::fail("/detections", "expected an array");
  }
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const std::string path = "/detections/" + std::to_string(i);
    detail::Reader r(dets[i], path, ext, warn);
    if (r.has("params") == r.has("box")) {
      detail::Reader::fail(path, "expected exactly one of 'params' or 'box'");
    }
    if (r.has("params")) {
      detail::Reader pr = r.nested("params");
      s.detections.emplace_back(detail::read_params(pr, priors));
      pr.finish();
    } else {
      detail::Reader br = r.nested("box");
      s.detections.emplace_back(detail::read_box(br, priors));
      br.finish();
    }
    r.finish();
  }
  top.finish();
  return out;
}

/// Detections of a scene as boxes, with lifting failures reported per index.
struct LiftedScene
{
  FrameData frame;
  std::vector<std::pair<std::size_t, std::string>> failures;
};

inline LiftedScene lift_scene(const SceneFile & s, const ClassPriors & priors)
{
  LiftedScene out;
  out.frame.name = s.name;
  out.frame.ground_truth = s.ground_truth;
  for (std::size_t i = 0; i < s.detections.size(); ++i) {
    const Detection & d = s.detections[i];
    if (const auto * b = std::get_if<Box3D>(&d)) {
      out.frame.detections.push_back(*b);
      continue;
    }
    try {
      out.frame.detections.push_back(lift(std::get<GckParams>(d), s.camera, priors).box);
    } catch (const Error & e) {
      out.failures.emplace_back(i, e.what());
    }
  }
  return out;
}

}  // namespace gck3d::io

#endif  // GCK3D__IO_HPP_
