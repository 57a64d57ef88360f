// Copyright 2026 The affdeform Authors
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

#include "affdeform/scenario.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "affdeform/roundtrip.h"
#include "affdeform/svg.h"

namespace affdeform {

using nlohmann::json;

namespace {

constexpr std::pair<Task, std::string_view> kTaskNames[] = {
    {Task::kCorrectPosition, "correct_position"},
    {Task::kCorrectOrientation, "correct_orientation"},
    {Task::kCorrectPose, "correct_pose"},
    {Task::kUwvCorrect, "uwv_correct"},
    {Task::kAvoid, "avoid"},
    {Task::kDoorway, "doorway"},
    {Task::kFeedback, "feedback"},
    {Task::kGapFill, "gapfill"},
    {Task::kRoundTripCheck, "roundtrip_check"},
};

// Read-only view of a JSON value that knows its own path, so that every
// diagnostic names the offending field.
class Node {
 public:
  Node(const json& value, std::string path)
      : value_(value), path_(std::move(path)) {}

  const json& value() const { return value_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void Fail(const std::string& message) const {
    throw SchemaError(path_, message);
  }

  void ExpectObject(std::initializer_list<std::string_view> allowed) const {
    if (!value_.is_object()) Fail("expected an object");
    for (const auto& [key, unused] : value_.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        Child(key).Fail("unknown field");
      }
    }
  }

  bool Has(std::string_view key) const {
    return value_.is_object() && value_.contains(key);
  }
  Node Child(std::string_view key) const {
    return Node(value_.at(std::string(key)), Join(key));
  }
  Node Required(std::string_view key) const {
    if (!Has(key)) Node(value_, Join(key)).Fail("required field is missing");
    return Child(key);
  }
  Node Index(size_t i) const {
    return Node(value_.at(i), path_ + "[" + std::to_string(i) + "]");
  }

  double Number() const {
    if (!value_.is_number()) Fail("expected a number");
    const double v = value_.get<double>();
    if (!std::isfinite(v)) Fail("expected a finite number");
    return v;
  }
  double Positive() const {
    const double v = Number();
    if (!(v > 0.0)) Fail("must be > 0");
    return v;
  }
  double NonNegative() const {
    const double v = Number();
    if (!(v >= 0.0)) Fail("must be >= 0");
    return v;
  }
  long long Integer() const {
    if (!value_.is_number_integer()) Fail("expected an integer");
    return value_.get<long long>();
  }
  int IntAtLeast(int lo) const {
    const long long v = Integer();
    if (v < lo || v > 1'000'000'000) {
      Fail("must be an integer >= " + std::to_string(lo));
    }
    return static_cast<int>(v);
  }
  bool Bool() const {
    if (!value_.is_boolean()) Fail("expected true or false");
    return value_.get<bool>();
  }
  std::string String() const {
    if (!value_.is_string()) Fail("expected a string");
    return value_.get<std::string>();
  }
  // [x, y] or [x, y, z].
  Vec3 Point(int dim) const {
    if (!value_.is_array() || static_cast<int>(value_.size()) != dim) {
      Fail("expected an array of " + std::to_string(dim) + " numbers");
    }
    Vec3 p = Vec3::Zero();
    for (int i = 0; i < dim; ++i) p[i] = Index(i).Number();
    return p;
  }
  std::vector<double> Numbers() const {
    if (!value_.is_array()) Fail("expected an array of numbers");
    std::vector<double> out;
    for (size_t i = 0; i < value_.size(); ++i) out.push_back(Index(i).Number());
    return out;
  }

  template <typename T>
  void Optional(std::string_view key, T& out,
                T (Node::*read)() const) const {
    if (Has(key)) out = (Child(key).*read)();
  }

 private:
  std::string Join(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json& value_;
  std::string path_;
};

RobotModel ParseModel(const Node& node) {
  RobotModel model;
  if (node.value().is_string()) {
    try {
      model.kind = ParseRobotKind(node.String());
    } catch (const Error& e) {
      node.Fail(e.what());
    }
  } else {
    node.ExpectObject({"kind", "wheelbase", "hitch_lengths"});
    const Node kind = node.Required("kind");
    try {
      model.kind = ParseRobotKind(kind.String());
    } catch (const Error& e) {
      kind.Fail(e.what());
    }
    if (node.Has("wheelbase")) model.wheelbase = node.Child("wheelbase").Positive();
    if (node.Has("hitch_lengths")) {
      const Node h = node.Child("hitch_lengths");
      model.hitch_lengths = h.Numbers();
      for (size_t i = 0; i < model.hitch_lengths.size(); ++i) {
        if (!(model.hitch_lengths[i] > 0.0)) h.Index(i).Fail("must be > 0");
      }
    }
  }
  if (model.kind == RobotKind::kCarWithTrailers && model.hitch_lengths.empty()) {
    model.hitch_lengths = {1.0};
  }
  return model;
}

TrajectorySource ParseSource(const Node& node, const std::filesystem::path& base) {
  node.ExpectObject({"csv", "generator", "params", "place"});
  TrajectorySource src;
  if (node.Has("place")) {
    const Node place = node.Child("place");
    place.ExpectObject({"origin", "heading"});
    src.placed = true;
    if (place.Has("origin")) {
      const Node origin = place.Child("origin");
      const int dim = origin.value().is_array() && origin.value().size() == 3 ? 3 : 2;
      src.place_origin = origin.Point(dim);
    }
    if (place.Has("heading")) src.place_heading = place.Child("heading").Number();
  }
  if (node.Has("csv") == node.Has("generator")) {
    node.Fail("give exactly one of 'csv' and 'generator'");
  }
  if (node.Has("csv")) {
    if (node.Has("params")) node.Child("params").Fail("only valid with 'generator'");
    const Node csv = node.Child("csv");
    std::filesystem::path p = csv.String();
    if (p.is_relative()) p = base / p;
    if (!std::filesystem::is_regular_file(p)) {
      csv.Fail("file not found: " + p.string());
    }
    src.csv = p;
    return src;
  }
  const Node gen = node.Child("generator");
  src.generator = gen.String();
  const std::vector<FixtureInfo> fixtures = ListFixtures();
  const auto info = std::find_if(fixtures.begin(), fixtures.end(),
                                 [&](const FixtureInfo& f) {
                                   return f.name == src.generator;
                                 });
  if (info == fixtures.end()) gen.Fail("unknown generator '" + src.generator + "'");
  if (node.Has("params")) {
    const Node params = node.Child("params");
    if (!params.value().is_object()) params.Fail("expected an object");
    for (const auto& [key, unused] : params.value().items()) {
      if (!info->defaults.contains(key)) {
        params.Child(key).Fail("unknown parameter of '" + src.generator + "'");
      }
      src.params[key] = params.Child(key).Number();
    }
  }
  return src;
}

TauSearchPolicy ParsePolicy(const Node& node) {
  node.ExpectObject({"stride", "margin_fraction", "inflection_guard",
                     "min_index", "max_index", "micro_correct"});
  TauSearchPolicy p;
  if (node.Has("stride")) p.stride = node.Child("stride").IntAtLeast(1);
  if (node.Has("margin_fraction")) {
    const Node m = node.Child("margin_fraction");
    p.margin_fraction = m.NonNegative();
    if (p.margin_fraction >= 0.5) m.Fail("must be < 0.5");
  }
  if (node.Has("inflection_guard")) {
    p.inflection_guard = node.Child("inflection_guard").IntAtLeast(0);
  }
  if (node.Has("min_index")) p.min_index = node.Child("min_index").IntAtLeast(0);
  if (node.Has("max_index")) p.max_index = node.Child("max_index").IntAtLeast(0);
  if (node.Has("micro_correct")) {
    p.micro_correct = node.Child("micro_correct").Bool();
  }
  return p;
}

PoseOptions ParsePoseOptions(const Node& node, PoseOptions options) {
  if (node.Has("alpha_max")) options.alpha_max = node.Child("alpha_max").Positive();
  if (node.Has("scan_points")) {
    const Node s = node.Child("scan_points");
    options.scan_points = s.IntAtLeast(3);
    if (options.scan_points % 2 == 0) s.Fail("must be odd");
  }
  if (node.Has("taus")) {
    const Node taus = node.Child("taus");
    if (!taus.value().is_array() || taus.value().size() != 3) {
      taus.Fail("expected [tau1, tau2, tau3]");
    }
    options.tau1 = taus.Index(0).IntAtLeast(0);
    options.tau2 = taus.Index(1).IntAtLeast(0);
    options.tau3 = taus.Index(2).IntAtLeast(0);
  }
  return options;
}

void ParseTargetOrOffset(const Node& params, int dim, std::optional<Vec3>& target,
                         Vec3& offset) {
  if (params.Has("target") && params.Has("offset")) {
    params.Child("offset").Fail("give either 'target' or 'offset'");
  }
  if (params.Has("target")) {
    target = params.Child("target").Point(dim);
  } else if (params.Has("offset")) {
    offset = params.Child("offset").Point(dim);
  } else {
    params.Required("target");
  }
}

void ParseHeading(const Node& params, std::optional<double>& heading,
                  double& offset, bool required) {
  if (params.Has("heading") && params.Has("heading_offset")) {
    params.Child("heading_offset").Fail("give either 'heading' or 'heading_offset'");
  }
  if (params.Has("heading")) {
    heading = params.Child("heading").Number();
  } else if (params.Has("heading_offset")) {
    offset = params.Child("heading_offset").Number();
  } else if (required) {
    params.Required("heading");
  }
}

ObstacleSet ParseObstacles(const Node& node) {
  if (!node.value().is_array()) node.Fail("expected an array of obstacles");
  ObstacleSet set;
  for (size_t i = 0; i < node.value().size(); ++i) {
    const Node o = node.Index(i);
    if (!o.value().is_object()) o.Fail("expected an object");
    const std::string type = o.Required("type").String();
    bool known = true;
    if (type == "disc") {
      o.ExpectObject({"type", "center", "radius", "known"});
      if (o.Has("known")) known = o.Child("known").Bool();
      set.discs.push_back(Disc{o.Required("center").Point(2),
                               o.Required("radius").Positive(), known});
    } else if (type == "rect") {
      o.ExpectObject({"type", "min", "max", "known"});
      if (o.Has("known")) known = o.Child("known").Bool();
      const Vec3 lo = o.Required("min").Point(2);
      const Vec3 hi = o.Required("max").Point(2);
      if (!(hi.x() > lo.x() && hi.y() > lo.y())) {
        o.Child("max").Fail("must exceed 'min' in both coordinates");
      }
      set.rects.push_back(Rect{lo, hi, known});
    } else {
      o.Child("type").Fail("expected 'disc' or 'rect'");
    }
  }
  return set;
}

TaskParams ParseParams(Task task, const Node& p, const RobotModel& model,
                       bool has_model) {
  const int dim = model.base_dim();
  const RobotClass cls = model.robot_class();
  auto need_model = [&](bool ok, const std::string& what) {
    if (!ok) Node(p.value(), "model").Fail(what);
  };
  switch (task) {
    case Task::kCorrectPosition: {
      p.ExpectObject({"target", "offset", "method", "tau", "taus"});
      PositionParams out;
      ParseTargetOrOffset(p, dim, out.target, out.offset);
      if (p.Has("method")) out.method = p.Child("method").String();
      const std::set<std::string> methods = {"auto", "class1", "one_step",
                                             "two_step", "uwv"};
      if (!methods.contains(out.method)) {
        p.Child("method").Fail(
            "expected auto, class1, one_step, two_step or uwv");
      }
      const bool planar_ii = out.method == "one_step" || out.method == "two_step";
      if ((out.method == "class1" && cls != RobotClass::kClassI) ||
          (planar_ii && dim != 2) ||
          (out.method == "uwv" && cls != RobotClass::kSpatial)) {
        p.Child("method").Fail("method '" + out.method +
                               "' is not admissible for model '" +
                               std::string(RobotKindName(model.kind)) + "'");
      }
      if (p.Has("tau")) {
        if (out.method != "class1" && out.method != "uwv") {
          p.Child("tau").Fail("only valid with method class1 or uwv");
        }
        out.tau = p.Child("tau").IntAtLeast(0);
      }
      if (p.Has("taus")) {
        const Node taus = p.Child("taus");
        if (out.method != "two_step") taus.Fail("only valid with method two_step");
        if (!taus.value().is_array() || taus.value().size() != 2) {
          taus.Fail("expected [tau1, tau2]");
        }
        out.tau1 = taus.Index(0).IntAtLeast(0);
        out.tau2 = taus.Index(1).IntAtLeast(0);
      }
      return out;
    }
    case Task::kCorrectOrientation: {
      p.ExpectObject({"heading", "heading_offset"});
      need_model(dim == 2, "orientation correction needs a planar model");
      OrientationParams out;
      ParseHeading(p, out.heading, out.heading_offset, true);
      return out;
    }
    case Task::kCorrectPose: {
      p.ExpectObject({"target", "offset", "heading", "heading_offset",
                      "alpha_max", "scan_points", "taus"});
      need_model(dim == 2, "pose correction needs a planar model");
      PoseParams out;
      ParseTargetOrOffset(p, 2, out.target, out.offset);
      ParseHeading(p, out.heading, out.heading_offset, true);
      out.options = ParsePoseOptions(p, out.options);
      return out;
    }
    case Task::kUwvCorrect: {
      p.ExpectObject({"target", "offset", "tau"});
      need_model(cls == RobotClass::kSpatial, "uwv_correct needs underwater3d");
      PositionParams out;
      out.method = "uwv";
      ParseTargetOrOffset(p, 3, out.target, out.offset);
      if (p.Has("tau")) out.tau = p.Child("tau").IntAtLeast(0);
      return out;
    }
    case Task::kAvoid: {
      p.ExpectObject({"obstacles", "clearance", "waypoint_margin",
                      "max_iterations"});
      need_model(dim == 2, "obstacle avoidance needs a planar model");
      AvoidParams out;
      out.obstacles = ParseObstacles(p.Required("obstacles"));
      if (p.Has("clearance")) {
        out.options.clearance = p.Child("clearance").NonNegative();
      }
      if (p.Has("waypoint_margin")) {
        out.options.waypoint_margin = p.Child("waypoint_margin").NonNegative();
      }
      if (p.Has("max_iterations")) {
        out.options.max_iterations = p.Child("max_iterations").IntAtLeast(1);
      }
      return out;
    }
    case Task::kDoorway: {
      p.ExpectObject({"door_index", "door_time", "position", "lateral_offset",
                      "heading"});
      need_model(dim == 2, "the doorway constraint needs a planar model");
      DoorwayParams out;
      if (p.Has("door_index") == p.Has("door_time")) {
        p.Fail("give exactly one of 'door_index' and 'door_time'");
      }
      if (p.Has("door_index")) out.door_index = p.Child("door_index").IntAtLeast(0);
      if (p.Has("door_time")) out.door_time = p.Child("door_time").NonNegative();
      if (p.Has("position") && p.Has("lateral_offset")) {
        p.Child("lateral_offset").Fail("give either 'position' or 'lateral_offset'");
      }
      if (p.Has("position")) out.position = p.Child("position").Point(2);
      if (p.Has("lateral_offset")) {
        out.lateral_offset = p.Child("lateral_offset").Number();
      }
      if (p.Has("heading")) out.heading = p.Child("heading").Number();
      return out;
    }
    case Task::kFeedback: {
      p.ExpectObject({"corrections", "runs", "noise", "plan", "accept_factor",
                      "accel_floor", "zeta_floor"});
      need_model(!has_model || model.kind == RobotKind::kKinematicCar,
                 "feedback needs kinematic_car");
      FeedbackParams out;
      if (p.Has("corrections")) {
        const Node c = p.Child("corrections");
        out.corrections.clear();
        if (c.value().is_array()) {
          if (c.value().empty()) c.Fail("expected at least one value");
          for (size_t i = 0; i < c.value().size(); ++i) {
            out.corrections.push_back(c.Index(i).IntAtLeast(0));
          }
        } else {
          out.corrections.push_back(c.IntAtLeast(0));
        }
      }
      if (p.Has("runs")) out.runs = p.Child("runs").IntAtLeast(1);
      if (p.Has("noise")) {
        const Node n = p.Child("noise");
        n.ExpectObject({"segment_duration", "accel_amplitude", "zeta_amplitude"});
        if (n.Has("segment_duration")) {
          out.noise.segment_duration = n.Child("segment_duration").Positive();
        }
        if (n.Has("accel_amplitude")) {
          out.noise.accel_amplitude = n.Child("accel_amplitude").NonNegative();
        }
        if (n.Has("zeta_amplitude")) {
          out.noise.zeta_amplitude = n.Child("zeta_amplitude").NonNegative();
        }
      }
      if (p.Has("plan")) {
        const Node plan = p.Child("plan");
        plan.ExpectObject({"dt", "duration"});
        if (plan.Has("dt")) out.plan_dt = plan.Child("dt").Positive();
        if (plan.Has("duration")) out.duration = plan.Child("duration").Positive();
      }
      if (p.Has("accept_factor")) {
        out.options.accept_factor = p.Child("accept_factor").Positive();
      }
      if (p.Has("accel_floor")) {
        out.options.accel_floor = p.Child("accel_floor").NonNegative();
      }
      if (p.Has("zeta_floor")) {
        out.options.zeta_floor = p.Child("zeta_floor").NonNegative();
      }
      return out;
    }
    case Task::kGapFill: {
      p.ExpectObject({"delta_a", "delta_b", "max_steer_rate", "max_accel",
                      "alpha_max", "scan_points"});
      need_model(model.kind == RobotKind::kKinematicCar,
                 "gap filling needs kinematic_car");
      GapFillParams out;
      if (p.Has("delta_a")) out.spec.delta_a = p.Child("delta_a").Positive();
      if (p.Has("delta_b")) out.spec.delta_b = p.Child("delta_b").Positive();
      if (p.Has("max_steer_rate")) {
        out.spec.max_steer_rate = p.Child("max_steer_rate").Positive();
      }
      if (p.Has("max_accel")) out.spec.max_accel = p.Child("max_accel").Positive();
      out.pose = ParsePoseOptions(p, out.pose);
      return out;
    }
    case Task::kRoundTripCheck: {
      p.ExpectObject({"fixtures", "models", "threshold", "magnitude"});
      RoundTripParams out;
      if (p.Has("fixtures")) {
        const Node f = p.Child("fixtures");
        if (!f.value().is_array()) f.Fail("expected an array of fixture names");
        const std::vector<FixtureInfo> all = ListFixtures();
        for (size_t i = 0; i < f.value().size(); ++i) {
          const std::string name = f.Index(i).String();
          if (std::none_of(all.begin(), all.end(),
                           [&](const FixtureInfo& x) { return x.name == name; })) {
            f.Index(i).Fail("unknown generator '" + name + "'");
          }
          out.fixtures.push_back(name);
        }
      }
      if (p.Has("models")) {
        const Node m = p.Child("models");
        if (!m.value().is_array()) m.Fail("expected an array of models");
        for (size_t i = 0; i < m.value().size(); ++i) {
          out.models.push_back(ParseModel(m.Index(i)));
        }
      }
      if (p.Has("threshold")) out.threshold = p.Child("threshold").Positive();
      if (p.Has("magnitude")) out.magnitude = p.Child("magnitude").Positive();
      return out;
    }
  }
  p.Fail("unsupported task");
}

bool TaskNeedsInput(Task task) {
  return task != Task::kFeedback && task != Task::kRoundTripCheck;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

std::string_view TaskName(Task task) {
  for (const auto& [t, name] : kTaskNames) {
    if (t == task) return name;
  }
  return "unknown";
}

Scenario ParseScenario(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  const Node root(doc, "");
  root.ExpectObject({"task", "model", "input", "input2", "dt", "seed", "threads",
                     "output_dir", "policy", "params", "description"});
  Scenario s;
  s.base_dir = base_dir;
  s.source_text = std::string(text);

  const Node task = root.Required("task");
  const std::string task_name = task.String();
  const auto it = std::find_if(std::begin(kTaskNames), std::end(kTaskNames),
                               [&](const auto& t) { return t.second == task_name; });
  if (it == std::end(kTaskNames)) task.Fail("unknown task '" + task_name + "'");
  s.task = it->first;
  if (root.Has("description")) root.Child("description").String();

  const bool has_model = root.Has("model");
  if (has_model) {
    s.model = ParseModel(root.Child("model"));
  } else if (s.task == Task::kFeedback || s.task == Task::kGapFill) {
    s.model = RobotModel{RobotKind::kKinematicCar, 1.0, {}};
  } else if (s.task != Task::kRoundTripCheck) {
    root.Required("model");
  }

  if (root.Has("dt")) s.dt = root.Child("dt").Positive();
  if (root.Has("seed")) {
    const Node seed = root.Child("seed");
    if (!seed.value().is_number_unsigned()) seed.Fail("expected an unsigned integer");
    s.seed = seed.value().get<std::uint64_t>();
  }
  if (root.Has("threads")) s.threads = root.Child("threads").IntAtLeast(1);
  if (root.Has("output_dir")) s.output_dir = root.Child("output_dir").String();
  if (root.Has("policy")) s.policy = ParsePolicy(root.Child("policy"));

  if (TaskNeedsInput(s.task)) {
    s.input = ParseSource(root.Required("input"), base_dir);
  } else if (root.Has("input")) {
    root.Child("input").Fail("not used by task '" + task_name + "'");
  }
  if (s.task == Task::kGapFill) {
    s.input2 = ParseSource(root.Required("input2"), base_dir);
  } else if (root.Has("input2")) {
    root.Child("input2").Fail("only used by task 'gapfill'");
  }

  static const json kEmpty = json::object();
  const Node params = root.Has("params") ? root.Child("params") : Node(kEmpty, "params");
  s.params = ParseParams(s.task, params, s.model, has_model);
  return s;
}

Scenario LoadScenario(const std::filesystem::path& path) {
  const std::string text = ReadFile(path);
  std::filesystem::path base = path.parent_path();
  if (base.empty()) base = ".";
  return ParseScenario(text, base);
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchemaViolation:
    case ErrorCode::kIo:
    case ErrorCode::kUnknownGenerator:
      return 2;
    default:
      return 1;
  }
}

json ErrorJson(const Error& error) {
  json e = {{"code", std::string(ErrorCodeName(error.code()))},
            {"message", error.what()}};
  if (const auto* schema = dynamic_cast<const SchemaError*>(&error)) {
    e["path"] = schema->path();
  }
  return e;
}

json Number12(double value) {
  if (!std::isfinite(value)) return nullptr;
  return std::stod(FormatNumber(value));
}

json MapToJson(const AffineMap& map) {
  const int d = map.dim;
  json fixed = json::array(), offset = json::array(), matrix = json::array();
  for (int i = 0; i < d; ++i) {
    fixed.push_back(Number12(map.fixed_point[i]));
    offset.push_back(Number12(map.offset[i]));
    json row = json::array();
    for (int j = 0; j < d; ++j) row.push_back(Number12(map.matrix(i, j)));
    matrix.push_back(row);
  }
  return {{"dim", d}, {"fixed_point", fixed}, {"matrix", matrix}, {"offset", offset}};
}

AffineMap MapFromJson(const json& j) {
  const Node n(j, "map");
  n.ExpectObject({"dim", "fixed_point", "matrix", "offset"});
  const long long dim = n.Required("dim").Integer();
  if (dim != 2 && dim != 3) n.Child("dim").Fail("expected 2 or 3");
  AffineMap f = AffineMap::Identity(static_cast<int>(dim));
  f.fixed_point = n.Required("fixed_point").Point(static_cast<int>(dim));
  if (n.Has("offset")) f.offset = n.Child("offset").Point(static_cast<int>(dim));
  const Node m = n.Required("matrix");
  if (!m.value().is_array() || static_cast<long long>(m.value().size()) != dim) {
    m.Fail("expected " + std::to_string(dim) + " rows");
  }
  for (int i = 0; i < dim; ++i) {
    const Vec3 row = m.Index(i).Point(static_cast<int>(dim));
    for (int c = 0; c < dim; ++c) f.matrix(i, c) = row[c];
  }
  return f;
}

std::uint64_t Fnv1a64(std::string_view bytes, std::uint64_t hash) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

namespace {

json PointJson(const Vec3& p, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(Number12(p[i]));
  return a;
}

json ModelJson(const RobotModel& m) {
  json j = {{"kind", std::string(RobotKindName(m.kind))},
            {"wheelbase", Number12(m.wheelbase)}};
  if (!m.hitch_lengths.empty()) {
    json h = json::array();
    for (double l : m.hitch_lengths) h.push_back(Number12(l));
    j["hitch_lengths"] = h;
  }
  return j;
}

json CorrectionJson(const CorrectionResult& r, double dt) {
  json defs = json::array();
  for (const Deformation& d : r.deformations) {
    json m = MapToJson(d.map);
    m["tau_index"] = d.tau_index;
    m["tau_time"] = Number12(d.tau_index * dt);
    m["distance_from_identity"] = Number12(DistanceFromIdentity(d.map));
    defs.push_back(m);
  }
  json params = json::object();
  for (const auto& [name, value] : r.parameters) params[name] = Number12(value);
  json j = {{"residual_position", Number12(r.residual_position)},
            {"deformations", defs},
            {"parameters", params}};
  if (r.has_orientation) j["residual_orientation"] = Number12(r.residual_orientation);
  return j;
}

json AdmissibilityJson(const RobotModel& model, const Trajectory& traj) {
  const RegularityReport r = CheckAdmissible(model, traj);
  json j = {{"admissible", IsAdmissible(r)},
            {"is_d2", r.is_d2},
            {"worst_velocity_jump", Number12(r.worst_velocity_jump)},
            {"velocity_tolerance", Number12(r.velocity_tolerance)}};
  if (model.robot_class() == RobotClass::kClassII) {
    j["heading_d2"] = r.heading_d2;
    j["worst_omega_jump"] = Number12(r.worst_omega_jump);
    j["omega_tolerance"] = Number12(r.omega_tolerance);
  }
  return j;
}

// Output sink: collects file names and writes deterministic content.
class Outputs {
 public:
  explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void Text(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary);
    out << content;
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + (dir_ / name).string());
    files_.push_back(name);
  }
  void Csv(const std::string& name, const Trajectory& traj) {
    std::ostringstream s;
    WriteTrajectoryCsv(s, traj);
    Text(name, s.str());
  }
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

struct Inputs {
  std::optional<Trajectory> first;
  std::optional<Trajectory> second;
  std::uint64_t hash = 0;
};

Trajectory LoadRaw(const TrajectorySource& src, double dt, std::uint64_t& hash) {
  if (!src.csv.empty()) {
    const std::string text = ReadFile(src.csv);
    hash = Fnv1a64(text, hash);
    std::istringstream in(text);
    try {
      return ReadTrajectoryCsv(in);
    } catch (const Error& e) {
      throw SchemaError("input.csv", e.what());
    }
  }
  try {
    return GenerateBuiltin(src.generator, src.params, dt);
  } catch (const Error& e) {
    throw SchemaError("input.params", e.what());
  }
}

Trajectory LoadSource(const TrajectorySource& src, double dt, std::uint64_t& hash) {
  Trajectory traj = LoadRaw(src, dt, hash);
  if (!src.placed) return traj;
  if (traj.dim() == 2 && src.place_origin.z() != 0.0) {
    throw SchemaError("input.place.origin", "expected 2 coordinates for a planar path");
  }
  try {
    return Place(traj, src.place_origin, src.place_heading);
  } catch (const Error& e) {
    throw SchemaError("input.place", e.what());
  }
}

int IndexForTime(const Trajectory& traj, double t) {
  return static_cast<int>(std::lround(std::clamp(t / traj.dt(), 0.0,
                                                 static_cast<double>(traj.last()))));
}

// Stages after each deformation, for CSVs and plots.
std::vector<Trajectory> StagesOf(const Trajectory& input,
                                 const std::vector<Deformation>& defs) {
  std::vector<Trajectory> stages = {input};
  for (const Deformation& d : defs) {
    stages.push_back(Apply(stages.back(), d.map, d.tau_index));
  }
  return stages;
}

void WriteStages(Outputs& out, const std::vector<Trajectory>& stages) {
  out.Csv("trajectory_original.csv", stages.front());
  for (size_t i = 1; i + 1 < stages.size(); ++i) {
    out.Csv("trajectory_stage" + std::to_string(i) + ".csv", stages[i]);
  }
  out.Csv("trajectory_final.csv", stages.back());
}

void PlotStages(SvgPlot& plot, const std::vector<Trajectory>& stages) {
  for (size_t i = 0; i < stages.size(); ++i) {
    plot.AddPath(stages[i], StageColor(static_cast<int>(i)),
                 i + 1 == stages.size() ? 2.0 : 1.5);
  }
  plot.AddLegend("original", StageColor(0));
  if (stages.size() > 1) plot.AddLegend("corrected", StageColor(int(stages.size()) - 1));
}

struct TaskOutput {
  json body = json::object();
  bool failed = false;  // a check inside the task failed (exit code 1)
};

TaskOutput RunCorrection(const Scenario& s, const Trajectory& traj, Outputs& out) {
  const TauSearchPolicy& policy = s.policy;
  CorrectionResult result = [&]() -> CorrectionResult {
    switch (s.task) {
      case Task::kCorrectPosition:
      case Task::kUwvCorrect: {
        const auto& p = std::get<PositionParams>(s.params);
        const Vec3 target = p.target ? *p.target : Vec3(traj.back() + p.offset);
        std::string method = p.method;
        if (method == "auto") {
          switch (s.model.robot_class()) {
            case RobotClass::kClassI: method = "class1"; break;
            case RobotClass::kClassII: method = "reach"; break;
            case RobotClass::kSpatial: method = "uwv"; break;
          }
        }
        if (method == "class1") {
          return p.tau >= 0 ? Class1CorrectPosition(traj, p.tau, target)
                            : Class1CorrectPositionAuto(traj, target, policy);
        }
        if (method == "uwv") {
          return p.tau >= 0 ? UwvCorrectPosition(traj, p.tau, target)
                            : UwvCorrectPositionAuto(traj, target, policy);
        }
        if (method == "one_step") return Class2CorrectPosition(traj, target, policy);
        if (method == "two_step") {
          return p.tau1 >= 0
                     ? Class2CorrectPosition2Step(traj, target, p.tau1, p.tau2)
                     : Class2CorrectPosition2StepAuto(traj, target, policy);
        }
        return Class2ReachPosition(traj, target, policy);
      }
      case Task::kCorrectOrientation: {
        const auto& p = std::get<OrientationParams>(s.params);
        const double heading =
            p.heading ? *p.heading : FinalHeading(traj) + p.heading_offset;
        return Class2CorrectOrientation(
            traj, Vec3(std::cos(heading), std::sin(heading), 0.0), policy);
      }
      default: {
        const auto& p = std::get<PoseParams>(s.params);
        const Vec3 target = p.target ? *p.target : Vec3(traj.back() + p.offset);
        const double heading =
            p.heading ? *p.heading : FinalHeading(traj) + p.heading_offset;
        return Class2CorrectPose3Step(traj, target, heading, policy, p.options);
      }
    }
  }();

  const std::vector<Trajectory> stages = StagesOf(traj, result.deformations);
  WriteStages(out, stages);
  TaskOutput t;
  t.body = CorrectionJson(result, traj.dt());
  t.body["admissibility"] = AdmissibilityJson(s.model, result.corrected);
  // Deformations of the wrong family are flagged independently of the solve.
  bool maps_ok = true;
  for (size_t i = 0; i < result.deformations.size(); ++i) {
    const Deformation& d = result.deformations[i];
    maps_ok = maps_ok && AdmissibilityOfMap(stages[i], d.map, d.tau_index, s.model,
                                            1e-6).pass;
  }
  t.body["maps_admissible"] = maps_ok;

  if (traj.dim() == 2) {
    SvgPlot plot(std::string(TaskName(s.task)));
    PlotStages(plot, stages);
    if (s.task != Task::kCorrectOrientation) {
      plot.AddDot(result.corrected.back(), "magenta", 5.0);
    }
    if (result.has_orientation) {
      plot.AddArrow(result.corrected.back(), FinalHeading(result.corrected),
                    0.1 * std::max(1.0, traj.Extent()), "black");
    }
    out.Text("plot.svg", plot.Render());
  } else {
    // Spatial paths are drawn in the xy projection.
    SvgPlot plot(std::string(TaskName(s.task)) + " (xy projection)");
    PlotStages(plot, stages);
    out.Text("plot.svg", plot.Render());
  }
  return t;
}

void PlotObstacles(SvgPlot& plot, const ObstacleSet& obstacles) {
  for (const Disc& d : obstacles.discs) {
    plot.AddDisc(d.center, d.radius, d.known ? "black" : "cyan");
  }
  for (const Rect& r : obstacles.rects) {
    plot.AddRect(r.min, r.max, r.known ? "black" : "cyan");
  }
}

TaskOutput RunAvoid(const Scenario& s, const Trajectory& traj, Outputs& out) {
  const auto& p = std::get<AvoidParams>(s.params);
  AvoidOptions options = p.options;
  options.policy = s.policy;
  const AvoidResult r = AvoidObstacles(traj, s.model, p.obstacles, options);
  std::vector<Trajectory> stages = r.stages;
  WriteStages(out, stages);
  double clearance = std::numeric_limits<double>::infinity();
  for (const Vec3& q : r.correction.corrected.points()) {
    clearance = std::min(clearance, p.obstacles.Distance(q));
  }
  TaskOutput t;
  t.body = CorrectionJson(r.correction, traj.dt());
  t.body["iterations"] = r.iterations;
  t.body["min_clearance"] = Number12(clearance);
  json waypoints = json::array();
  for (const Vec3& w : r.waypoints) waypoints.push_back(PointJson(w, 2));
  t.body["waypoints"] = waypoints;
  t.body["admissibility"] = AdmissibilityJson(s.model, r.correction.corrected);

  SvgPlot plot("avoid");
  PlotObstacles(plot, p.obstacles);
  PlotStages(plot, stages);
  for (size_t i = 0; i < r.waypoints.size(); ++i) {
    plot.AddStar(r.waypoints[i], StageColor(static_cast<int>(i) + 1));
  }
  plot.AddDot(traj.back(), "magenta", 5.0);
  out.Text("plot.svg", plot.Render());
  return t;
}

TaskOutput RunDoorway(const Scenario& s, const Trajectory& traj, Outputs& out) {
  const auto& p = std::get<DoorwayParams>(s.params);
  const int door = p.door_index >= 0 ? p.door_index : IndexForTime(traj, p.door_time);
  if (door > traj.last()) {
    throw SchemaError("params.door_index", "beyond the end of the trajectory");
  }
  const FrameSample f = FrameAt(traj, door);
  const Vec3 position =
      p.position ? *p.position : Vec3(traj[door] + p.lateral_offset * f.u_perp);
  const double heading = p.heading ? *p.heading : std::atan2(f.v.y(), f.v.x());
  const DoorwayResult r =
      DoorwayConstraint(traj, s.model, door, position, heading, s.policy);
  WriteStages(out, r.stages);
  TaskOutput t;
  t.body = CorrectionJson(r.correction, traj.dt());
  t.body["door_index"] = door;
  t.body["residual_door_position"] = Number12(r.residual_door_position);
  t.body["residual_door_heading"] = Number12(r.residual_door_heading);
  t.body["admissibility"] = AdmissibilityJson(s.model, r.correction.corrected);

  SvgPlot plot("doorway");
  PlotStages(plot, r.stages);
  plot.AddArrow(position, heading, 0.15 * std::max(1.0, traj.Extent()), "black");
  plot.AddDot(position, "black", 4.0);
  plot.AddDot(traj.back(), "magenta", 5.0);
  out.Text("plot.svg", plot.Render());
  return t;
}

TaskOutput RunFeedback(const Scenario& s, int threads, std::uint64_t seed,
                       Outputs& out) {
  const auto& p = std::get<FeedbackParams>(s.params);
  const CommandProfile plan = DefaultFeedbackPlan(p.plan_dt, p.duration);
  const FullState initial = DefaultFeedbackInitial();
  const IntegrationResult nominal = [&] {
    // The planned path: (v, zeta) integrated by the car model.
    return Integrate(s.model, initial, plan);
  }();
  out.Csv("trajectory_original.csv", nominal.base);
  NoiseModel noise = p.noise;
  noise.seed = seed;

  SvgPlot plot("feedback");
  TaskOutput t;
  json per_s = json::array();
  for (size_t i = 0; i < p.corrections.size(); ++i) {
    FeedbackOptions options = p.options;
    options.corrections = p.corrections[i];
    options.runs = p.runs;
    options.threads = threads;
    options.policy = s.policy;
    const FeedbackStats stats =
        FeedbackSimulate(s.model, plan, initial, noise, options);
    const std::string tag = "S" + std::to_string(options.corrections);
    std::ostringstream csv;
    WriteFeedbackCsv(csv, stats);
    out.Text("feedback_" + tag + ".csv", csv.str());
    out.Csv("trajectory_" + tag + "_run0.csv",
            Trajectory(2, plan.dt, stats.sample_path, 0.0));
    per_s.push_back({{"corrections", options.corrections},
                     {"final_error_mean", Number12(stats.final_error_mean)},
                     {"final_error_std", Number12(stats.final_error_std)},
                     {"variability_at_T", Number12(stats.variability.back())},
                     {"max_accel_mean", Number12(stats.max_accel_mean)},
                     {"max_zeta_mean", Number12(stats.max_zeta_mean)},
                     {"max_beta_mean", Number12(stats.max_beta_mean)},
                     {"corrections_attempted", stats.corrections_attempted},
                     {"corrections_accepted", stats.corrections_accepted}});
    plot.AddPath(stats.sample_path, StageColor(static_cast<int>(i)), 1.2);
    plot.AddLegend(tag, StageColor(static_cast<int>(i)));
  }
  plot.AddPath(nominal.base, "black", 2.0);
  plot.AddDot(nominal.base.back(), "magenta", 5.0);
  out.Text("plot.svg", plot.Render());
  t.body["runs"] = p.runs;
  t.body["noise"] = {{"segment_duration", Number12(noise.segment_duration)},
                     {"accel_amplitude", Number12(noise.accel_amplitude)},
                     {"zeta_amplitude", Number12(noise.zeta_amplitude)},
                     {"seed", noise.seed}};
  t.body["statistics"] = per_s;
  return t;
}

// Largest change between consecutive samples of `series` within `radius` of
// `center`.
double MaxStepNear(const std::vector<double>& series, int center, int radius) {
  double worst = 0.0;
  for (int k = std::max(1, center - radius);
       k <= std::min<int>(series.size() - 1, center + radius); ++k) {
    worst = std::max(worst, std::abs(series[k] - series[k - 1]));
  }
  return worst;
}

TaskOutput RunGapFill(const Scenario& s, const Trajectory& first,
                      const Trajectory& second, Outputs& out) {
  const auto& p = std::get<GapFillParams>(s.params);
  const GapFillResult r = GapFill(first, second, s.model, p.spec, p.pose);
  out.Csv("trajectory_original.csv", first);
  out.Csv("trajectory_second.csv", second);
  out.Csv("trajectory_stage1.csv", r.extended1);
  out.Csv("trajectory_stage2.csv", r.extended2);
  out.Csv("trajectory_stage3.csv", r.corrected1);
  out.Csv("trajectory_final.csv", r.joined);

  TaskOutput t;
  if (r.pose) t.body = CorrectionJson(*r.pose, first.dt());
  t.body["concatenated_only"] = r.concatenated_only;
  t.body["junction_index"] = r.junction_index;
  t.body["blend_first"] = r.blend_first;
  t.body["blend_last"] = r.blend_last;
  t.body["blend_curvature"] = Number12(r.blend_curvature);
  t.body["blend_duration"] = Number12(r.blend_duration);
  t.body["admissibility"] = AdmissibilityJson(s.model, r.joined);
  const Recovery rec = RecoverCommands(s.model, r.joined);
  std::vector<double> beta(r.joined.size());
  for (int k = 0; k < r.joined.size(); ++k) beta[k] = rec.states[k].values[3];
  const std::vector<double>& v = rec.commands.channels[0];
  auto continuity = [&](const std::vector<double>& series) {
    const SeriesContinuity c = CheckSeriesContinuity(series, r.joined.dt());
    return json{{"continuous", c.jump_indices.empty()},
                {"jumps", c.jump_indices.size()},
                {"worst_step", Number12(c.worst_step)},
                {"tolerance", Number12(c.tolerance)}};
  };
  t.body["continuity"] = {{"speed", continuity(v)}, {"beta", continuity(beta)}};
  t.body["max_speed_step_near_blend"] =
      Number12(std::max(MaxStepNear(v, r.blend_first, 3), MaxStepNear(v, r.blend_last, 3)));
  t.body["max_beta_step_near_blend"] = Number12(
      std::max(MaxStepNear(beta, r.blend_first, 3), MaxStepNear(beta, r.blend_last, 3)));

  SvgPlot plot("gapfill");
  plot.AddPath(first, StageColor(0), 2.0);
  plot.AddPath(second, StageColor(0), 2.0);
  plot.AddPath(r.extended1, StageColor(1), 1.2, true);
  plot.AddPath(r.extended2, StageColor(1), 1.2, true);
  plot.AddPath(r.corrected1, StageColor(2), 1.5);
  plot.AddPath(r.joined, StageColor(3), 1.0);
  plot.AddLegend("inputs", StageColor(0));
  plot.AddLegend("stubs", StageColor(1));
  plot.AddLegend("pose-corrected", StageColor(2));
  plot.AddLegend("joined", StageColor(3));
  out.Text("plot.svg", plot.Render());
  return t;
}

TaskOutput RunRoundTripCheck(const Scenario& s, double dt, std::uint64_t seed,
                             Outputs& out) {
  const auto& p = std::get<RoundTripParams>(s.params);
  std::vector<std::string> fixtures = p.fixtures;
  if (fixtures.empty()) {
    for (const FixtureInfo& f : ListFixtures()) fixtures.push_back(f.name);
  }
  std::vector<RobotModel> models = p.models;
  if (models.empty()) {
    for (RobotKind k : AllRobotKinds()) {
      RobotModel m{k, 1.0, {}};
      if (k == RobotKind::kCarWithTrailers) m.hitch_lengths = {0.5, 0.5};
      models.push_back(m);
    }
  }
  TaskOutput t;
  json cases = json::array();
  double worst = 0.0;
  int checked = 0, skipped = 0, failed = 0;
  SvgPlot plot("roundtrip_check");
  for (size_t fi = 0; fi < fixtures.size(); ++fi) {
    const Trajectory traj = GenerateBuiltin(fixtures[fi], {}, dt);
    bool plotted = false;
    for (size_t mi = 0; mi < models.size(); ++mi) {
      const RobotModel& m = models[mi];
      json c = {{"fixture", fixtures[fi]}, {"model", ModelJson(m)}};
      if (m.base_dim() != traj.dim()) {
        c["status"] = "skipped";
        c["reason"] = "dimension mismatch";
        ++skipped;
      } else if (!IsAdmissible(CheckAdmissible(m, traj))) {
        c["status"] = "skipped";
        c["reason"] = "fixture not admissible for the model";
        ++skipped;
      } else {
        try {
          const RoundTripResult r = RoundTrip(m, traj, Fnv1a64(fixtures[fi], seed) + mi);
          const bool ok = r.max_deviation <= p.threshold;
          c["status"] = ok ? "pass" : "fail";
          c["max_deviation"] = Number12(r.max_deviation);
          c["tau_index"] = r.tau_index;
          worst = std::max(worst, r.max_deviation);
          ++checked;
          failed += ok ? 0 : 1;
          if (!plotted && traj.dim() == 2) {
            plot.AddPath(traj, StageColor(0), 1.5);
            plot.AddPath(r.deformed, StageColor(2), 1.5);
            plotted = true;
          }
        } catch (const Error& e) {
          if (e.code() == ErrorCode::kInflectionOnlyMatches) {
            c["status"] = "skipped";
            c["reason"] = "no admissible deformation: " + std::string(e.what());
            ++skipped;
          } else {
            c["status"] = "fail";
            c["error"] = ErrorJson(e);
            ++failed;
          }
        }
      }
      cases.push_back(c);
    }
  }
  plot.AddLegend("fixture", StageColor(0));
  plot.AddLegend("deformed", StageColor(2));
  out.Text("plot.svg", plot.Render());
  t.body["threshold"] = Number12(p.threshold);
  t.body["max_deviation"] = Number12(worst);
  t.body["checked"] = checked;
  t.body["skipped"] = skipped;
  t.body["failed"] = failed;
  t.body["cases"] = cases;
  t.failed = failed > 0;
  return t;
}

}  // namespace

RunResult RunScenario(const Scenario& scenario, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  Scenario s = scenario;
  if (options.dt) s.dt = *options.dt;
  const std::uint64_t seed = options.seed.value_or(s.seed);
  const int threads = options.threads.value_or(s.threads);
  result.out_dir = options.out_dir ? *options.out_dir
                   : s.output_dir.is_absolute() ? s.output_dir
                                                : s.base_dir / s.output_dir;

  json report = {{"tool", "affdeform"},
                 {"version", std::string(kToolVersion)},
                 {"task", std::string(TaskName(s.task))}};
  if (s.task != Task::kRoundTripCheck) report["model"] = ModelJson(s.model);
  report["seed"] = seed;

  std::error_code ec;
  std::filesystem::create_directories(result.out_dir, ec);
  const bool can_write = !ec;
  Outputs out(result.out_dir);
  try {
    if (!can_write) {
      throw Error(ErrorCode::kIo, "cannot create " + result.out_dir.string());
    }
    std::uint64_t hash = Fnv1a64(s.source_text);
    Inputs in;
    if (s.input) in.first = LoadSource(*s.input, s.dt, hash);
    if (s.input2) in.second = LoadSource(*s.input2, s.dt, hash);
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    report["input_hash"] = std::string("fnv1a64:") + hex;
    if (in.first) {
      report["input"] = {{"samples", in.first->size()},
                         {"dt", Number12(in.first->dt())},
                         {"dim", in.first->dim()}};
      if (in.first->dim() != s.model.base_dim()) {
        throw SchemaError("input", "trajectory dimension does not match the model");
      }
    }

    TaskOutput t;
    try {
      switch (s.task) {
        case Task::kCorrectPosition:
        case Task::kCorrectOrientation:
        case Task::kCorrectPose:
        case Task::kUwvCorrect:
          t = RunCorrection(s, *in.first, out);
          break;
        case Task::kAvoid: t = RunAvoid(s, *in.first, out); break;
        case Task::kDoorway: t = RunDoorway(s, *in.first, out); break;
        case Task::kFeedback: t = RunFeedback(s, threads, seed, out); break;
        case Task::kGapFill: t = RunGapFill(s, *in.first, *in.second, out); break;
        case Task::kRoundTripCheck:
          t = RunRoundTripCheck(s, s.dt, seed, out);
          break;
      }
    } catch (const SchemaError&) {
      throw;
    } catch (const Error& e) {
      // Library errors from the task itself are task failures, even when the
      // code would otherwise read as an input problem.
      if (ExitCodeFor(e.code()) == 2 && e.code() != ErrorCode::kIo) throw;
      report["status"] = "error";
      report["error"] = ErrorJson(e);
      result.exit_code = 1;
    }
    if (result.exit_code == 0) {
      report["status"] = t.failed ? "failed" : "ok";
      report["result"] = t.body;
      result.exit_code = t.failed ? 1 : 0;
    }
  } catch (const Error& e) {
    report["status"] = "error";
    report["error"] = ErrorJson(e);
    result.exit_code = ExitCodeFor(e.code());
  }
  if (options.timing) {
    report["timing_ms"] = Number12(std::chrono::duration<double, std::milli>(
                                       std::chrono::steady_clock::now() - start)
                                       .count());
  }
  result.files = out.files();
  result.files.push_back("report.json");
  report["files"] = result.files;
  result.report = report;
  if (can_write) {
    std::ofstream f(result.out_dir / "report.json", std::ios::binary);
    f << report.dump(2) << '\n';
  }
  return result;
}

RunResult RunScenarioFile(const std::filesystem::path& path,
                          const RunOptions& options) {
  try {
    return RunScenario(LoadScenario(path), options);
  } catch (const Error& e) {
    RunResult r;
    r.exit_code = ExitCodeFor(e.code());
    r.report = {{"tool", "affdeform"},
                {"version", std::string(kToolVersion)},
                {"status", "error"},
                {"error", ErrorJson(e)}};
    if (options.out_dir) {
      r.out_dir = *options.out_dir;
      std::error_code ec;
      std::filesystem::create_directories(r.out_dir, ec);
      if (!ec) {
        std::ofstream f(r.out_dir / "report.json", std::ios::binary);
        f << r.report.dump(2) << '\n';
        r.files = {"report.json"};
      }
    }
    return r;
  }
}

}  // namespace affdeform
