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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "affdeform/trajectory.h"

namespace affdeform {
namespace {

namespace fs = std::filesystem;

// Returns the path of the schema violation raised by parsing `text`, or
// "<none>".
std::string ErrorPath(const std::string& text) {
  try {
    ParseScenario(text);
  } catch (const SchemaError& e) {
    return e.path();
  }
  return "<none>";
}

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("affdeform_scenario_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Trajectory ReadCsv(const fs::path& path) {
  std::ifstream in(path);
  return ReadTrajectoryCsv(in);
}

TEST(ParseScenarioTest, MinimalScenarioAndDefaults) {
  const Scenario s = ParseScenario(R"({
    "task": "correct_position", "model": "unicycle",
    "input": {"generator": "scurve"}, "params": {"target": [4.2, 0.3]}})");
  EXPECT_EQ(s.task, Task::kCorrectPosition);
  EXPECT_EQ(s.model.kind, RobotKind::kUnicycle);
  EXPECT_EQ(s.dt, 1e-3);
  EXPECT_EQ(s.seed, 1u);
  ASSERT_TRUE(s.input.has_value());
  EXPECT_EQ(s.input->generator, "scurve");
  const auto& p = std::get<PositionParams>(s.params);
  ASSERT_TRUE(p.target.has_value());
  EXPECT_EQ(*p.target, Vec3(4.2, 0.3, 0));
  EXPECT_EQ(p.method, "auto");
}

TEST(ParseScenarioTest, ModelObjectsAndTrailerDefault) {
  const Scenario car = ParseScenario(R"({
    "task": "correct_orientation",
    "model": {"kind": "kinematic_car", "wheelbase": 2.5},
    "input": {"generator": "scurve"}, "params": {"heading_offset": 0.1}})");
  EXPECT_EQ(car.model.kind, RobotKind::kKinematicCar);
  EXPECT_EQ(car.model.wheelbase, 2.5);
  const Scenario trailers = ParseScenario(R"({
    "task": "correct_orientation", "model": "car_with_trailers",
    "input": {"generator": "scurve"}, "params": {"heading_offset": 0.1}})");
  EXPECT_EQ(trailers.model.hitch_lengths, std::vector<double>{1.0});
}

TEST(ParseScenarioTest, TaskDefaults) {
  const Scenario fb = ParseScenario(R"({"task": "feedback"})");
  EXPECT_EQ(fb.model.kind, RobotKind::kKinematicCar);
  const auto& p = std::get<FeedbackParams>(fb.params);
  EXPECT_EQ(p.corrections, (std::vector<int>{0, 1, 5}));
  EXPECT_EQ(p.runs, 500);
  const Scenario rt = ParseScenario(R"({"task": "roundtrip_check"})");
  EXPECT_FALSE(rt.input.has_value());
}

TEST(ParseScenarioTest, ErrorsNameTheFieldPath) {
  EXPECT_EQ(ErrorPath(R"({"task": "correct_position", "model": "unicycle",
      "input": {"generator": "scurve"}, "params": {"target": [1, "x"]}})"),
            "params.target[1]");
  EXPECT_EQ(ErrorPath(R"({"task": "correct_position", "model": "unicycle",
      "input": {"generator": "scurve"}, "params": {"target": [1, 2]}, "colour": 1})"),
            "colour");
  EXPECT_EQ(ErrorPath(R"({"task": "fly", "model": "unicycle"})"), "task");
  EXPECT_EQ(ErrorPath(R"({"task": "correct_position", "model": "hovercraft",
      "input": {"generator": "scurve"}, "params": {"target": [1, 2]}})"),
            "model");
  EXPECT_EQ(ErrorPath(R"({"task": "correct_position", "model": "unicycle",
      "params": {"target": [1, 2]}})"),
            "input");
  EXPECT_EQ(ErrorPath(R"({"task": "correct_pose", "model": "kinematic_car",
      "input": {"generator": "curved_seed"},
      "params": {"target": [20, 40], "heading": 1.4, "scan_points": 800}})"),
            "params.scan_points");
  EXPECT_EQ(ErrorPath(R"({"task": "avoid", "model": "kinematic_car",
      "input": {"generator": "circle"},
      "params": {"obstacles": [{"type": "disc", "center": [0, 1], "radius": -1}]}})"),
            "params.obstacles[0].radius");
  EXPECT_EQ(ErrorPath(R"({"task": "correct_orientation", "model": "kinematic_car",
      "input": {"generator": "scurve"}, "params": {"heading": 1, "heading_offset": 0.1}})"),
            "params.heading_offset");
  EXPECT_EQ(ErrorPath(R"({"task": "correct_position", "model": "unicycle",
      "input": {"generator": "scurve", "params": {"radius": 2}},
      "params": {"target": [1, 2]}})"),
            "input.params.radius");
  EXPECT_EQ(ErrorPath(R"({"task": "correct_position", "model": "unicycle",
      "input": {"generator": "scurve"}, "dt": 0, "params": {"target": [1, 2]}})"),
            "dt");
  EXPECT_EQ(ErrorPath("[1, 2]"), "");
}

TEST(ParseScenarioTest, UnknownGeneratorAndMissingFile) {
  try {
    ParseScenario(R"({"task": "correct_position", "model": "unicycle",
        "input": {"generator": "spiral"}, "params": {"target": [1, 2]}})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(ExitCodeFor(e.code()), 2);
  }
  try {
    LoadScenario("/nonexistent/scenario.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
    EXPECT_EQ(ExitCodeFor(e.code()), 2);
  }
}

TEST(ExitCodeTest, Mapping) {
  EXPECT_EQ(ExitCodeFor(ErrorCode::kSchemaViolation), 2);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kIo), 2);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kNoAccessibleTangent), 1);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kRootNotBracketed), 1);
}

TEST(SerializationTest, Fnv1aReferenceValues) {
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(Fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(SerializationTest, Number12) {
  EXPECT_EQ(Number12(0.1 + 0.2).dump(), "0.3");
  EXPECT_EQ(Number12(1.0 / 3.0).get<double>(), 0.333333333333);
  EXPECT_TRUE(Number12(std::nan("")).is_null());
  EXPECT_TRUE(Number12(INFINITY).is_null());
  EXPECT_EQ(Number12(0.0).get<double>(), 0.0);
}

TEST(SerializationTest, MapJsonRoundTrip) {
  const Trajectory s = GenerateBuiltin("scurve", {}, 1e-3);
  AffineMap m = Class1Map(s, {1200, 0.3, -0.1});
  m.offset = Vec3(0.25, -0.5, 0);
  const AffineMap back = MapFromJson(MapToJson(m));
  EXPECT_EQ(back.dim, 2);
  EXPECT_LT((back.matrix - m.matrix).cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_LT((back.fixed_point - m.fixed_point).norm(), 1e-11);
  EXPECT_LT((back.offset - m.offset).norm(), 1e-11);
  const Trajectory helix = GenerateBuiltin("helix", {}, 1e-3);
  const AffineMap u = UwvMap(helix, {1000, 0.1, 0.2, 0.3, -0.1, 0.05, 0.0});
  const AffineMap u_back = MapFromJson(MapToJson(u));
  EXPECT_EQ(u_back.dim, 3);
  EXPECT_LT((u_back.matrix - u.matrix).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(RunScenarioTest, CorrectionReportAndFiles) {
  const fs::path dir = TempDir("position");
  Scenario s = ParseScenario(R"({
    "task": "correct_position", "model": "kinematic_car",
    "input": {"generator": "scurve"}, "params": {"offset": [0.2, 0.3]}})");
  RunOptions options;
  options.out_dir = dir;
  const RunResult r = RunScenario(s, options);
  ASSERT_EQ(r.exit_code, 0) << r.report.dump();
  EXPECT_EQ(r.report["status"], "ok");
  EXPECT_EQ(r.report["task"], "correct_position");
  EXPECT_EQ(r.report["version"], std::string(kToolVersion));
  EXPECT_EQ(r.report["input_hash"].get<std::string>().rfind("fnv1a64:", 0), 0u);
  EXPECT_FALSE(r.report.contains("timing_ms"));
  for (const char* f : {"report.json", "plot.svg", "trajectory_original.csv",
                        "trajectory_final.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  // The deformations in the report reproduce the final CSV.
  const Trajectory original = ReadCsv(dir / "trajectory_original.csv");
  const Trajectory final_csv = ReadCsv(dir / "trajectory_final.csv");
  std::vector<Deformation> defs;
  for (const auto& d : r.report["result"]["deformations"]) {
    nlohmann::json map = d;
    for (const char* key : {"tau_index", "tau_time", "distance_from_identity"}) {
      map.erase(key);
    }
    defs.push_back({d["tau_index"].get<int>(), MapFromJson(map)});
  }
  ASSERT_FALSE(defs.empty());
  const Trajectory replayed = Replay(original, defs);
  double worst = 0.0;
  for (int k = 0; k < replayed.size(); ++k) {
    worst = std::max(worst, (replayed[k] - final_csv[k]).norm());
  }
  EXPECT_LT(worst, 1e-9);
  const Vec3 target = original.back() + Vec3(0.2, 0.3, 0);
  EXPECT_LT((final_csv.back() - target).norm(), 1e-9);
  EXPECT_LT(r.report["result"]["residual_position"].get<double>(), 1e-9);
  EXPECT_TRUE(r.report["result"]["admissibility"]["admissible"].get<bool>());
}

TEST(RunScenarioTest, DtOverrideAndTiming) {
  const fs::path dir = TempDir("dt");
  Scenario s = ParseScenario(R"({
    "task": "correct_position", "model": "unicycle",
    "input": {"generator": "scurve"}, "params": {"offset": [0.1, 0.0]}})");
  RunOptions options;
  options.out_dir = dir;
  options.dt = 2e-3;
  options.timing = true;
  const RunResult r = RunScenario(s, options);
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(ReadCsv(dir / "trajectory_final.csv").size(), 2001);
  EXPECT_TRUE(r.report.contains("timing_ms"));
}

TEST(RunScenarioTest, TaskFailureIsExitOne) {
  const fs::path dir = TempDir("failure");
  Scenario s = ParseScenario(R"({
    "task": "correct_position", "model": "kinematic_car",
    "input": {"generator": "circle", "params": {"T": 0.5}},
    "params": {"offset": [-0.05, 0.3], "method": "one_step"}})");
  RunOptions options;
  options.out_dir = dir;
  const RunResult r = RunScenario(s, options);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.report["status"], "error");
  EXPECT_EQ(r.report["error"]["code"], "NoAccessibleTangent");
  EXPECT_TRUE(fs::exists(dir / "report.json"));
}

TEST(RunScenarioTest, CsvInputRelativeToScenario) {
  const fs::path dir = TempDir("csv");
  {
    std::ofstream csv(dir / "path.csv");
    WriteTrajectoryCsv(csv, GenerateBuiltin("circle", {}, 1e-3));
    std::ofstream json(dir / "scenario.json");
    json << R"({"task": "correct_position", "model": "unicycle",
               "input": {"csv": "path.csv"}, "params": {"offset": [0.1, 0.1]},
               "output_dir": "out"})";
  }
  const RunResult r = RunScenarioFile(dir / "scenario.json");
  ASSERT_EQ(r.exit_code, 0) << r.report.dump();
  EXPECT_TRUE(fs::exists(dir / "out" / "report.json"));
  EXPECT_EQ(r.report["input"]["samples"], 3143);
}

TEST(RunScenarioTest, PlacementRejectsZOffsetForPlanarInput) {
  const fs::path dir = TempDir("place");
  Scenario s = ParseScenario(R"({
    "task": "correct_position", "model": "unicycle",
    "input": {"generator": "scurve", "place": {"origin": [1, 2, 3], "heading": 0}},
    "params": {"offset": [0.1, 0.0]}})");
  RunOptions options;
  options.out_dir = dir;
  EXPECT_EQ(RunScenario(s, options).exit_code, 2);
}

TEST(RunScenarioTest, IdenticalRunsAreByteIdentical) {
  auto run = [](const std::string& name) {
    const fs::path dir = TempDir(name);
    Scenario s = ParseScenario(R"({
      "task": "feedback", "seed": 11, "threads": 3,
      "params": {"corrections": [0, 2], "runs": 6}})");
    RunOptions options;
    options.out_dir = dir;
    EXPECT_EQ(RunScenario(s, options).exit_code, 0);
    std::string all;
    for (const char* f : {"report.json", "feedback_S0.csv", "feedback_S2.csv", "plot.svg"}) {
      std::ifstream in(dir / f, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      all += ss.str();
    }
    return all;
  };
  const std::string a = run("det_a");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, run("det_b"));
}

}  // namespace
}  // namespace affdeform
