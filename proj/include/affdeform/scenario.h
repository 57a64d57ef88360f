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

// JSON scenario files: parsing with field-path diagnostics, execution, and the
// emitted CSV traces, report.json and plot.svg. The format is documented in
// README.md.

#ifndef AFFDEFORM_SCENARIO_H_
#define AFFDEFORM_SCENARIO_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "affdeform/apps.h"
#include "affdeform/correct.h"
#include "affdeform/deform.h"
#include "affdeform/error.h"
#include "affdeform/fixtures.h"
#include "affdeform/kinematics.h"
#include "json.hpp"

namespace affdeform {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Task {
  kCorrectPosition,
  kCorrectOrientation,
  kCorrectPose,
  kUwvCorrect,
  kAvoid,
  kDoorway,
  kFeedback,
  kGapFill,
  kRoundTripCheck,
};

std::string_view TaskName(Task task);

// A schema violation located at a JSON field path such as `params.target[1]`.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message)
      : Error(ErrorCode::kSchemaViolation,
              (path.empty() ? std::string("<root>") : path) + ": " + message),
        path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct TrajectorySource {
  // Exactly one of the two is set.
  std::filesystem::path csv;
  std::string generator;
  FixtureParams params;
  // Optional rigid placement applied after loading, see Place().
  bool placed = false;
  Vec3 place_origin = Vec3::Zero();
  double place_heading = 0.0;
};

// Targets may be absolute or relative to the input trajectory; the relative
// forms are resolved when the task runs.
struct PositionParams {
  std::optional<Vec3> target;
  Vec3 offset = Vec3::Zero();
  // auto, class1, one_step, two_step, uwv.
  std::string method = "auto";
  int tau = -1;
  int tau1 = -1;
  int tau2 = -1;
};

struct OrientationParams {
  std::optional<double> heading;
  double heading_offset = 0.0;
};

struct PoseParams {
  std::optional<Vec3> target;
  Vec3 offset = Vec3::Zero();
  std::optional<double> heading;
  double heading_offset = 0.0;
  PoseOptions options;
};

struct AvoidParams {
  ObstacleSet obstacles;
  AvoidOptions options;
};

struct DoorwayParams {
  int door_index = -1;
  double door_time = -1.0;
  std::optional<Vec3> position;
  double lateral_offset = 0.0;
  std::optional<double> heading;
};

struct FeedbackParams {
  std::vector<int> corrections = {0, 1, 5};
  int runs = 500;
  NoiseModel noise = DefaultFeedbackNoise();
  double plan_dt = 1e-2;
  double duration = 40.0;
  FeedbackOptions options;
};

struct GapFillParams {
  GapSpec spec;
  PoseOptions pose;
};

struct RoundTripParams {
  // Empty selects every built-in fixture / every model kind.
  std::vector<std::string> fixtures;
  std::vector<RobotModel> models;
  double threshold = 1e-4;
  double magnitude = 0.3;
};

using TaskParams =
    std::variant<PositionParams, OrientationParams, PoseParams, AvoidParams,
                 DoorwayParams, FeedbackParams, GapFillParams, RoundTripParams>;

struct Scenario {
  Task task = Task::kCorrectPosition;
  RobotModel model;
  std::optional<TrajectorySource> input;
  std::optional<TrajectorySource> input2;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  int threads = 1;
  std::filesystem::path output_dir = "out";
  TauSearchPolicy policy;
  TaskParams params;
  // Directory relative paths are resolved against.
  std::filesystem::path base_dir;
  // Raw scenario bytes, hashed into the report.
  std::string source_text;
};

// Throws SchemaError for malformed or inconsistent input and Error(kIo) when
// a referenced file is missing.
Scenario ParseScenario(std::string_view text,
                       const std::filesystem::path& base_dir = ".");
Scenario LoadScenario(const std::filesystem::path& path);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  // Adds wall-clock timing to the report, which makes it non-deterministic.
  bool timing = false;
};

struct RunResult {
  // 0 success, 1 task failure, 2 input error.
  int exit_code = 0;
  nlohmann::json report;
  std::filesystem::path out_dir;
  std::vector<std::string> files;
};

// Never throws for task or input errors: they are reported in `report` with
// the matching exit code. report.json is written whenever the output
// directory can be created.
RunResult RunScenario(const Scenario& scenario, const RunOptions& options = {});
RunResult RunScenarioFile(const std::filesystem::path& path,
                          const RunOptions& options = {});

int ExitCodeFor(ErrorCode code);
nlohmann::json ErrorJson(const Error& error);

// `fixed_point`, row-major `matrix` and `offset`, each cut to the map dim.
nlohmann::json MapToJson(const AffineMap& map);
AffineMap MapFromJson(const nlohmann::json& j);

std::uint64_t Fnv1a64(std::string_view bytes,
                      std::uint64_t hash = 0xcbf29ce484222325ULL);

// Rounds to 12 significant digits so that JSON output is stable; non-finite
// values become null.
nlohmann::json Number12(double value);

}  // namespace affdeform

#endif  // AFFDEFORM_SCENARIO_H_
