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

// affdeform run <scenario.json> [--out DIR] [--dt X] [--seed N] [--threads N]
// affdeform validate <scenario.json>
// affdeform fixtures list

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "affdeform/fixtures.h"
#include "affdeform/scenario.h"
#include "affdeform/trajectory.h"

namespace {

using affdeform::Error;
using affdeform::ErrorJson;
using affdeform::ExitCodeFor;

int Run(const std::string& path, const affdeform::RunOptions& options) {
  const affdeform::RunResult r = affdeform::RunScenarioFile(path, options);
  const nlohmann::json& report = r.report;
  if (report.contains("error")) {
    std::cerr << report["error"].dump() << '\n';
  }
  std::cout << "status: " << report.value("status", "error") << '\n';
  if (!r.out_dir.empty()) std::cout << "output: " << r.out_dir.string() << '\n';
  if (report.contains("result")) {
    const nlohmann::json& result = report["result"];
    for (const char* key : {"residual_position", "residual_orientation",
                            "max_deviation", "min_clearance"}) {
      if (result.contains(key)) {
        std::cout << key << ": " << result[key].dump() << '\n';
      }
    }
  }
  return r.exit_code;
}

int Validate(const std::string& path) {
  try {
    const affdeform::Scenario s = affdeform::LoadScenario(path);
    std::cout << "ok: " << affdeform::TaskName(s.task) << '\n';
    return 0;
  } catch (const Error& e) {
    std::cerr << ErrorJson(e).dump() << '\n';
    return ExitCodeFor(e.code());
  }
}

int ListFixtures() {
  for (const affdeform::FixtureInfo& f : affdeform::ListFixtures()) {
    std::cout << f.name << " (" << f.dim << "D): " << f.description << '\n';
    for (const auto& [name, value] : f.defaults) {
      std::cout << "  " << name << " = " << affdeform::FormatNumber(value)
                << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Affine deformations of nonholonomic robot trajectories"};
  app.set_version_flag("--version", std::string(affdeform::kToolVersion));
  app.require_subcommand(1);

  std::string scenario_path;
  std::optional<std::string> out_dir;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool timing = false;

  CLI::App* run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("scenario", scenario_path, "Scenario JSON")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--dt", dt, "Sampling step of built-in generators")
      ->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Random seed");
  run->add_option("--threads", threads, "Worker threads for feedback runs")
      ->check(CLI::Range(1, 1024));
  run->add_flag("--timing", timing, "Add wall-clock timing to the report");

  CLI::App* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("scenario", scenario_path, "Scenario JSON")->required();

  CLI::App* fixtures = app.add_subcommand("fixtures", "Built-in trajectories");
  fixtures->require_subcommand(1);
  CLI::App* list = fixtures->add_subcommand("list", "List generators");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (run->parsed()) {
    affdeform::RunOptions options;
    if (out_dir) options.out_dir = *out_dir;
    options.dt = dt;
    options.seed = seed;
    options.threads = threads;
    options.timing = timing;
    return Run(scenario_path, options);
  }
  if (validate->parsed()) return Validate(scenario_path);
  if (list->parsed()) return ListFixtures();
  return 2;
}
