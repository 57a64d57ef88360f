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

// Analytic test trajectories.

#ifndef AFFDEFORM_FIXTURES_H_
#define AFFDEFORM_FIXTURES_H_

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "affdeform/trajectory.h"

namespace affdeform {

using FixtureParams = std::map<std::string, double, std::less<>>;

struct FixtureInfo {
  std::string name;
  int dim = 2;
  std::string description;
  FixtureParams defaults;
};

std::vector<FixtureInfo> ListFixtures();

// Samples the named curve on K = max(8, round(T / dt)) intervals. The step is
// adjusted to T / K so that the last sample lands exactly on t = T. Missing
// parameters take their defaults; unknown ones are rejected.
Trajectory GenerateBuiltin(std::string_view name, const FixtureParams& params,
                           double dt = 1e-3);

// Rigid placement: rotates `traj` about the origin by `heading` (planar only)
// and then translates it by `origin`.
Trajectory Place(const Trajectory& traj, const Vec3& origin, double heading);

// Two circle arcs of radius 3 (T = 3 s at 1 m/s). The first ends heading
// 1 rad; the second starts 2 m away along its own heading of 1.3 rad.
std::pair<Trajectory, Trajectory> GapFillFixture(double dt = 1e-3);

}  // namespace affdeform

#endif  // AFFDEFORM_FIXTURES_H_
