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

// Robot models: forward integration of commands and the reverse equations
// that recover commands from an admissible base-space trajectory.
//
// The five canonical planar types are named after their (mobility,
// steerability) degrees. Unicycle and KinematicCar are the familiar
// parameterizations of types (2,1) and (1,1); see the correspondence helpers
// at the bottom of this header. Angles are kept unwrapped.

#ifndef AFFDEFORM_KINEMATICS_H_
#define AFFDEFORM_KINEMATICS_H_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "affdeform/trajectory.h"

namespace affdeform {

enum class RobotKind {
  kType30,
  kType20,
  kType21,
  kType11,
  kType12,
  kUnicycle,
  kKinematicCar,
  kCarWithTrailers,
  kUnderwater3D,
};

// Class I: base trajectory admissible iff it is D2. Class II: additionally the
// heading must be D2. Spatial: the underwater vehicle, admissible iff D2.
enum class RobotClass { kClassI, kClassII, kSpatial };

// Velocity-type commands (eta, v) must be D1; rate-type commands (zeta,
// omega) only D0.
enum class CommandKind { kVelocity, kRate };

std::string_view RobotKindName(RobotKind kind);
RobotKind ParseRobotKind(std::string_view name);
std::vector<RobotKind> AllRobotKinds();

struct RobotModel {
  RobotKind kind = RobotKind::kUnicycle;
  // L for Type11, Type12 and KinematicCar; L_0 for CarWithTrailers.
  double wheelbase = 1.0;
  // L_1..L_p for CarWithTrailers.
  std::vector<double> hitch_lengths;

  // Throws kInvalidArgument when a length is not positive or a trailer model
  // has no trailers.
  void Validate() const;

  int base_dim() const;
  RobotClass robot_class() const;
  std::vector<std::string> state_names() const;
  std::vector<std::string> command_names() const;
  std::vector<CommandKind> command_kinds() const;
};

struct FullState {
  std::vector<double> values;
};

struct CommandProfile {
  double dt = 0.0;
  std::vector<std::string> names;
  std::vector<CommandKind> kinds;
  // channels[c][k] is command c at t_k.
  std::vector<std::vector<double>> channels;

  int size() const {
    return channels.empty() ? 0 : static_cast<int>(channels.front().size());
  }
  const std::vector<double>& channel(std::string_view name) const;
};

struct IntegrationResult {
  std::vector<FullState> states;
  Trajectory base;
};

// Classical RK4 on the command grid; commands are linearly interpolated at the
// half steps. Returns one state per command sample.
IntegrationResult Integrate(const RobotModel& model, const FullState& initial,
                            const CommandProfile& commands);

// Free functions the reverse equations leave open. Empty vectors select the
// defaults: constant orientation `orientation_constant` for Type30/21/12, zero
// roll for the underwater vehicle, trailers aligned with the car at t = 0.
struct RecoveryAux {
  std::vector<double> orientation;
  double orientation_constant = 0.0;
  std::vector<double> roll;
  std::vector<double> trailer_initial;
  bool verify_admissible = true;
};

struct Recovery {
  CommandProfile commands;
  std::vector<FullState> states;
};

Recovery RecoverCommands(const RobotModel& model, const Trajectory& traj,
                         const RecoveryAux& aux = {});

RegularityReport CheckAdmissible(const RobotModel& model,
                                 const Trajectory& traj);
inline bool IsAdmissible(const RegularityReport& report) {
  return report.is_d2 && report.heading_d2;
}

// |sin(beta)| below this makes the Type11 reverse equations singular.
inline constexpr double kSingularSteering = 1e-8;
// |cos(pitch)| below this is treated as an Euler-angle singularity.
inline constexpr double kEulerSingularity = 1e-6;

// Canonical-type correspondences. The unicycle is a (2,1) robot with its
// orientation frozen at zero; the kinematic car is a (1,1) robot.
struct UnicycleVars {
  double theta = 0.0;
  double v = 0.0;
  double omega = 0.0;
};
struct Type21Vars {
  double theta = 0.0;
  double beta = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
  double zeta = 0.0;
};
struct CarVars {
  double theta = 0.0;
  double beta = 0.0;
  double v = 0.0;
  double zeta = 0.0;
};
struct Type11Vars {
  double theta = 0.0;
  double beta = 0.0;
  double eta1 = 0.0;
  double zeta = 0.0;
};

Type21Vars UnicycleToCanonical(const UnicycleVars& u);
UnicycleVars CanonicalToUnicycle(const Type21Vars& c);
Type11Vars CarToCanonical(const CarVars& car, double wheelbase);
CarVars CanonicalToCar(const Type11Vars& c, double wheelbase);

// `t,<state fields>` dump, one row per state.
void WriteStatesCsv(std::ostream& out, const RobotModel& model, double dt,
                    const std::vector<FullState>& states);

}  // namespace affdeform

#endif  // AFFDEFORM_KINEMATICS_H_
