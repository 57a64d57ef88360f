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

// Re-integration oracle: deform, recover the commands, integrate them and
// compare with the deformed base trajectory.

#ifndef AFFDEFORM_ROUNDTRIP_H_
#define AFFDEFORM_ROUNDTRIP_H_

#include <cstdint>

#include "affdeform/deform.h"
#include "affdeform/kinematics.h"
#include "affdeform/trajectory.h"

namespace affdeform {

// Random map of the family that is admissible for `model`: class I gets
// Class1Map, class II gets Class2Map, the underwater vehicle gets UwvMap.
// Parameters are drawn so that ||M - I||_F is at most about `magnitude`; tau is
// drawn from the middle half of the trajectory, avoiding inflections for
// class II.
struct RandomDeformation {
  int tau_index = 0;
  AffineMap map;
};
RandomDeformation RandomAdmissibleDeformation(const RobotModel& model,
                                              const Trajectory& traj,
                                              std::uint64_t seed,
                                              double magnitude = 0.3);

struct RoundTripResult {
  int tau_index = 0;
  AffineMap map;
  Trajectory deformed;
  Trajectory reintegrated;
  // max_k |reintegrated[k] - deformed[k]|.
  double max_deviation = 0.0;
};

// The (1,2) robot recovers with its body orientation ramping linearly between
// the end headings of the path; the other models use the RecoveryAux defaults. Throws the recovery
// errors (e.g. kAdmissibilityViolation) unchanged.
RoundTripResult RoundTrip(const RobotModel& model, const Trajectory& traj,
                          std::uint64_t seed, double magnitude = 0.3);

// Recovers and re-integrates `traj` itself.
double ReintegrationError(const RobotModel& model, const Trajectory& traj);

}  // namespace affdeform

#endif  // AFFDEFORM_ROUNDTRIP_H_
