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

// Final-position and final-orientation corrections.
//
// Every correction treats the last sample of its input as C(T). To correct an
// intermediate point, pass a prefix slice and replay the returned deformations
// on the full trajectory (the tau indices are unchanged by slicing at 0).

#ifndef AFFDEFORM_CORRECT_H_
#define AFFDEFORM_CORRECT_H_

#include <string>
#include <utility>
#include <vector>

#include "affdeform/deform.h"
#include "affdeform/trajectory.h"

namespace affdeform {

struct Deformation {
  int tau_index = 0;
  AffineMap map;
};

struct CorrectionResult {
  // Applied in order; Replay(input, deformations) reproduces `corrected`.
  std::vector<Deformation> deformations;
  Trajectory corrected;
  double residual_position = 0.0;
  double residual_orientation = 0.0;
  bool has_orientation = false;
  // Scalar parameters of the solve, for reports: (lambda, mu) for class I,
  // the six parameters for the spatial solve, the alphas for multi-step
  // corrections.
  std::vector<std::pair<std::string, double>> parameters;
};

Trajectory Replay(const Trajectory& input,
                  const std::vector<Deformation>& deformations);

// Which samples may serve as tau.
struct TauSearchPolicy {
  int stride = 1;
  // tau is kept in [margin * K, (1 - margin) * K].
  double margin_fraction = 0.05;
  // Samples within this distance of a flagged inflection are excluded.
  int inflection_guard = 2;
  // Optional extra bounds on tau, inclusive; negative means unbounded.
  int min_index = -1;
  int max_index = -1;
  // Remove the grid-localization residual with a small two-step pass.
  bool micro_correct = true;
};

// Residual above which the micro-correction pass runs.
inline constexpr double kMicroCorrectionThreshold = 1e-9;

// Non-inflection candidate samples allowed by the policy, ascending.
std::vector<int> TauCandidates(const Trajectory& traj,
                               const TauSearchPolicy& policy);

// Class I, two parameters at a given tau.
CorrectionResult Class1CorrectPosition(const Trajectory& traj, int tau_index,
                                       const Vec3& target);
// Same, choosing tau among the policy candidates by least ||M - I||_F.
CorrectionResult Class1CorrectPositionAuto(const Trajectory& traj,
                                           const Vec3& target,
                                           const TauSearchPolicy& policy = {});

// Class II, single deformation at a sample whose tangent is collinear with
// target - C(T), followed by the micro-correction pass.
CorrectionResult Class2CorrectPosition(const Trajectory& traj,
                                       const Vec3& target,
                                       const TauSearchPolicy& policy = {});

enum class TwoStepOrder {
  // Deformation at tau2 first, so that v(tau1) is untouched. Exact.
  kLaterFirst,
  // tau1 first. Kept to demonstrate that it misses the target.
  kEarlierFirst,
};

CorrectionResult Class2CorrectPosition2Step(
    const Trajectory& traj, const Vec3& target, int tau1, int tau2,
    TwoStepOrder order = TwoStepOrder::kLaterFirst);

// Two-step correction with tau1 < tau2 chosen among the candidates by least
// total ||M - I||_F.
CorrectionResult Class2CorrectPosition2StepAuto(
    const Trajectory& traj, const Vec3& target,
    const TauSearchPolicy& policy = {});

// One-step if some tangent matches, otherwise two-step.
CorrectionResult Class2ReachPosition(const Trajectory& traj,
                                     const Vec3& target,
                                     const TauSearchPolicy& policy = {});

// Rotates the final tangent onto `u_d` at a tau whose tangent line passes
// through C(T), then restores C(T) exactly.
CorrectionResult Class2CorrectOrientation(const Trajectory& traj,
                                          const Vec3& u_d,
                                          const TauSearchPolicy& policy = {});

struct PoseOptions {
  double alpha_max = 10.0;
  // Odd, so that alpha3 = 0 is on the grid.
  int scan_points = 801;
  double root_tolerance = 1e-10;
  // Explicit taus; all negative selects arc-length quantiles 0.2/0.5/0.8.
  int tau1 = -1;
  int tau2 = -1;
  int tau3 = -1;
};

struct PoseTaus {
  int tau1 = 0;
  int tau2 = 0;
  int tau3 = 0;
};

PoseTaus ChoosePoseTaus(const Trajectory& traj, const TauSearchPolicy& policy,
                        const PoseOptions& options = {});

// Final heading after the deformation at tau3 with parameter alpha3 and the
// two-step return to `target`, evaluated from frame data only. NaN when a
// step is singular.
double PoseHeadingForAlpha(const Trajectory& traj, const Vec3& target,
                           const PoseTaus& taus, double alpha3);

CorrectionResult Class2CorrectPose3Step(const Trajectory& traj,
                                        const Vec3& target, double theta_d,
                                        const TauSearchPolicy& policy = {},
                                        const PoseOptions& options = {});

// Six-parameter spatial correction, minimal parameter norm.
CorrectionResult UwvCorrectPosition(const Trajectory& traj, int tau_index,
                                    const Vec3& target);
CorrectionResult UwvCorrectPositionAuto(const Trajectory& traj,
                                        const Vec3& target,
                                        const TauSearchPolicy& policy = {});

// Wraps to (-pi, pi].
double WrapAngle(double angle);
double FinalHeading(const Trajectory& traj);

}  // namespace affdeform

#endif  // AFFDEFORM_CORRECT_H_
