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

// Applications built on the corrections: obstacle avoidance, doorway
// constraints, feedback under command noise, and gap filling.
//
// All of them use the class-II deformations, which are also admissible for
// class-I robots.

#ifndef AFFDEFORM_APPS_H_
#define AFFDEFORM_APPS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "affdeform/correct.h"
#include "affdeform/kinematics.h"
#include "affdeform/trajectory.h"

namespace affdeform {

struct Disc {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  // False for obstacles that appear after planning. Only used for plotting.
  bool known = true;
};

struct Rect {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
  bool known = true;
};

struct ObstacleSet {
  std::vector<Disc> discs;
  std::vector<Rect> rects;

  void Validate() const;
  bool empty() const { return discs.empty() && rects.empty(); }
  // Signed distance to the nearest obstacle, negative inside.
  double Distance(const Vec3& p) const;
};

struct AvoidOptions {
  // Required distance between the path and every obstacle.
  double clearance = 0.1;
  // Extra push beyond the clearance when placing a waypoint.
  double waypoint_margin = 0.05;
  int max_iterations = 10;
  TauSearchPolicy policy;
};

struct AvoidResult {
  CorrectionResult correction;
  int iterations = 0;
  std::vector<Vec3> waypoints;
  std::vector<int> obstacle_indices;
  // Trajectory after each iteration, for plotting.
  std::vector<Trajectory> stages;
};

AvoidResult AvoidObstacles(const Trajectory& traj, const RobotModel& model,
                           const ObstacleSet& obstacles,
                           const AvoidOptions& options = {});

struct DoorwayResult {
  CorrectionResult correction;
  double residual_door_position = 0.0;
  double residual_door_heading = 0.0;
  std::vector<Trajectory> stages;
};

// Moves C(t_door) to `position` with heading `heading`, then restores the
// original final position with deformations after t_door.
DoorwayResult DoorwayConstraint(const Trajectory& traj, const RobotModel& model,
                                int door_index, const Vec3& position,
                                double heading,
                                const TauSearchPolicy& policy = {});

// Piecewise-constant Gaussian noise on the acceleration and steering-rate
// commands of a kinematic car with speed as a state.
struct NoiseModel {
  double segment_duration = 1.0;
  double accel_amplitude = 0.0;  // std of the a-channel, m/s^2
  double zeta_amplitude = 0.0;   // std of the zeta-channel, rad/s
  std::uint64_t seed = 1;
};

// Calibrated so the uncorrected final error is a few meters on the default
// 40 m feedback plan.
NoiseModel DefaultFeedbackNoise();

struct FeedbackOptions {
  int corrections = 0;  // S
  int runs = 1;
  int threads = 1;
  // New commands are accepted iff max |a| and max |zeta| stay below
  // factor * max(planned maximum, floor).
  double accept_factor = 3.0;
  double accel_floor = 0.5;
  double zeta_floor = 0.2;
  TauSearchPolicy policy;
};

struct FeedbackStats {
  std::vector<double> time;
  // Root-mean-square distance of the runs' positions to their mean.
  std::vector<double> variability;
  std::vector<Vec3> mean_path;
  std::vector<double> final_errors;
  double final_error_mean = 0.0;
  double final_error_std = 0.0;
  // Per-run maxima of |a|, |zeta| and |beta| over the executed plan.
  std::vector<double> max_accel;
  std::vector<double> max_zeta;
  std::vector<double> max_beta;
  double max_accel_mean = 0.0;
  double max_zeta_mean = 0.0;
  double max_beta_mean = 0.0;
  int corrections_attempted = 0;
  int corrections_accepted = 0;
  // One representative run (index 0), for plotting.
  std::vector<Vec3> sample_path;
};

// Kinematic car (x, y, theta, beta) plan given by its (v, zeta) profile.
FeedbackStats FeedbackSimulate(const RobotModel& model,
                               const CommandProfile& planned,
                               const FullState& initial,
                               const NoiseModel& noise,
                               const FeedbackOptions& options);

// Default 40 m plan: speed around 1 m/s, smoothly varying steering, starting
// from DefaultFeedbackInitial().
CommandProfile DefaultFeedbackPlan(double dt = 1e-2, double duration = 40.0);
FullState DefaultFeedbackInitial();

// `t,variability,mean_x,mean_y` rows.
void WriteFeedbackCsv(std::ostream& out, const FeedbackStats& stats);

struct GapSpec {
  double delta_a = 1.0;          // counter-steer duration, s
  double delta_b = 1.0;          // straight stub duration, s
  double max_steer_rate = 1.0;   // rad/s
  double max_accel = 2.0;        // m/s^2
};

struct GapFillResult {
  Trajectory joined;
  // True when the inputs already join smoothly and were concatenated as is.
  bool concatenated_only = false;
  Trajectory extended1;
  Trajectory extended2;
  Trajectory corrected1;
  std::optional<CorrectionResult> pose;
  // Samples of `joined` where the speed blend starts and ends.
  int blend_first = 0;
  int blend_last = 0;
  double blend_curvature = 0.0;  // c in v(t) = s1 + (s2 - s1) t / D + c t (D - t)
  double blend_duration = 0.0;
  // Index in `joined` of the first sample taken from trajectory 2.
  int junction_index = 0;
};

GapFillResult GapFill(const Trajectory& traj1, const Trajectory& traj2,
                      const RobotModel& model, const GapSpec& spec,
                      const PoseOptions& pose_options = {});

// splitmix64 finalizer of (seed, run).
std::uint64_t ChildSeed(std::uint64_t seed, std::uint64_t run);

}  // namespace affdeform

#endif  // AFFDEFORM_APPS_H_
