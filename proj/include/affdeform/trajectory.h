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

#ifndef AFFDEFORM_TRAJECTORY_H_
#define AFFDEFORM_TRAJECTORY_H_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace affdeform {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// A base-space curve sampled on the uniform grid t_k = k * dt, k = 0..K.
//
// Planar trajectories keep z = 0 in every sample so that the same storage and
// the same 3x3 algebra serve both dimensions. Construction validates the grid
// invariants: K >= 8, dt > 0, finite samples, and a discrete speed above
// `min_speed` at every interior sample.
class Trajectory {
 public:
  static constexpr int kMinSegments = 8;
  static constexpr double kDefaultMinSpeed = 1e-6;

  Trajectory(int dim, double dt, std::vector<Vec3> points,
             double min_speed = kDefaultMinSpeed);

  int dim() const { return dim_; }
  double dt() const { return dt_; }
  double min_speed() const { return min_speed_; }
  // Number of samples, K + 1.
  int size() const { return static_cast<int>(points_.size()); }
  // K, the index of the final sample.
  int last() const { return size() - 1; }
  double duration() const { return dt_ * last(); }
  double time(int k) const { return dt_ * k; }

  const Vec3& operator[](int k) const { return points_[k]; }
  const Vec3& front() const { return points_.front(); }
  const Vec3& back() const { return points_.back(); }
  const std::vector<Vec3>& points() const { return points_; }

  // Linear interpolation between samples, clamped to [0, T].
  Vec3 Evaluate(double t) const;

  // Samples [first, last] re-based to start at t = 0.
  Trajectory Slice(int first, int last) const;

  // Largest |p| over the samples, at least 1. Used to scale tolerances.
  double Extent() const;

 private:
  int dim_;
  double dt_;
  double min_speed_;
  std::vector<Vec3> points_;
};

// Derivative stencils. Interior samples use central differences; the two end
// samples use one-sided second-order stencils. All stencils are exact on
// quadratic polynomials.
std::vector<Vec3> Differentiate(const Trajectory& traj, int order);
std::vector<double> DifferentiateSeries(std::span<const double> values,
                                        double dt, int order);
Vec3 VelocityAt(const Trajectory& traj, int k);
Vec3 AccelerationAt(const Trajectory& traj, int k);

struct FrameSample {
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
  Vec3 u_par = Vec3::Zero();
  // Planar: u_perp is u_par rotated by +90 degrees, w1 == u_perp, w2 == +z.
  // Spatial: {u_par, w1, w2} is a right-handed orthonormal frame and u_perp
  // aliases w1.
  Vec3 u_perp = Vec3::Zero();
  Vec3 w1 = Vec3::Zero();
  Vec3 w2 = Vec3::Zero();
  double speed = 0.0;
};

// Threshold on |a - (a.u)u| below which the spatial frame falls back to a
// fixed reference axis.
inline constexpr double kFrameNormalTolerance = 1e-9;

FrameSample FrameAt(const Trajectory& traj, int k);

// atan2(vy, vx) per sample, unwrapped so consecutive values differ by < pi.
std::vector<double> Heading(const Trajectory& traj);

// Unwraps an angle series in place onto a continuous branch.
void Unwrap(std::vector<double>& angles);

struct RegularityOptions {
  bool check_heading = false;
  // Upper bound on |acceleration| used for the velocity-jump threshold. When
  // <= 0 it is estimated robustly from the data (max over samples of a
  // 9-sample running median of |second difference| / dt^2).
  double accel_bound = 0.0;
  double jump_factor = 10.0;
};

struct RegularityReport {
  bool is_d2 = true;
  double worst_velocity_jump = 0.0;
  double velocity_tolerance = 0.0;
  double worst_accel_jump_tangential = 0.0;
  bool heading_d2 = true;
  double worst_omega_jump = 0.0;
  double omega_tolerance = 0.0;
  std::vector<int> discontinuity_indices;
  std::vector<int> heading_discontinuity_indices;
};

// Discrete proxy for membership of the base coordinates (and optionally of the
// heading) in D2: a "jump" at k is the difference between the forward and
// backward first differences, compared against jump_factor * dt * bound.
RegularityReport CheckRegularity(const Trajectory& traj,
                                 const RegularityOptions& options = {});

// Same proxy applied to a scalar series: is the series continuous (D1 for a
// command, i.e. derivative bounded)? Returns indices of jumps.
std::vector<int> SeriesJumps(std::span<const double> values, double dt,
                             double jump_factor = 10.0);

// Continuity of the values of a scalar series: a jump at k is a step
// |s_k - s_{k-1}| above jump_factor * dt times a robust bound on |ds/dt|.
struct SeriesContinuity {
  double worst_step = 0.0;
  double tolerance = 0.0;
  std::vector<int> jump_indices;
};
SeriesContinuity CheckSeriesContinuity(std::span<const double> values,
                                       double dt, double jump_factor = 10.0);

// |omega_forward - omega_backward| at sample k, using second-order one-sided
// stencils on the unwrapped heading. Requires 2 <= k <= K - 2.
double OmegaJumpAt(const Trajectory& traj, int k);
// Same quantity computed on a precomputed heading series.
double OmegaJumpAt(std::span<const double> heading, double dt, int k);

struct InflectionOptions {
  double tol_cross = 1e-6;
  double accel_floor = 1e-9;
  // Curvature (1/m) below which a sample counts as straight regardless of the
  // normalized cross product.
  double curvature_floor = 1e-6;
};

// Planar only. Samples where v and a are (numerically) collinear, plus the
// sample nearest each sign change of v x a.
std::vector<int> InflectionIndices(const Trajectory& traj,
                                   const InflectionOptions& options = {});

// 2D cross product of the xy components.
inline double Cross2(const Vec3& a, const Vec3& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// CSV with header `t,x,y[,z]`, `%.12g` formatting.
void WriteTrajectoryCsv(std::ostream& out, const Trajectory& traj);
Trajectory ReadTrajectoryCsv(std::istream& in,
                             double min_speed = Trajectory::kDefaultMinSpeed);

// Formats a double with 12 significant digits.
std::string FormatNumber(double value);

}  // namespace affdeform

#endif  // AFFDEFORM_TRAJECTORY_H_
