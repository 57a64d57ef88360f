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

#include "affdeform/trajectory.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "affdeform/error.h"

namespace affdeform {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMedianHalfWindow = 4;

template <typename T>
T FirstDerivative(std::span<const T> p, double dt, int k) {
  const int last = static_cast<int>(p.size()) - 1;
  if (k == 0) return (-3.0 * p[0] + 4.0 * p[1] - p[2]) / (2.0 * dt);
  if (k == last) {
    return (3.0 * p[last] - 4.0 * p[last - 1] + p[last - 2]) / (2.0 * dt);
  }
  return (p[k + 1] - p[k - 1]) / (2.0 * dt);
}

template <typename T>
T SecondDerivative(std::span<const T> p, double dt, int k) {
  const int last = static_cast<int>(p.size()) - 1;
  const double dt2 = dt * dt;
  if (k == 0) return (2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3]) / dt2;
  if (k == last) {
    return (2.0 * p[last] - 5.0 * p[last - 1] + 4.0 * p[last - 2] -
            p[last - 3]) /
           dt2;
  }
  return (p[k + 1] - 2.0 * p[k] + p[k - 1]) / dt2;
}

double Median(std::vector<double> values) {
  const size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  return values[mid];
}

// Max over samples of the running median of `rate`; isolated spikes (up to
// kMedianHalfWindow consecutive samples) do not raise the estimate.
double RobustBound(const std::vector<double>& rate) {
  const int n = static_cast<int>(rate.size());
  double bound = 0.0;
  std::vector<double> window;
  for (int k = 0; k < n; ++k) {
    window.clear();
    for (int j = std::max(0, k - kMedianHalfWindow);
         j <= std::min(n - 1, k + kMedianHalfWindow); ++j) {
      window.push_back(rate[j]);
    }
    bound = std::max(bound, Median(window));
  }
  return bound;
}

struct JumpScan {
  double worst = 0.0;
  double tolerance = 0.0;
  std::vector<int> indices;
};

// `second_diff[i]` is |s_{k+1} - 2 s_k + s_{k-1}| for k = i + 1.
JumpScan ScanJumps(const std::vector<double>& second_diff, double dt,
                   double factor, double bound, double floor) {
  JumpScan scan;
  if (bound <= 0.0) {
    std::vector<double> rate(second_diff.size());
    for (size_t i = 0; i < second_diff.size(); ++i) {
      rate[i] = second_diff[i] / (dt * dt);
    }
    bound = RobustBound(rate);
  }
  scan.tolerance = factor * dt * bound + floor;
  for (size_t i = 0; i < second_diff.size(); ++i) {
    const double jump = second_diff[i] / dt;
    scan.worst = std::max(scan.worst, jump);
    if (jump > scan.tolerance) scan.indices.push_back(static_cast<int>(i) + 1);
  }
  return scan;
}

}  // namespace

Trajectory::Trajectory(int dim, double dt, std::vector<Vec3> points,
                       double min_speed)
    : dim_(dim), dt_(dt), min_speed_(min_speed), points_(std::move(points)) {
  if (dim_ != 2 && dim_ != 3) {
    throw Error(ErrorCode::kInvalidArgument, "trajectory dim must be 2 or 3");
  }
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) {
    throw Error(ErrorCode::kInvalidArgument, "trajectory dt must be > 0");
  }
  if (last() < kMinSegments) {
    throw Error(ErrorCode::kTrajectoryTooShort,
                "trajectory needs at least " +
                    std::to_string(kMinSegments + 1) + " samples, got " +
                    std::to_string(size()));
  }
  for (const Vec3& p : points_) {
    if (!p.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite trajectory sample");
    }
    if (dim_ == 2 && p.z() != 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "planar trajectory sample with nonzero z");
    }
  }
  for (int k = 1; k < last(); ++k) {
    const double speed = ((points_[k + 1] - points_[k - 1]) / (2.0 * dt_)).norm();
    if (!(speed > min_speed_)) {
      throw Error(ErrorCode::kZeroVelocity,
                  "discrete speed " + FormatNumber(speed) + " at sample " +
                      std::to_string(k) + " is not above " +
                      FormatNumber(min_speed_));
    }
  }
}

Vec3 Trajectory::Evaluate(double t) const {
  const double s = std::clamp(t / dt_, 0.0, static_cast<double>(last()));
  const int k = std::min(static_cast<int>(std::floor(s)), last() - 1);
  const double frac = s - k;
  return (1.0 - frac) * points_[k] + frac * points_[k + 1];
}

Trajectory Trajectory::Slice(int first, int last_index) const {
  if (first < 0 || last_index > last() || last_index <= first) {
    throw Error(ErrorCode::kInvalidArgument, "invalid trajectory slice");
  }
  return Trajectory(dim_, dt_,
                    std::vector<Vec3>(points_.begin() + first,
                                      points_.begin() + last_index + 1),
                    min_speed_);
}

double Trajectory::Extent() const {
  double extent = 1.0;
  for (const Vec3& p : points_) extent = std::max(extent, p.norm());
  return extent;
}

std::vector<Vec3> Differentiate(const Trajectory& traj, int order) {
  if (order != 1 && order != 2) {
    throw Error(ErrorCode::kInvalidArgument, "derivative order must be 1 or 2");
  }
  std::span<const Vec3> p(traj.points());
  std::vector<Vec3> out(p.size());
  for (int k = 0; k < traj.size(); ++k) {
    out[k] = order == 1 ? FirstDerivative(p, traj.dt(), k)
                        : SecondDerivative(p, traj.dt(), k);
  }
  return out;
}

std::vector<double> DifferentiateSeries(std::span<const double> values,
                                        double dt, int order) {
  if (order != 1 && order != 2) {
    throw Error(ErrorCode::kInvalidArgument, "derivative order must be 1 or 2");
  }
  if (values.size() < 5) {
    throw Error(ErrorCode::kTrajectoryTooShort,
                "series needs at least 5 samples to differentiate");
  }
  std::vector<double> out(values.size());
  for (int k = 0; k < static_cast<int>(values.size()); ++k) {
    out[k] = order == 1 ? FirstDerivative(values, dt, k)
                        : SecondDerivative(values, dt, k);
  }
  return out;
}

Vec3 VelocityAt(const Trajectory& traj, int k) {
  return FirstDerivative(std::span<const Vec3>(traj.points()), traj.dt(), k);
}

Vec3 AccelerationAt(const Trajectory& traj, int k) {
  return SecondDerivative(std::span<const Vec3>(traj.points()), traj.dt(), k);
}

FrameSample FrameAt(const Trajectory& traj, int k) {
  if (k < 0 || k > traj.last()) {
    throw Error(ErrorCode::kInvalidArgument,
                "sample index " + std::to_string(k) + " out of range");
  }
  FrameSample f;
  f.v = VelocityAt(traj, k);
  f.a = AccelerationAt(traj, k);
  f.speed = f.v.norm();
  if (!(f.speed > traj.min_speed())) {
    throw Error(ErrorCode::kZeroVelocity,
                "zero velocity at sample " + std::to_string(k));
  }
  f.u_par = f.v / f.speed;
  if (traj.dim() == 2) {
    f.u_perp = Vec3(-f.u_par.y(), f.u_par.x(), 0.0);
    f.w1 = f.u_perp;
    f.w2 = Vec3::UnitZ();
    return f;
  }
  Vec3 normal = f.a - f.a.dot(f.u_par) * f.u_par;
  if (normal.norm() <= kFrameNormalTolerance) {
    const Vec3 ref =
        std::abs(f.u_par.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
    normal = ref - ref.dot(f.u_par) * f.u_par;
  }
  f.w1 = normal.normalized();
  f.w2 = f.u_par.cross(f.w1);
  f.u_perp = f.w1;
  return f;
}

void Unwrap(std::vector<double>& angles) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (size_t k = 1; k < angles.size(); ++k) {
    const double delta = angles[k] - angles[k - 1];
    angles[k] -= kTwoPi * std::round(delta / kTwoPi);
  }
}

std::vector<double> Heading(const Trajectory& traj) {
  std::vector<double> theta(traj.size());
  for (int k = 0; k < traj.size(); ++k) {
    const Vec3 v = VelocityAt(traj, k);
    if (!(v.head<2>().norm() > 0.0)) {
      throw Error(ErrorCode::kZeroVelocity,
                  "heading undefined at sample " + std::to_string(k));
    }
    theta[k] = std::atan2(v.y(), v.x());
  }
  Unwrap(theta);
  return theta;
}

RegularityReport CheckRegularity(const Trajectory& traj,
                                 const RegularityOptions& options) {
  RegularityReport report;
  const int last = traj.last();
  const double dt = traj.dt();
  const double extent = traj.Extent();

  std::vector<double> second_diff(last - 1);
  for (int k = 1; k < last; ++k) {
    second_diff[k - 1] = (traj[k + 1] - 2.0 * traj[k] + traj[k - 1]).norm();
  }
  const JumpScan position =
      ScanJumps(second_diff, dt, options.jump_factor, options.accel_bound,
                64.0 * kEps * extent / dt);
  report.worst_velocity_jump = position.worst;
  report.velocity_tolerance = position.tolerance;
  report.discontinuity_indices = position.indices;
  report.is_d2 = position.indices.empty();

  const double dt2 = dt * dt;
  for (int k = 2; k <= last - 2; ++k) {
    const Vec3 fwd = (traj[k + 2] - 2.0 * traj[k + 1] + traj[k]) / dt2;
    const Vec3 bwd = (traj[k] - 2.0 * traj[k - 1] + traj[k - 2]) / dt2;
    const Vec3 v = traj[k + 1] - traj[k - 1];
    const double n = v.norm();
    if (n > 0.0) {
      report.worst_accel_jump_tangential =
          std::max(report.worst_accel_jump_tangential,
                   std::abs((fwd - bwd).dot(v) / n));
    }
  }

  if (options.check_heading) {
    const std::vector<double> theta = Heading(traj);
    std::vector<double> speeds(traj.size());
    double theta_scale = 1.0;
    for (int k = 0; k < traj.size(); ++k) {
      speeds[k] = VelocityAt(traj, k).norm();
      theta_scale = std::max(theta_scale, std::abs(theta[k]));
    }
    const double speed_ref = std::max(Median(speeds), traj.min_speed());
    // Samples 0 and K use one-sided stencils whose error differs from the
    // central ones; their neighbors would show that difference as a jump.
    std::vector<double> heading_diff(last - 1, 0.0);
    for (int k = 2; k < last - 1; ++k) {
      heading_diff[k - 1] = std::abs(theta[k + 1] - 2.0 * theta[k] + theta[k - 1]);
    }
    heading_diff.front() = heading_diff[1];
    heading_diff.back() = heading_diff[last - 3];
    const double floor =
        64.0 * kEps * (extent / (speed_ref * dt) + theta_scale) / dt;
    const JumpScan heading =
        ScanJumps(heading_diff, dt, options.jump_factor, 0.0, floor);
    report.worst_omega_jump = heading.worst;
    report.omega_tolerance = heading.tolerance;
    report.heading_discontinuity_indices = heading.indices;
    report.heading_d2 = heading.indices.empty();
  }
  return report;
}

std::vector<int> SeriesJumps(std::span<const double> values, double dt,
                             double jump_factor) {
  if (values.size() < 3) return {};
  double scale = 1.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  std::vector<double> second_diff(values.size() - 2);
  for (size_t k = 1; k + 1 < values.size(); ++k) {
    second_diff[k - 1] = std::abs(values[k + 1] - 2.0 * values[k] + values[k - 1]);
  }
  return ScanJumps(second_diff, dt, jump_factor, 0.0, 64.0 * kEps * scale / dt)
      .indices;
}

SeriesContinuity CheckSeriesContinuity(std::span<const double> values,
                                       double dt, double jump_factor) {
  SeriesContinuity out;
  if (values.size() < 2) return out;
  double scale = 1.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  std::vector<double> rate(values.size() - 1);
  for (size_t k = 1; k < values.size(); ++k) {
    rate[k - 1] = std::abs(values[k] - values[k - 1]) / dt;
  }
  out.tolerance = jump_factor * dt * RobustBound(rate) + 64.0 * kEps * scale;
  for (size_t k = 1; k < values.size(); ++k) {
    const double step = rate[k - 1] * dt;
    out.worst_step = std::max(out.worst_step, step);
    if (step > out.tolerance) out.jump_indices.push_back(static_cast<int>(k));
  }
  return out;
}

double OmegaJumpAt(std::span<const double> heading, double dt, int k) {
  const int last = static_cast<int>(heading.size()) - 1;
  if (k < 2 || k > last - 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "one-sided omega estimates need two samples on each side");
  }
  const double backward =
      (3.0 * heading[k] - 4.0 * heading[k - 1] + heading[k - 2]) / (2.0 * dt);
  const double forward =
      (-3.0 * heading[k] + 4.0 * heading[k + 1] - heading[k + 2]) / (2.0 * dt);
  return std::abs(forward - backward);
}

double OmegaJumpAt(const Trajectory& traj, int k) {
  const std::vector<double> theta = Heading(traj);
  return OmegaJumpAt(theta, traj.dt(), k);
}

std::vector<int> InflectionIndices(const Trajectory& traj,
                                   const InflectionOptions& options) {
  if (traj.dim() != 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "inflection detection is defined for planar trajectories");
  }
  const int n = traj.size();
  std::vector<double> cross(n);
  std::vector<double> normalized(n);
  std::vector<bool> flagged(n, false);
  for (int k = 0; k < n; ++k) {
    const Vec3 v = VelocityAt(traj, k);
    const Vec3 a = AccelerationAt(traj, k);
    const double speed = v.norm();
    cross[k] = Cross2(v, a);
    normalized[k] =
        std::abs(cross[k]) / (speed * std::max(a.norm(), options.accel_floor));
    const double curvature = std::abs(cross[k]) / (speed * speed * speed);
    if (normalized[k] < options.tol_cross ||
        curvature < options.curvature_floor) {
      flagged[k] = true;
    }
  }
  for (int k = 0; k + 1 < n; ++k) {
    if (cross[k] * cross[k + 1] < 0.0) {
      flagged[normalized[k] <= normalized[k + 1] ? k : k + 1] = true;
    }
  }
  std::vector<int> out;
  for (int k = 0; k < n; ++k) {
    if (flagged[k]) out.push_back(k);
  }
  return out;
}

std::string FormatNumber(double value) {
  if (value == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

void WriteTrajectoryCsv(std::ostream& out, const Trajectory& traj) {
  out << (traj.dim() == 2 ? "t,x,y\n" : "t,x,y,z\n");
  for (int k = 0; k < traj.size(); ++k) {
    const Vec3& p = traj[k];
    out << FormatNumber(traj.time(k)) << ',' << FormatNumber(p.x()) << ','
        << FormatNumber(p.y());
    if (traj.dim() == 3) out << ',' << FormatNumber(p.z());
    out << '\n';
  }
}

Trajectory ReadTrajectoryCsv(std::istream& in, double min_speed) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kIo, "empty trajectory CSV");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  int dim = 0;
  if (line == "t,x,y") {
    dim = 2;
  } else if (line == "t,x,y,z") {
    dim = 3;
  } else {
    throw Error(ErrorCode::kIo, "unexpected trajectory CSV header '" + line + "'");
  }
  std::vector<double> times;
  std::vector<Vec3> points;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(ss, cell, ',')) {
      try {
        size_t used = 0;
        values.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw Error(ErrorCode::kIo,
                    "bad number '" + cell + "' on CSV row " + std::to_string(row));
      }
    }
    if (static_cast<int>(values.size()) != dim + 1) {
      throw Error(ErrorCode::kIo,
                  "CSV row " + std::to_string(row) + " has wrong column count");
    }
    times.push_back(values[0]);
    points.emplace_back(values[1], values[2], dim == 3 ? values[3] : 0.0);
  }
  if (times.size() < 2) {
    throw Error(ErrorCode::kTrajectoryTooShort, "trajectory CSV has < 2 rows");
  }
  const int last = static_cast<int>(times.size()) - 1;
  const double dt = (times.back() - times.front()) / last;
  for (int k = 0; k <= last; ++k) {
    // Allows for the 12 significant digits the writer keeps.
    const double tol = 1e-9 * dt + 1e-11 * std::abs(times[k]);
    if (std::abs(times[k] - (times.front() + k * dt)) > tol) {
      throw Error(ErrorCode::kNonUniformGrid,
                  "non-uniform time grid at CSV row " + std::to_string(k + 2));
    }
  }
  return Trajectory(dim, dt, std::move(points), min_speed);
}

}  // namespace affdeform
