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

#include "affdeform/deform.h"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "affdeform/error.h"

namespace affdeform {

namespace {

void CheckTau(const Trajectory& traj, int tau_index) {
  if (tau_index < 0 || tau_index > traj.last()) {
    throw Error(ErrorCode::kInvalidArgument,
                "tau index " + std::to_string(tau_index) + " out of range");
  }
}

void CheckDeterminant(const Mat3& m) {
  if (!(std::abs(m.determinant()) > kMinDeterminant)) {
    throw Error(ErrorCode::kSingularMap, "deformation matrix is singular");
  }
}

AffineMap Conjugated(const Trajectory& traj, int tau_index,
                     const FrameSample& frame, const Mat3& in_basis) {
  const Mat3 q = FrameBasis(frame);
  AffineMap f;
  f.dim = traj.dim();
  f.fixed_point = traj[tau_index];
  f.matrix = q * in_basis * q.transpose();
  return f;
}

}  // namespace

AffineMap AffineMap::Identity(int dim, const Vec3& fixed_point) {
  AffineMap f;
  f.dim = dim;
  f.fixed_point = fixed_point;
  return f;
}

Mat3 FrameBasis(const FrameSample& frame) {
  Mat3 q;
  q.col(0) = frame.u_par;
  q.col(1) = frame.w1;
  q.col(2) = frame.w2;
  return q;
}

AffineMap Class1Map(const Trajectory& traj, const ClassIParams& p) {
  CheckTau(traj, p.tau_index);
  if (traj.dim() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "class-I maps are planar");
  }
  if (1.0 + p.mu == 0.0) {
    throw Error(ErrorCode::kSingularMap, "1 + mu must be nonzero");
  }
  const FrameSample frame = FrameAt(traj, p.tau_index);
  Mat3 m = Mat3::Identity();
  m(0, 1) = p.lambda;
  m(1, 1) = 1.0 + p.mu;
  AffineMap f = Conjugated(traj, p.tau_index, frame, m);
  CheckDeterminant(f.matrix);
  return f;
}

Mat3 Class2Generator(const Trajectory& traj, int tau_index) {
  CheckTau(traj, tau_index);
  if (traj.dim() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "class-II maps are planar");
  }
  const FrameSample frame = FrameAt(traj, tau_index);
  const double cross = Cross2(frame.v, frame.a);
  if (!(std::abs(cross) >= kClass2Conditioning * frame.speed * frame.a.norm()) ||
      cross == 0.0) {
    throw Error(ErrorCode::kInflectionAtTau,
                "velocity and acceleration are collinear at sample " +
                    std::to_string(tau_index));
  }
  Eigen::Matrix2d va;
  va.col(0) = frame.v.head<2>();
  va.col(1) = frame.a.head<2>();
  Eigen::Matrix2d zv = Eigen::Matrix2d::Zero();
  zv.col(1) = frame.v.head<2>();
  Mat3 b = Mat3::Zero();
  b.topLeftCorner<2, 2>() = zv * va.inverse();
  return b;
}

AffineMap Class2Map(const Trajectory& traj, const ClassIIParams& p) {
  const Mat3 b = Class2Generator(traj, p.tau_index);
  AffineMap f;
  f.dim = 2;
  f.fixed_point = traj[p.tau_index];
  f.matrix = Mat3::Identity() + p.lambda * b;
  return f;
}

AffineMap UwvMap(const Trajectory& traj, const Uwv6Params& p) {
  CheckTau(traj, p.tau_index);
  if (traj.dim() != 3) {
    throw Error(ErrorCode::kInvalidArgument, "six-parameter maps are spatial");
  }
  const FrameSample frame = FrameAt(traj, p.tau_index);
  Mat3 m;
  m << 1.0, p.lambda, p.mu,
       0.0, 1.0 + p.nu, p.xi,
       0.0, p.sigma, 1.0 + p.chi;
  CheckDeterminant(m);
  return Conjugated(traj, p.tau_index, frame, m);
}

Trajectory Apply(const Trajectory& traj, const AffineMap& map, int tau_index) {
  CheckTau(traj, tau_index);
  if (map.dim != traj.dim()) {
    throw Error(ErrorCode::kInvalidArgument,
                "map and trajectory dimensions differ");
  }
  const Vec3& anchor = traj[tau_index];
  const double mismatch = (map(anchor) - anchor).norm();
  if (!(mismatch <= kFixedPointTolerance)) {
    throw Error(ErrorCode::kFixedPointMismatch,
                "map moves C(tau) by " + FormatNumber(mismatch) + " m");
  }
  std::vector<Vec3> points = traj.points();
  for (int k = tau_index; k < traj.size(); ++k) points[k] = map(points[k]);
  return Trajectory(traj.dim(), traj.dt(), std::move(points),
                    traj.min_speed());
}

Trajectory ApplyTwoInterval(const Trajectory& traj, const AffineMap& f1,
                            int tau1, const AffineMap& f2, int tau2) {
  CheckTau(traj, tau1);
  CheckTau(traj, tau2);
  if (tau2 < tau1) {
    throw Error(ErrorCode::kInvalidArgument, "tau2 must not precede tau1");
  }
  const Vec3& anchor1 = traj[tau1];
  const Vec3 anchor2 = f1(traj[tau2]);
  const double mismatch =
      std::max((f1(anchor1) - anchor1).norm(), (f2(anchor2) - anchor2).norm());
  if (!(mismatch <= kFixedPointTolerance)) {
    throw Error(ErrorCode::kFixedPointMismatch,
                "two-interval maps break continuity by " +
                    FormatNumber(mismatch) + " m");
  }
  const AffineMap f21 = Compose(f2, f1);
  std::vector<Vec3> points = traj.points();
  for (int k = tau1; k < tau2; ++k) points[k] = f1(points[k]);
  for (int k = tau2; k < traj.size(); ++k) points[k] = f21(points[k]);
  return Trajectory(traj.dim(), traj.dt(), std::move(points),
                    traj.min_speed());
}

AffineMap Compose(const AffineMap& f2, const AffineMap& f1) {
  if (f1.dim != f2.dim) {
    throw Error(ErrorCode::kInvalidArgument, "cannot compose maps of mixed dim");
  }
  AffineMap f;
  f.dim = f1.dim;
  f.fixed_point = f1.fixed_point;
  f.matrix = f2.matrix * f1.matrix;
  f.offset = f2(f1(f1.fixed_point)) - f1.fixed_point;
  return f;
}

AffineMap Inverse(const AffineMap& f) {
  CheckDeterminant(f.matrix);
  AffineMap g = f;
  g.matrix = f.matrix.inverse();
  g.offset = -(g.matrix * f.offset);
  return g;
}

double DistanceFromIdentity(const AffineMap& f) {
  return (f.matrix - Mat3::Identity()).norm();
}

MapAdmissibility AdmissibilityOfMap(const Trajectory& traj,
                                    const AffineMap& map, int tau_index,
                                    const RobotModel& model,
                                    double tolerance) {
  CheckTau(traj, tau_index);
  const FrameSample frame = FrameAt(traj, tau_index);
  MapAdmissibility out;
  const Vec3& anchor = traj[tau_index];
  out.fixed_point_residual = (map(anchor) - anchor).norm();
  out.velocity_residual =
      (map.matrix * frame.v - frame.v).norm() / frame.speed;
  out.pass = out.fixed_point_residual <= kFixedPointTolerance &&
             out.velocity_residual <= tolerance;
  if (model.robot_class() == RobotClass::kClassII) {
    out.checked_acceleration = true;
    const Vec3 change = map.matrix * frame.a - frame.a;
    out.acceleration_residual =
        std::abs(change.dot(frame.u_perp)) / std::max(frame.a.norm(), 1.0);
    out.pass = out.pass && out.acceleration_residual <= tolerance;
  }
  return out;
}

}  // namespace affdeform
