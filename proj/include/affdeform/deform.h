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

// Affine maps of the base space and the admissible families at an instant tau.
//
// Matrices are stored in world coordinates. Planar maps keep the z row and
// column of the identity so that 2D and 3D share the same algebra.

#ifndef AFFDEFORM_DEFORM_H_
#define AFFDEFORM_DEFORM_H_

#include <vector>

#include "affdeform/kinematics.h"
#include "affdeform/trajectory.h"

namespace affdeform {

// F(P) = fixed_point + matrix * (P - fixed_point) + offset.
//
// Maps built by the families below have offset == 0, so fixed_point is a true
// fixed point. Compositions and inverses may carry a nonzero offset.
struct AffineMap {
  int dim = 2;
  Vec3 fixed_point = Vec3::Zero();
  Mat3 matrix = Mat3::Identity();
  Vec3 offset = Vec3::Zero();

  Vec3 operator()(const Vec3& p) const {
    // Written as a perturbation of p so that the identity reproduces p
    // bit for bit.
    return p + (matrix - Mat3::Identity()) * (p - fixed_point) + offset;
  }

  static AffineMap Identity(int dim, const Vec3& fixed_point = Vec3::Zero());
};

inline constexpr double kMinDeterminant = 1e-12;
// |v x a| below this fraction of |v||a| is refused by the class-II family.
inline constexpr double kClass2Conditioning = 1e-8;
// Allowed |F(C(tau)) - C(tau)| when applying a map.
inline constexpr double kFixedPointTolerance = 1e-9;

struct ClassIParams {
  int tau_index = 0;
  double lambda = 0.0;
  double mu = 0.0;
};

struct ClassIIParams {
  int tau_index = 0;
  double lambda = 0.0;
};

struct Uwv6Params {
  int tau_index = 0;
  double lambda = 0.0;
  double mu = 0.0;
  double nu = 0.0;
  double xi = 0.0;
  double sigma = 0.0;
  double chi = 0.0;
};

// Columns u_par, u_perp (planar, third column +z) or u_par, w1, w2 (spatial).
Mat3 FrameBasis(const FrameSample& frame);

AffineMap Class1Map(const Trajectory& traj, const ClassIParams& p);

// B = [0, v][v, a]^-1 at tau, so that B v = 0 and B a = v. Throws
// kInflectionAtTau when v and a are (nearly) collinear.
Mat3 Class2Generator(const Trajectory& traj, int tau_index);
AffineMap Class2Map(const Trajectory& traj, const ClassIIParams& p);

AffineMap UwvMap(const Trajectory& traj, const Uwv6Params& p);

// C' = C before tau and F(C) from tau on. Samples before tau are copied.
Trajectory Apply(const Trajectory& traj, const AffineMap& map, int tau_index);

// f1 on [tau1, tau2) and compose(f2, f1) on [tau2, K]. Equivalent to
// Apply(Apply(traj, f1, tau1), f2, tau2) when f2 fixes f1(C(tau2)).
Trajectory ApplyTwoInterval(const Trajectory& traj, const AffineMap& f1,
                            int tau1, const AffineMap& f2, int tau2);

// (f2 o f1)(P) = f2(f1(P)).
AffineMap Compose(const AffineMap& f2, const AffineMap& f1);
AffineMap Inverse(const AffineMap& f);

// ||M - I||_F.
double DistanceFromIdentity(const AffineMap& f);

struct MapAdmissibility {
  bool pass = true;
  // |F(C(tau)) - C(tau)|.
  double fixed_point_residual = 0.0;
  // |M v - v| / |v|.
  double velocity_residual = 0.0;
  // Class II only: |(M a - a) . u_perp| / max(|a|, 1), the part of the
  // acceleration change not along v(tau).
  double acceleration_residual = 0.0;
  bool checked_acceleration = false;
};

MapAdmissibility AdmissibilityOfMap(const Trajectory& traj,
                                    const AffineMap& map, int tau_index,
                                    const RobotModel& model,
                                    double tolerance = 1e-9);

}  // namespace affdeform

#endif  // AFFDEFORM_DEFORM_H_
