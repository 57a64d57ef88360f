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

#include "affdeform/correct.h"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "affdeform/error.h"
#include "affdeform/fixtures.h"
#include "affdeform/kinematics.h"
#include "affdeform/roundtrip.h"

namespace affdeform {
namespace {

constexpr double kPi = std::numbers::pi;

const RobotModel kUnicycle{RobotKind::kUnicycle};
const RobotModel kCar{RobotKind::kKinematicCar, 1.0, {}};

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

double Param(const CorrectionResult& r, const std::string& name) {
  for (const auto& [key, value] : r.parameters) {
    if (key == name) return value;
  }
  ADD_FAILURE() << "no parameter " << name;
  return std::nan("");
}

void ExpectReplayExact(const Trajectory& input, const CorrectionResult& r) {
  const Trajectory replayed = Replay(input, r.deformations);
  ASSERT_EQ(replayed.size(), r.corrected.size());
  for (int k = 0; k < replayed.size(); ++k) ASSERT_EQ(replayed[k], r.corrected[k]) << k;
}

double L2Distance(const Trajectory& a, const Trajectory& b) {
  double sum = 0.0;
  for (int k = 0; k < a.size(); ++k) sum += (a[k] - b[k]).squaredNorm();
  return std::sqrt(sum * a.dt());
}

Trajectory CurvedSeed() { return GenerateBuiltin("curved_seed", {}, 1e-2); }

TEST(Class1CorrectTest, CurrentEndpointGivesIdentity) {
  const Trajectory c = GenerateBuiltin("circle", {{"T", kPi / 2}}, 1e-3);
  const CorrectionResult r = Class1CorrectPosition(c, 785, c.back());
  EXPECT_EQ(Param(r, "lambda"), 0.0);
  EXPECT_EQ(Param(r, "mu"), 0.0);
  EXPECT_EQ(r.residual_position, 0.0);
  EXPECT_EQ(r.corrected.points(), c.points());
}

TEST(Class1CorrectTest, QuarterCircleHitsTargetAndReintegrates) {
  const Trajectory c = GenerateBuiltin("circle", {{"T", kPi / 2}}, 1e-3);
  const int tau = c.last() / 2;
  const FrameSample f = FrameAt(c, tau);
  const Vec3 target = c.back() + 0.3 * f.u_perp + 0.1 * f.u_par;
  const CorrectionResult r = Class1CorrectPosition(c, tau, target);
  EXPECT_LT((r.corrected.back() - target).norm(), 1e-9);
  EXPECT_LT(r.residual_position, 1e-9);
  ExpectReplayExact(c, r);
  for (int k = 0; k < tau; ++k) ASSERT_EQ(r.corrected[k], c[k]);
  for (RobotKind kind : {RobotKind::kUnicycle, RobotKind::kType30, RobotKind::kType21}) {
    const RobotModel m{kind};
    EXPECT_TRUE(IsAdmissible(CheckAdmissible(m, r.corrected)));
    EXPECT_LT(ReintegrationError(m, r.corrected), 1e-4) << RobotKindName(kind);
  }
}

TEST(Class1CorrectTest, TangentThroughEndpointIsRejected) {
  const Trajectory line = GenerateBuiltin("line", {}, 1e-3);
  EXPECT_EQ(CodeOf([&] { Class1CorrectPosition(line, 1000, Vec3(2, 1, 0)); }),
            ErrorCode::kTangentThroughEndpoint);
  EXPECT_EQ(CodeOf([&] { Class1CorrectPositionAuto(line, Vec3(2, 1, 0)); }),
            ErrorCode::kTangentThroughEndpoint);
}

TEST(Class1CorrectTest, AutoPicksLeastDisturbance) {
  const Trajectory s = GenerateBuiltin("scurve", {}, 1e-3);
  const Vec3 target = s.back() + Vec3(-0.4, 0.7, 0);
  TauSearchPolicy policy;
  policy.stride = 25;
  const CorrectionResult best = Class1CorrectPositionAuto(s, target, policy);
  EXPECT_LT(best.residual_position, 1e-9);
  const double cost = std::hypot(Param(best, "lambda"), Param(best, "mu"));
  for (int k : {400, 1000, 1600, 2600, 3400}) {
    const CorrectionResult other = Class1CorrectPosition(s, k, target);
    EXPECT_LE(cost, std::hypot(Param(other, "lambda"), Param(other, "mu")) + 1e-12);
  }
}

TEST(Class2CorrectTest, CurrentEndpointGivesIdentity) {
  const Trajectory c = GenerateBuiltin("circle", {}, 1e-3);
  const CorrectionResult r = Class2CorrectPosition(c, c.back());
  EXPECT_TRUE(r.deformations.empty());
  EXPECT_EQ(r.corrected.points(), c.points());
}

TEST(Class2CorrectTest, TangentialOffsetAtArcMidpoint) {
  // Half circle (sin t, 1 - cos t): v = (0, 1) only at t = pi / 2.
  const Trajectory c = GenerateBuiltin("circle", {}, 1e-3);
  const Vec3 target = c.back() + Vec3(0, 0.2, 0);
  const CorrectionResult r = Class2CorrectPosition(c, target);
  ASSERT_FALSE(r.deformations.empty());
  EXPECT_NEAR(r.deformations[0].tau_index * c.dt(), kPi / 2, 2e-3);
  EXPECT_LT((r.corrected.back() - target).norm(), 1e-6);
  EXPECT_LT(r.residual_position, 1e-9);
  ExpectReplayExact(c, r);
  EXPECT_TRUE(IsAdmissible(CheckAdmissible(kCar, r.corrected)));
  EXPECT_LT(ReintegrationError(kCar, r.corrected), 1e-4);
}

TEST(Class2CorrectTest, SingleStepWithoutMicroPassIsOrderDt2) {
  const Trajectory c = GenerateBuiltin("circle", {}, 1e-3);
  const Vec3 target = c.back() + Vec3(0.05, 0.2, 0);
  TauSearchPolicy policy;
  policy.micro_correct = false;
  const CorrectionResult r = Class2CorrectPosition(c, target, policy);
  EXPECT_EQ(r.deformations.size(), 1u);
  EXPECT_LT(r.residual_position, 1e-5);
}

TEST(Class2CorrectTest, DirectionOutsideTangentConeIsRejected) {
  // Tangent directions of this arc span headings [0, 0.5].
  const Trajectory arc = GenerateBuiltin("circle", {{"T", 0.5}}, 1e-3);
  const Vec3 target = arc.back() + 0.1 * Vec3(std::cos(1.2), std::sin(1.2), 0);
  EXPECT_EQ(CodeOf([&] { Class2CorrectPosition(arc, target); }),
            ErrorCode::kNoAccessibleTangent);
  // The two-step fallback reaches it anyway.
  const CorrectionResult r = Class2ReachPosition(arc, target);
  EXPECT_LT(r.residual_position, 1e-9);
}

TEST(Class2CorrectTest, AccessibleSetMatchesTangentHeadingRange) {
  // On the S-curve the candidate tangents cover headings |phi| <= phi_max
  // (mod pi), with phi_max measured by brute force over the candidates.
  const Trajectory s = GenerateBuiltin("scurve", {}, 1e-3);
  double phi_max = 0.0;
  for (int k : TauCandidates(s, {})) {
    const Vec3 v = VelocityAt(s, k);
    phi_max = std::max(phi_max, std::abs(std::atan(v.y() / v.x())));
  }
  ASSERT_GT(phi_max, 0.6);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  int ok = 0, rejected = 0;
  for (int i = 0; i < 200; ++i) {
    const double a = angle(rng);
    const double folded = std::abs(std::atan(std::tan(a)));
    if (std::abs(folded - phi_max) < 0.02) continue;
    const Vec3 target = s.back() + 0.3 * Vec3(std::cos(a), std::sin(a), 0);
    if (folded < phi_max) {
      EXPECT_LT(Class2CorrectPosition(s, target).residual_position, 1e-9) << a;
      ++ok;
    } else {
      EXPECT_EQ(CodeOf([&] { Class2CorrectPosition(s, target); }),
                ErrorCode::kNoAccessibleTangent) << a;
      ++rejected;
    }
  }
  EXPECT_GT(ok, 20);
  EXPECT_GT(rejected, 20);
}

TEST(Class2CorrectTest, SmallCorrectionsAreLocal) {
  const Trajectory c = GenerateBuiltin("circle", {}, 1e-3);
  double previous = std::numeric_limits<double>::infinity();
  for (double size : {0.4, 0.2, 0.1, 0.05, 0.025, 0.0125}) {
    const CorrectionResult r = Class2CorrectPosition(c, c.back() + Vec3(0, size, 0));
    const double d = L2Distance(r.corrected, c);
    EXPECT_LT(d, previous) << size;
    previous = d;
  }
  EXPECT_LT(previous, 0.02);
}

TEST(OrientationCorrectTest, CurrentTangentGivesIdentity) {
  const Trajectory s = GenerateBuiltin("scurve", {}, 1e-3);
  const Vec3 v = VelocityAt(s, s.last());
  const CorrectionResult r = Class2CorrectOrientation(s, v);
  EXPECT_TRUE(r.deformations.empty());
  EXPECT_EQ(r.residual_orientation, 0.0);
}

TEST(OrientationCorrectTest, RotatesFinalTangentAndKeepsEndpoint) {
  const Trajectory s = GenerateBuiltin("scurve", {}, 1e-3);
  const double theta_d = FinalHeading(s) + 0.2;
  const CorrectionResult r =
      Class2CorrectOrientation(s, Vec3(std::cos(theta_d), std::sin(theta_d), 0));
  EXPECT_LT((r.corrected.back() - s.back()).norm(), 1e-9);
  EXPECT_LT(r.residual_orientation, 1e-6);
  // Independent heading estimate from the last two samples (O(dt) accurate).
  const Vec3 chord = r.corrected.back() - r.corrected[r.corrected.last() - 1];
  EXPECT_NEAR(std::atan2(chord.y(), chord.x()), theta_d, 5e-3);
  ExpectReplayExact(s, r);
  EXPECT_TRUE(IsAdmissible(CheckAdmissible(kCar, r.corrected)));
  EXPECT_LT(ReintegrationError(kCar, r.corrected), 1e-4);
}

TEST(OrientationCorrectTest, ReflectedTargetIsInaccessible) {
  const Trajectory s = GenerateBuiltin("scurve", {}, 1e-3);
  const Vec3 v = VelocityAt(s, s.last());
  EXPECT_EQ(CodeOf([&] { Class2CorrectOrientation(s, -v); }),
            ErrorCode::kTargetOrientationInaccessible);
}

TEST(OrientationCorrectTest, ConvexArcHasNoTangentThroughEndpoint) {
  // A tangent line of a circle meets it only once.
  const Trajectory c = GenerateBuiltin("circle", {}, 1e-3);
  EXPECT_EQ(CodeOf([&] { Class2CorrectOrientation(c, Vec3(-1, 0.3, 0)); }),
            ErrorCode::kNoTangentThroughEndpoint);
}

TEST(TwoStepTest, CurrentEndpointGivesZeroAlphas) {
  const Trajectory seed = CurvedSeed();
  const CorrectionResult r = Class2CorrectPosition2Step(seed, seed.back(), 300, 800);
  EXPECT_EQ(Param(r, "alpha1"), 0.0);
  EXPECT_EQ(Param(r, "alpha2"), 0.0);
  ASSERT_EQ(r.deformations.size(), 2u);
  for (const Deformation& d : r.deformations) {
    EXPECT_EQ(d.map.matrix, Mat3::Identity());
  }
  EXPECT_EQ(r.corrected.points(), seed.points());
}

TEST(TwoStepTest, ReachesFarTargetOnCurvedSeed) {
  const Trajectory seed = CurvedSeed();
  const Vec3 target(20, 40, 0);
  const CorrectionResult r = Class2CorrectPosition2StepAuto(seed, target);
  EXPECT_LT((r.corrected.back() - target).norm(), 1e-9);
  ExpectReplayExact(seed, r);
  EXPECT_TRUE(IsAdmissible(CheckAdmissible(kCar, r.corrected)));
}

TEST(TwoStepTest, LaterDeformationMustComeFirst) {
  const Trajectory seed = CurvedSeed();
  const Vec3 target = seed.back() + Vec3(-3, 4, 0);
  const CorrectionResult good =
      Class2CorrectPosition2Step(seed, target, 300, 800, TwoStepOrder::kLaterFirst);
  const CorrectionResult bad =
      Class2CorrectPosition2Step(seed, target, 300, 800, TwoStepOrder::kEarlierFirst);
  EXPECT_LT(good.residual_position, 1e-9);
  EXPECT_GT(bad.residual_position, 1e-2);
}

TEST(TwoStepTest, RejectsDegenerateInputs) {
  const Trajectory seed = CurvedSeed();
  EXPECT_EQ(CodeOf([&] { Class2CorrectPosition2Step(seed, Vec3(1, 1, 0), 500, 501); }),
            ErrorCode::kInvalidArgument);
  const Trajectory line = GenerateBuiltin("line", {}, 1e-3);
  EXPECT_EQ(CodeOf([&] { Class2CorrectPosition2Step(line, Vec3(1, 1, 0), 300, 900); }),
            ErrorCode::kInflectionAtTau);
  // The S-curve has equal tangents at t and T - t.
  const Trajectory s = GenerateBuiltin("scurve", {}, 1e-3);
  EXPECT_EQ(CodeOf([&] { Class2CorrectPosition2Step(s, Vec3(5, 1, 0), 500, 3500); }),
            ErrorCode::kCollinearTangents);
}

TEST(PoseTest, HeadingOfPlainTwoStepGivesZeroAlpha3) {
  const Trajectory seed = CurvedSeed();
  const Vec3 target(20, 40, 0);
  const PoseTaus taus = ChoosePoseTaus(seed, {});
  const CorrectionResult two = Class2CorrectPosition2Step(seed, target, taus.tau1, taus.tau2);
  const CorrectionResult r = Class2CorrectPose3Step(seed, target, FinalHeading(two.corrected));
  EXPECT_EQ(Param(r, "alpha3"), 0.0);
  EXPECT_LT(r.residual_position, 1e-9);
}

TEST(PoseTest, TwoHeadingsAtTheSameTarget) {
  // With these taus the resolved band at (20, 40) is about [1.395, 1.443] rad,
  // starting at the plain two-step heading.
  const Trajectory seed = CurvedSeed();
  const Vec3 target(20, 40, 0);
  const PoseTaus taus = ChoosePoseTaus(seed, {});
  const double base = PoseHeadingForAlpha(seed, target, taus, 0.0);
  std::vector<double> headings;
  for (double offset : {0.01, 0.04}) {
    const double theta_d = WrapAngle(base + offset);
    const CorrectionResult r = Class2CorrectPose3Step(seed, target, theta_d);
    EXPECT_LT((r.corrected.back() - target).norm(), 1e-9) << offset;
    EXPECT_LT(r.residual_orientation, 1e-6) << offset;
    EXPECT_NEAR(WrapAngle(FinalHeading(r.corrected) - theta_d), 0.0, 1e-6);
    EXPECT_NE(Param(r, "alpha3"), 0.0);
    ExpectReplayExact(seed, r);
    EXPECT_TRUE(IsAdmissible(CheckAdmissible(kCar, r.corrected)));
    headings.push_back(FinalHeading(r.corrected));
  }
  EXPECT_NEAR(headings[1] - headings[0], 0.03, 1e-6);
}

TEST(PoseTest, AlgebraicHeadingMatchesAppliedDeformations) {
  const Trajectory seed = CurvedSeed();
  const Vec3 target(20, 40, 0);
  const double theta_d = WrapAngle(PoseHeadingForAlpha(seed, target, ChoosePoseTaus(seed, {}), 0.0) + 0.2);
  const CorrectionResult r = Class2CorrectPose3Step(seed, target, theta_d);
  const double predicted =
      PoseHeadingForAlpha(seed, target, ChoosePoseTaus(seed, {}), Param(r, "alpha3"));
  EXPECT_NEAR(WrapAngle(predicted - FinalHeading(r.corrected)), 0.0, 1e-9);
}

TEST(PoseTest, HeadingSweepIsFiniteAndContinuous) {
  const Trajectory seed = CurvedSeed();
  const Vec3 target(20, 40, 0);
  const PoseTaus taus = ChoosePoseTaus(seed, {});
  const int n = 2001;
  for (int i = 0; i < n; ++i) {
    const double h = PoseHeadingForAlpha(seed, target, taus, -10.0 + 20.0 * i / (n - 1));
    ASSERT_TRUE(std::isfinite(h));
    ASSERT_LE(std::abs(h), kPi);
  }
  // Between alpha3 = -1.5 and the scan limit, where the requested headings
  // are bracketed, the map is continuous.
  double previous = PoseHeadingForAlpha(seed, target, taus, -1.5);
  for (int i = 1; i < n; ++i) {
    const double h = PoseHeadingForAlpha(seed, target, taus, -1.5 + 11.5 * i / (n - 1));
    EXPECT_LT(std::abs(h - previous), 1e-2);
    previous = h;
  }
}

TEST(PoseTest, UnresolvedBranchIsRejected) {
  // Headings just below the band are hit only by alpha3 < -5.7, where the
  // deformed tail turns too sharply for the grid.
  const Trajectory seed = CurvedSeed();
  const Vec3 target(20, 40, 0);
  const double base = PoseHeadingForAlpha(seed, target, ChoosePoseTaus(seed, {}), 0.0);
  EXPECT_EQ(CodeOf([&] { Class2CorrectPose3Step(seed, target, base - 0.05); }),
            ErrorCode::kRootNotBracketed);
}

TEST(PoseTest, UnreachableHeadingIsReported) {
  const Trajectory seed = CurvedSeed();
  PoseOptions options;
  options.alpha_max = 1e-3;
  const double base = PoseHeadingForAlpha(seed, Vec3(20, 40, 0), ChoosePoseTaus(seed, {}), 0.0);
  EXPECT_EQ(CodeOf([&] {
              Class2CorrectPose3Step(seed, Vec3(20, 40, 0), WrapAngle(base + 1.0), {}, options);
            }),
            ErrorCode::kRootNotBracketed);
}

// U in frame coordinates: each row carries (y1, z1) on its own parameter pair.
Eigen::Matrix<double, 3, 6> BuildU(double y1, double z1) {
  Eigen::Matrix<double, 3, 6> u = Eigen::Matrix<double, 3, 6>::Zero();
  for (int i = 0; i < 3; ++i) {
    u(i, 2 * i) = y1;
    u(i, 2 * i + 1) = z1;
  }
  return u;
}

Eigen::Matrix<double, 6, 1> ParamsOf(const CorrectionResult& r) {
  Eigen::Matrix<double, 6, 1> p;
  p << Param(r, "lambda"), Param(r, "mu"), Param(r, "nu"), Param(r, "xi"),
      Param(r, "sigma"), Param(r, "chi");
  return p;
}

TEST(UwvCorrectTest, CurrentEndpointGivesZeroParameters) {
  const Trajectory helix = GenerateBuiltin("helix", {}, 1e-3);
  const CorrectionResult r = UwvCorrectPosition(helix, 3000, helix.back());
  EXPECT_EQ(ParamsOf(r).norm(), 0.0);
  EXPECT_LT((r.deformations[0].map.matrix - Mat3::Identity()).norm(), 1e-15);
  EXPECT_LT((r.corrected.back() - helix.back()).norm(), 1e-15);
}

TEST(UwvCorrectTest, HelixOffsetHitsTargetAndKeepsRoll) {
  const Trajectory helix = GenerateBuiltin("helix", {}, 1e-3);
  const Vec3 target = helix.back() + Vec3(0.1, -0.2, 0.05);
  const CorrectionResult r = UwvCorrectPositionAuto(helix, target);
  EXPECT_LT((r.corrected.back() - target).norm(), 1e-8);
  ExpectReplayExact(helix, r);
  const RobotModel uwv{RobotKind::kUnderwater3D};
  RecoveryAux aux;
  for (int k = 0; k < helix.size(); ++k) aux.roll.push_back(0.1 * std::sin(helix.time(k)));
  const Recovery rec = RecoverCommands(uwv, r.corrected, aux);
  const IntegrationResult run = Integrate(uwv, rec.states.front(), rec.commands);
  double roll_error = 0.0;
  for (int k = 0; k < helix.size(); ++k) {
    ASSERT_EQ(rec.states[k].values[3], aux.roll[k]);
    roll_error = std::max(roll_error, std::abs(run.states[k].values[3] - aux.roll[k]));
  }
  EXPECT_LT(roll_error, 1e-6);
  EXPECT_LT(ReintegrationError(uwv, r.corrected), 1e-4);
}

TEST(UwvCorrectTest, SolutionIsTheMinimalNormSolution) {
  const Trajectory helix = GenerateBuiltin("helix", {}, 1e-3);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 5; ++trial) {
    const int tau = 1000 + 900 * trial;
    const Vec3 target = helix.back() + Vec3(u(rng), u(rng), u(rng));
    const CorrectionResult r = UwvCorrectPosition(helix, tau, target);
    const Mat3 q = FrameBasis(FrameAt(helix, tau));
    const Vec3 d1 = q.transpose() * (helix.back() - helix[tau]);
    const Vec3 b = q.transpose() * (target - helix[tau]) - d1;
    const Eigen::Matrix<double, 3, 6> big_u = BuildU(d1.y(), d1.z());
    const Eigen::Matrix<double, 6, 1> p = ParamsOf(r);
    EXPECT_LT((big_u * p - b).norm(), 1e-10);
    // Independent dense least-norm solve.
    const Eigen::Matrix<double, 6, 1> dense =
        big_u.completeOrthogonalDecomposition().solve(b);
    EXPECT_LT((dense - p).norm(), 1e-10);
    const Eigen::Matrix<double, 6, 1> svd =
        big_u.jacobiSvd(Eigen::ComputeFullU | Eigen::ComputeFullV).solve(b);
    EXPECT_LT((svd - p).norm(), 1e-10);
    // Alternatives p + N c over the three-dimensional null space.
    Eigen::FullPivLU<Eigen::Matrix<double, 3, 6>> lu(big_u);
    const Eigen::MatrixXd kernel = lu.kernel();
    ASSERT_EQ(kernel.cols(), 3);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      Eigen::Vector3d c(g(rng), g(rng), g(rng));
      c *= std::pow(10.0, (i % 7) - 4);
      const Eigen::Matrix<double, 6, 1> alt = p + kernel * c;
      ASSERT_LT((big_u * alt - b).norm(), 1e-8);
      EXPECT_LE(p.norm(), alt.norm() + 1e-15);
    }
  }
}

TEST(UwvCorrectTest, DegenerateLeverIsRejected) {
  // Straight 3D segment: C(T) - C(tau) is along the tangent.
  std::vector<Vec3> points;
  for (int k = 0; k <= 1000; ++k) points.emplace_back(1e-3 * k, 2e-3 * k, 0.5e-3 * k);
  const Trajectory line(3, 1e-3, points);
  EXPECT_EQ(CodeOf([&] { UwvCorrectPosition(line, 500, Vec3(1, 1, 1)); }),
            ErrorCode::kDegenerateU);
}

TEST(CorrectionClosureTest, EveryCorrectionIsAdmissibleForItsModel) {
  const Trajectory s = GenerateBuiltin("scurve", {}, 1e-3);
  const Vec3 target = s.back() + Vec3(0.3, 0.2, 0);
  const CorrectionResult c1 = Class1CorrectPositionAuto(s, target);
  const CorrectionResult c2 = Class2ReachPosition(s, target);
  for (RobotKind kind : AllRobotKinds()) {
    const RobotModel m{kind, 1.0, kind == RobotKind::kCarWithTrailers ? std::vector<double>{1.0}
                                                                      : std::vector<double>{}};
    if (m.base_dim() != 2) continue;
    if (m.robot_class() == RobotClass::kClassI) {
      EXPECT_TRUE(IsAdmissible(CheckAdmissible(m, c1.corrected))) << RobotKindName(kind);
    }
    EXPECT_TRUE(IsAdmissible(CheckAdmissible(m, c2.corrected))) << RobotKindName(kind);
  }
}

TEST(WrapAngleTest, Range) {
  EXPECT_DOUBLE_EQ(WrapAngle(kPi), kPi);
  EXPECT_DOUBLE_EQ(WrapAngle(-kPi), kPi);
  EXPECT_NEAR(WrapAngle(3 * kPi / 2), -kPi / 2, 1e-15);
  EXPECT_NEAR(WrapAngle(-7.0), -7.0 + 2 * kPi, 1e-15);
}

}  // namespace
}  // namespace affdeform
