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

#include "affdeform/apps.h"

#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "affdeform/error.h"
#include "affdeform/fixtures.h"
#include "affdeform/kinematics.h"
#include "affdeform/roundtrip.h"

namespace affdeform {
namespace {

constexpr double kPi = std::numbers::pi;
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

Trajectory AvoidCircle() {
  return GenerateBuiltin("circle", {{"r", 2.0}, {"T", 2 * kPi}}, 1e-3);
}

// Distance to a disc from the samples and the chord midpoints between them.
double DenseClearance(const Trajectory& traj, const Disc& disc) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < traj.size(); ++k) {
    best = std::min(best, (traj[k] - disc.center).norm() - disc.radius);
    if (k > 0) {
      const Vec3 mid = 0.5 * (traj[k] + traj[k - 1]);
      best = std::min(best, (mid - disc.center).norm() - disc.radius);
    }
  }
  return best;
}

double HeadingAt(const Trajectory& traj, int k) {
  const Vec3 d = traj[k + 1] - traj[k - 1];
  return std::atan2(d.y(), d.x());
}

TEST(ObstacleSetTest, SignedDistances) {
  ObstacleSet set;
  set.discs.push_back({Vec3(0, 0, 0), 1.0, true});
  set.rects.push_back({Vec3(3, -1, 0), Vec3(5, 1, 0), false});
  EXPECT_NEAR(set.Distance(Vec3(0, 2, 0)), 1.0, 1e-15);
  EXPECT_NEAR(set.Distance(Vec3(0, 0.5, 0)), -0.5, 1e-15);
  EXPECT_NEAR(set.Distance(Vec3(2.5, 0, 0)), 0.5, 1e-15);
  EXPECT_NEAR(set.Distance(Vec3(4, 0.2, 0)), -0.8, 1e-15);
  EXPECT_NEAR(set.Distance(Vec3(6, 2, 0)), std::sqrt(2.0), 1e-15);
}

TEST(ObstacleSetTest, RejectsBadShapes) {
  ObstacleSet set;
  set.discs.push_back({Vec3(0, 0, 0), 0.0, true});
  EXPECT_EQ(CodeOf([&] { set.Validate(); }), ErrorCode::kInvalidArgument);
  ObstacleSet rects;
  rects.rects.push_back({Vec3(1, 1, 0), Vec3(0, 2, 0), true});
  EXPECT_EQ(CodeOf([&] { rects.Validate(); }), ErrorCode::kInvalidArgument);
}

TEST(AvoidTest, NoCollisionLeavesPathUnchanged) {
  const Trajectory c = AvoidCircle();
  ObstacleSet set;
  set.discs.push_back({Vec3(10, 10, 0), 0.5, true});
  const AvoidResult r = AvoidObstacles(c, kCar, set);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_TRUE(r.correction.deformations.empty());
  EXPECT_EQ(r.correction.corrected.points(), c.points());
}

TEST(AvoidTest, UnforeseenDiscIsAvoided) {
  const Trajectory c = AvoidCircle();
  const Disc disc{Vec3(2, 2, 0), 0.3, false};
  ObstacleSet set;
  set.discs.push_back(disc);
  ASSERT_LT(DenseClearance(c, disc), 0.0);
  AvoidOptions options;
  options.clearance = 0.1;
  const AvoidResult r = AvoidObstacles(c, kCar, set, options);
  EXPECT_GE(r.iterations, 1);
  EXPECT_GE(DenseClearance(r.correction.corrected, disc), options.clearance);
  EXPECT_LT((r.correction.corrected.back() - c.back()).norm(), 1e-6);
  EXPECT_TRUE(IsAdmissible(CheckAdmissible(kCar, r.correction.corrected)));
  EXPECT_EQ(r.waypoints.size(), static_cast<size_t>(r.iterations));
  EXPECT_EQ(r.stages.size(), static_cast<size_t>(r.iterations) + 1);
  EXPECT_EQ(Replay(c, r.correction.deformations).points(),
            r.correction.corrected.points());
}

TEST(AvoidTest, CollidingSampleCountDecreases) {
  const Trajectory c = AvoidCircle();
  ObstacleSet set;
  set.discs.push_back({Vec3(2, 2, 0), 0.3, false});
  set.discs.push_back({Vec3(-0.3, 2.2, 0), 0.25, true});
  AvoidOptions options;
  const AvoidResult r = AvoidObstacles(c, kCar, set, options);
  auto colliding = [&](const Trajectory& t) {
    int n = 0;
    for (int k = 0; k < t.size(); ++k) n += set.Distance(t[k]) < options.clearance;
    return n;
  };
  ASSERT_GE(r.stages.size(), 2u);
  for (size_t i = 1; i < r.stages.size(); ++i) {
    EXPECT_LT(colliding(r.stages[i]), colliding(r.stages[i - 1])) << i;
  }
  EXPECT_EQ(colliding(r.correction.corrected), 0);
  EXPECT_LT((r.correction.corrected.back() - c.back()).norm(), 1e-6);
}

TEST(AvoidTest, ObstacleOnFinalPositionIsRejected) {
  const Trajectory c = AvoidCircle();
  ObstacleSet set;
  set.discs.push_back({c.back(), 0.2, true});
  EXPECT_EQ(CodeOf([&] { AvoidObstacles(c, kCar, set); }),
            ErrorCode::kNoCollisionFreeWaypoint);
}

TEST(DoorwayTest, CurrentPoseGivesIdentity) {
  const Trajectory s = GenerateBuiltin("scurve", {}, 1e-3);
  const int door = 3000;
  const double heading = FinalHeading(s.Slice(0, door));
  const DoorwayResult r = DoorwayConstraint(s, kCar, door, s[door], heading);
  EXPECT_EQ(r.residual_door_position, 0.0);
  EXPECT_EQ(r.correction.corrected.points(), s.points());
}

TEST(DoorwayTest, LateralShiftOnSCurve) {
  const Trajectory s = GenerateBuiltin("scurve", {}, 1e-3);
  const int door = 3000;
  const Vec3 v = s[door + 1] - s[door - 1];
  const Vec3 normal = Vec3(-v.y(), v.x(), 0).normalized();
  const Vec3 position = s[door] + 0.5 * normal;
  const double heading = HeadingAt(s, door);
  const DoorwayResult r = DoorwayConstraint(s, kCar, door, position, heading);
  const Trajectory& out = r.correction.corrected;
  EXPECT_LT((out[door] - position).norm(), 1e-6);
  EXPECT_LT(std::abs(HeadingAt(out, door) - heading), 1e-4);
  EXPECT_LT(r.residual_door_heading, 1e-4);
  EXPECT_LT((out.back() - s.back()).norm(), 1e-6);
  EXPECT_TRUE(IsAdmissible(CheckAdmissible(kCar, out)));
  EXPECT_GE(r.stages.size(), 3u);
}

TEST(FeedbackTest, ChildSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t run = 0; run < 1000; ++run) seen.insert(ChildSeed(7, run));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(ChildSeed(7, 3), ChildSeed(7, 3));
  EXPECT_NE(ChildSeed(7, 3), ChildSeed(8, 3));
}

TEST(FeedbackTest, ZeroNoiseHasNoError) {
  const CommandProfile plan = DefaultFeedbackPlan();
  NoiseModel noise;
  noise.accel_amplitude = 0.0;
  noise.zeta_amplitude = 0.0;
  for (int s : {0, 1, 5}) {
    FeedbackOptions options;
    options.corrections = s;
    options.runs = 3;
    const FeedbackStats st = FeedbackSimulate(kCar, plan, DefaultFeedbackInitial(), noise, options);
    EXPECT_LT(st.final_error_mean, 1e-9) << s;
    double worst = 0.0;
    for (double v : st.variability) worst = std::max(worst, v);
    EXPECT_LT(worst, 1e-12) << s;
  }
}

TEST(FeedbackTest, DeterministicAcrossThreadCounts) {
  const CommandProfile plan = DefaultFeedbackPlan();
  NoiseModel noise = DefaultFeedbackNoise();
  noise.seed = 99;
  FeedbackOptions options;
  options.corrections = 2;
  options.runs = 12;
  options.threads = 1;
  const FeedbackStats a = FeedbackSimulate(kCar, plan, DefaultFeedbackInitial(), noise, options);
  options.threads = 4;
  const FeedbackStats b = FeedbackSimulate(kCar, plan, DefaultFeedbackInitial(), noise, options);
  EXPECT_EQ(a.final_errors, b.final_errors);
  EXPECT_EQ(a.variability, b.variability);
  EXPECT_EQ(a.max_zeta, b.max_zeta);
  EXPECT_EQ(a.corrections_accepted, b.corrections_accepted);
  std::ostringstream csv_a, csv_b;
  WriteFeedbackCsv(csv_a, a);
  WriteFeedbackCsv(csv_b, b);
  EXPECT_EQ(csv_a.str(), csv_b.str());
  EXPECT_EQ(a.variability.front(), 0.0);
  EXPECT_EQ(a.variability.size(), a.time.size());
  EXPECT_GT(a.final_error_mean, 0.0);
}

TEST(FeedbackTest, CorrectionsReduceFinalError) {
  const CommandProfile plan = DefaultFeedbackPlan();
  NoiseModel noise = DefaultFeedbackNoise();
  noise.seed = 5;
  FeedbackOptions options;
  options.runs = 40;
  options.threads = 4;
  options.corrections = 0;
  const double e0 = FeedbackSimulate(kCar, plan, DefaultFeedbackInitial(), noise, options)
                        .final_error_mean;
  options.corrections = 5;
  const double e5 = FeedbackSimulate(kCar, plan, DefaultFeedbackInitial(), noise, options)
                        .final_error_mean;
  EXPECT_LT(e5, e0 / 2);
}

TEST(GapFillTest, ContinuationIsConcatenated) {
  const Trajectory c = GenerateBuiltin("circle", {{"r", 3.0}, {"T", 3.0}}, 1e-3);
  const int mid = c.last() / 2;
  const Trajectory first = c.Slice(0, mid);
  const Trajectory second = c.Slice(mid, c.last());
  const GapFillResult r = GapFill(first, second, kCar, {});
  EXPECT_TRUE(r.concatenated_only);
  EXPECT_FALSE(r.pose.has_value());
  EXPECT_EQ(r.joined.points(), c.points());
}

TEST(GapFillTest, JoinsTheTwoArcs) {
  const auto [first, second] = GapFillFixture();
  const GapSpec spec{0.5, 0.5, 1.0, 2.0};
  const GapFillResult r = GapFill(first, second, kCar, spec);
  ASSERT_FALSE(r.concatenated_only);
  const Trajectory& joined = r.joined;
  EXPECT_TRUE(IsAdmissible(CheckAdmissible(kCar, joined)));
  // Duration T1 + T2 + 2 (delta_a + delta_b).
  EXPECT_NEAR(joined.last() * joined.dt(), 3.0 + 3.0 + 2.0, 1e-12);
  EXPECT_EQ(joined.front(), first.front());
  EXPECT_EQ(joined.back(), second.back());

  // Steering angle and speed recovered from the joined path are continuous.
  const Recovery rec = RecoverCommands(kCar, joined);
  const std::vector<double> beta = [&] {
    std::vector<double> out;
    for (const FullState& s : rec.states) out.push_back(s.values[3]);
    return out;
  }();
  for (const std::vector<double>* series : {&beta, &rec.commands.channels[0]}) {
    const SeriesContinuity c = CheckSeriesContinuity(*series, joined.dt());
    EXPECT_TRUE(c.jump_indices.empty()) << c.worst_step << " > " << c.tolerance;
    EXPECT_LT(c.worst_step, 5e-3);
  }
  const std::vector<double>& speed = rec.commands.channels[0];
  double min_speed = speed.front();
  for (double v : speed) min_speed = std::min(min_speed, v);
  EXPECT_GT(min_speed, 0.5);
  EXPECT_LT(ReintegrationError(kCar, joined), 1e-4);
}

TEST(GapFillTest, CorrectedStubStaysStraight) {
  const auto [first, second] = GapFillFixture();
  const GapFillResult r = GapFill(first, second, kCar, {0.5, 0.5, 1.0, 2.0});
  for (const Trajectory* t : {&r.extended1, &r.corrected1}) {
    const int from = first.last() + 500;
    const Vec3 a = (*t)[from], b = t->back();
    const Vec3 dir = (b - a).normalized();
    double worst = 0.0;
    for (int k = from; k < t->size(); ++k) {
      worst = std::max(worst, std::abs(Cross2(dir, (*t)[k] - a)));
    }
    EXPECT_LT(worst, 1e-9);
  }
  // The corrected stub ends at the start pose of the extended second arc.
  EXPECT_LT((r.corrected1.back() - r.extended2.front()).norm(), 1e-9);
}

TEST(GapFillTest, InfeasibleSpecs) {
  const auto [first, second] = GapFillFixture();
  EXPECT_EQ(CodeOf([&] { GapFill(first, second, kCar, {0.5, 0.5, 1e-3, 2.0}); }),
            ErrorCode::kStubTooShort);
  EXPECT_EQ(CodeOf([&] { GapFill(first, second, kCar, {0.5, 0.5, 1.0, 1e-6}); }),
            ErrorCode::kSpeedBlendInfeasible);
  EXPECT_EQ(CodeOf([&] { GapFill(first, second, RobotModel{RobotKind::kUnicycle}, {}); }),
            ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace affdeform
