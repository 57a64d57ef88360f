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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include <Eigen/Dense>

#include "affdeform/error.h"

namespace affdeform {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Relative size below which a lever arm (y1, delta) counts as zero.
constexpr double kLeverTolerance = 1e-9;
// |sin| of the angle between two tangents below which they are collinear.
constexpr double kCollinearTolerance = 1e-6;
// The two-step pair search looks at most this many evenly spaced candidates.
constexpr int kPairSearchCandidates = 48;
constexpr int kSecantIterations = 40;

// Frame data of a class-II candidate.
struct Lever {
  int index = 0;
  Vec3 c = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
  double cross_va = 0.0;
  // ||B||_F = |v|^2 / |v x a|.
  double b_norm = 0.0;
};

Lever LeverAt(const Trajectory& traj, int k) {
  const FrameSample f = FrameAt(traj, k);
  Lever l;
  l.index = k;
  l.c = traj[k];
  l.v = f.v;
  l.a = f.a;
  l.cross_va = Cross2(f.v, f.a);
  l.b_norm = f.v.squaredNorm() / std::abs(l.cross_va);
  return l;
}

// Coefficient of a(tau) when `d` is written in the basis {v(tau), a(tau)}.
double Delta(const Lever& l, const Vec3& d) {
  return Cross2(l.v, d) / l.cross_va;
}

bool LeverVanishes(double delta, const Lever& l, const Vec3& d) {
  // delta * |a| is the distance-like part of d off the tangent line.
  return std::abs(delta) * l.a.norm() <= kLeverTolerance * std::max(d.norm(), 1e-300);
}

CorrectionResult Finish(const Trajectory& input, std::vector<Deformation> defs,
                        const Vec3& target) {
  CorrectionResult r{std::move(defs), Replay(input, {}), 0.0, 0.0, false, {}};
  r.corrected = Replay(input, r.deformations);
  r.residual_position = (r.corrected.back() - target).norm();
  return r;
}

CorrectionResult Identity(const Trajectory& traj, const Vec3& target) {
  CorrectionResult r{{}, traj, (traj.back() - target).norm(), 0.0, false, {}};
  return r;
}

void Append(CorrectionResult& into, const CorrectionResult& more) {
  for (const auto& d : more.deformations) into.deformations.push_back(d);
  for (const auto& p : more.parameters) into.parameters.push_back(p);
  into.corrected = more.corrected;
  into.residual_position = more.residual_position;
}

struct Window {
  int lo = 0;
  int hi = 0;
};

Window WindowOf(const Trajectory& traj, const TauSearchPolicy& policy) {
  const int last = traj.last();
  Window w;
  w.lo = std::max(2, static_cast<int>(std::ceil(policy.margin_fraction * last)));
  w.hi = std::min(last - 2, static_cast<int>(
                                std::floor((1.0 - policy.margin_fraction) * last)));
  if (policy.min_index >= 0) w.lo = std::max(w.lo, policy.min_index);
  if (policy.max_index >= 0) w.hi = std::min(w.hi, policy.max_index);
  return w;
}

// allowed[k] is false near inflections. Spatial trajectories have none.
std::vector<bool> AllowedMask(const Trajectory& traj,
                              const TauSearchPolicy& policy) {
  std::vector<bool> allowed(traj.size(), true);
  if (traj.dim() != 2) return allowed;
  for (int k : InflectionIndices(traj)) {
    for (int j = std::max(0, k - policy.inflection_guard);
         j <= std::min(traj.last(), k + policy.inflection_guard); ++j) {
      allowed[j] = false;
    }
  }
  return allowed;
}

struct SignChangeScan {
  // Nearest allowed samples to each sign change of the scanned quantity.
  std::vector<int> matches;
  bool any_change = false;
};

// Scans s(k) over the window with the policy stride and returns, for each
// sign change, the sample nearest the linearly interpolated root.
template <typename F>
SignChangeScan ScanSignChanges(const Trajectory& traj,
                               const TauSearchPolicy& policy, F s) {
  const Window w = WindowOf(traj, policy);
  const std::vector<bool> allowed = AllowedMask(traj, policy);
  const int stride = std::max(1, policy.stride);
  SignChangeScan out;
  if (w.hi < w.lo) return out;
  int prev = w.lo;
  double s_prev = s(prev);
  auto take = [&](int k) {
    if (allowed[k] &&
        (out.matches.empty() || out.matches.back() != k)) {
      out.matches.push_back(k);
    }
  };
  if (s_prev == 0.0) {
    out.any_change = true;
    take(prev);
  }
  for (int k = std::min(w.lo + stride, w.hi); k <= w.hi && k > prev;
       k = std::min(k + stride, w.hi)) {
    const double s_k = s(k);
    if (s_k == 0.0) {
      out.any_change = true;
      take(k);
    } else if (s_prev * s_k < 0.0) {
      out.any_change = true;
      const double root = prev + (k - prev) * s_prev / (s_prev - s_k);
      const int nearest = static_cast<int>(std::lround(root));
      const int other = nearest == prev ? k : prev;
      if (allowed[nearest]) {
        take(nearest);
      } else if (allowed[other]) {
        take(other);
      }
    }
    prev = k;
    s_prev = s_k;
    if (k == w.hi) break;
  }
  return out;
}

// Algebraic two-step plan: deformation at l2 first, then l1.
struct TwoStepPlan {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double cost = 0.0;
  bool ok = false;
};

TwoStepPlan PlanTwoStep(const Lever& l1, const Lever& l2, const Vec3& end,
                        const Vec3& target) {
  TwoStepPlan plan;
  const Vec3 e = target - end;
  const double det = Cross2(l1.v, l2.v);
  if (std::abs(det) < kCollinearTolerance * l1.v.norm() * l2.v.norm()) {
    return plan;
  }
  plan.alpha1 = Cross2(e, l2.v) / det;
  plan.alpha2 = Cross2(l1.v, e) / det;
  const double delta2 = Delta(l2, end - l2.c);
  const Vec3 end2 = end + plan.alpha2 * l2.v;
  const double delta1 = Delta(l1, end2 - l1.c);
  if ((plan.alpha2 != 0.0 && LeverVanishes(delta2, l2, end - l2.c)) ||
      (plan.alpha1 != 0.0 && LeverVanishes(delta1, l1, end2 - l1.c))) {
    return plan;
  }
  plan.lambda2 = plan.alpha2 == 0.0 ? 0.0 : plan.alpha2 / delta2;
  plan.lambda1 = plan.alpha1 == 0.0 ? 0.0 : plan.alpha1 / delta1;
  plan.cost = std::abs(plan.lambda1) * l1.b_norm +
              std::abs(plan.lambda2) * l2.b_norm;
  plan.ok = std::isfinite(plan.cost);
  return plan;
}

std::vector<int> Subsample(const std::vector<int>& items, int count) {
  if (static_cast<int>(items.size()) <= count) return items;
  std::vector<int> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(items[static_cast<size_t>(
        std::llround(static_cast<double>(i) * (items.size() - 1) / (count - 1)))]);
  }
  return out;
}

std::optional<std::pair<int, int>> BestPair(const Trajectory& traj,
                                            const Vec3& target,
                                            const TauSearchPolicy& policy) {
  const std::vector<int> picks =
      Subsample(TauCandidates(traj, policy), kPairSearchCandidates);
  std::vector<Lever> levers;
  for (int k : picks) levers.push_back(LeverAt(traj, k));
  std::optional<std::pair<int, int>> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < levers.size(); ++i) {
    for (size_t j = i + 1; j < levers.size(); ++j) {
      if (levers[j].index - levers[i].index < 2) continue;
      const TwoStepPlan plan =
          PlanTwoStep(levers[i], levers[j], traj.back(), target);
      if (plan.ok && plan.cost < best_cost) {
        best_cost = plan.cost;
        best = std::make_pair(levers[i].index, levers[j].index);
      }
    }
  }
  return best;
}

CorrectionResult MicroCorrect(CorrectionResult result, const Vec3& target,
                              const TauSearchPolicy& policy) {
  if (!policy.micro_correct ||
      result.residual_position <= kMicroCorrectionThreshold) {
    return result;
  }
  CorrectionResult micro =
      Class2CorrectPosition2StepAuto(result.corrected, target, policy);
  for (auto& p : micro.parameters) p.first = "micro_" + p.first;
  Append(result, micro);
  return result;
}

}  // namespace

Trajectory Replay(const Trajectory& input,
                  const std::vector<Deformation>& deformations) {
  Trajectory out = input;
  for (const Deformation& d : deformations) out = Apply(out, d.map, d.tau_index);
  return out;
}

double WrapAngle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double w = std::remainder(angle, kTwoPi);
  if (w <= -std::numbers::pi) w += kTwoPi;
  return w;
}

double FinalHeading(const Trajectory& traj) {
  const Vec3 v = VelocityAt(traj, traj.last());
  return std::atan2(v.y(), v.x());
}

std::vector<int> TauCandidates(const Trajectory& traj,
                               const TauSearchPolicy& policy) {
  const Window w = WindowOf(traj, policy);
  const std::vector<bool> allowed = AllowedMask(traj, policy);
  std::vector<int> out;
  for (int k = w.lo; k <= w.hi; k += std::max(1, policy.stride)) {
    if (allowed[k]) out.push_back(k);
  }
  return out;
}

CorrectionResult Class1CorrectPosition(const Trajectory& traj, int tau_index,
                                       const Vec3& target) {
  if (traj.dim() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "class-I correction is planar");
  }
  if (tau_index < 0 || tau_index > traj.last()) {
    throw Error(ErrorCode::kInvalidArgument, "tau index out of range");
  }
  const FrameSample f = FrameAt(traj, tau_index);
  const Vec3 d1 = traj.back() - traj[tau_index];
  const Vec3 d2 = target - traj[tau_index];
  const double x1 = d1.dot(f.u_par), y1 = d1.dot(f.u_perp);
  const double x2 = d2.dot(f.u_par), y2 = d2.dot(f.u_perp);
  if (std::abs(y1) <= kLeverTolerance * d1.norm()) {
    throw Error(ErrorCode::kTangentThroughEndpoint,
                "tangent at sample " + std::to_string(tau_index) +
                    " goes through C(T)");
  }
  if (y2 == 0.0) {
    throw Error(ErrorCode::kSingularMap,
                "target lies on the tangent line at tau");
  }
  const double lambda = (x2 - x1) / y1;
  const double mu = (y2 - y1) / y1;
  const AffineMap map = Class1Map(traj, {tau_index, lambda, mu});
  CorrectionResult r = Finish(traj, {{tau_index, map}}, target);
  r.parameters = {{"tau_index", tau_index}, {"lambda", lambda}, {"mu", mu}};
  return r;
}

CorrectionResult Class1CorrectPositionAuto(const Trajectory& traj,
                                           const Vec3& target,
                                           const TauSearchPolicy& policy) {
  if ((traj.back() - target).norm() == 0.0) return Identity(traj, target);
  int best = -1;
  double best_cost = std::numeric_limits<double>::infinity();
  const Window w = WindowOf(traj, policy);
  for (int k = w.lo; k <= w.hi; k += std::max(1, policy.stride)) {
    const FrameSample f = FrameAt(traj, k);
    const Vec3 d1 = traj.back() - traj[k];
    const Vec3 d2 = target - traj[k];
    const double y1 = d1.dot(f.u_perp), y2 = d2.dot(f.u_perp);
    if (std::abs(y1) <= kLeverTolerance * d1.norm() || y2 == 0.0) continue;
    const double lambda = (d2.dot(f.u_par) - d1.dot(f.u_par)) / y1;
    const double mu = (y2 - y1) / y1;
    const double cost = std::hypot(lambda, mu);
    if (cost < best_cost) {
      best_cost = cost;
      best = k;
    }
  }
  if (best < 0) {
    throw Error(ErrorCode::kTangentThroughEndpoint,
                "every candidate tangent goes through C(T)");
  }
  return Class1CorrectPosition(traj, best, target);
}

CorrectionResult Class2CorrectPosition(const Trajectory& traj,
                                       const Vec3& target,
                                       const TauSearchPolicy& policy) {
  if (traj.dim() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "class-II correction is planar");
  }
  const Vec3 e = target - traj.back();
  if (e.norm() == 0.0) return Identity(traj, target);
  const SignChangeScan scan = ScanSignChanges(traj, policy, [&](int k) {
    return Cross2(VelocityAt(traj, k), e);
  });
  if (!scan.any_change) {
    throw Error(ErrorCode::kNoAccessibleTangent,
                "no tangent is collinear with the correction direction");
  }
  if (scan.matches.empty()) {
    throw Error(ErrorCode::kInflectionOnlyMatches,
                "only inflection tangents are collinear with the correction");
  }
  int best = -1;
  double best_lambda = 0.0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int k : scan.matches) {
    const Lever l = LeverAt(traj, k);
    const Vec3 d = traj.back() - l.c;
    const double delta = Delta(l, d);
    if (LeverVanishes(delta, l, d)) continue;
    const double lambda = e.dot(l.v) / (delta * l.v.squaredNorm());
    const double cost = std::abs(lambda) * l.b_norm;
    if (cost < best_cost) {
      best_cost = cost;
      best = k;
      best_lambda = lambda;
    }
  }
  if (best < 0) {
    throw Error(ErrorCode::kTangentThroughEndpoint,
                "every matching tangent goes through C(T)");
  }
  const AffineMap map = Class2Map(traj, {best, best_lambda});
  CorrectionResult r = Finish(traj, {{best, map}}, target);
  r.parameters = {{"tau_index", best}, {"lambda", best_lambda}};
  return MicroCorrect(std::move(r), target, policy);
}

CorrectionResult Class2CorrectPosition2Step(const Trajectory& traj,
                                            const Vec3& target, int tau1,
                                            int tau2, TwoStepOrder order) {
  if (traj.dim() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "class-II correction is planar");
  }
  if (!(0 <= tau1 && tau1 + 2 <= tau2 && tau2 <= traj.last())) {
    throw Error(ErrorCode::kInvalidArgument,
                "two-step taus need 0 <= tau1 < tau2 - 1 <= K - 1");
  }
  // Generators throw InflectionAtTau for degenerate frames.
  Class2Generator(traj, tau1);
  Class2Generator(traj, tau2);
  const Lever l1 = LeverAt(traj, tau1);
  const Lever l2 = LeverAt(traj, tau2);
  const double det = Cross2(l1.v, l2.v);
  if (std::abs(det) < kCollinearTolerance * l1.v.norm() * l2.v.norm()) {
    throw Error(ErrorCode::kCollinearTangents,
                "v(tau1) and v(tau2) are collinear");
  }
  const Vec3 e = target - traj.back();
  const double alpha1 = Cross2(e, l2.v) / det;
  const double alpha2 = Cross2(l1.v, e) / det;

  // Deforms `c` at `tau` so that its endpoint moves by alpha * v_c(tau).
  auto step = [](const Trajectory& c, int tau, double alpha,
                 double& lambda) -> Deformation {
    lambda = 0.0;
    if (alpha != 0.0) {
      const Lever l = LeverAt(c, tau);
      const Vec3 d = c.back() - l.c;
      const double delta = Delta(l, d);
      if (LeverVanishes(delta, l, d)) {
        throw Error(ErrorCode::kTangentThroughEndpoint,
                    "tangent at sample " + std::to_string(tau) +
                        " goes through C(T)");
      }
      lambda = alpha / delta;
    }
    return {tau, Class2Map(c, {tau, lambda})};
  };

  std::vector<Deformation> defs;
  double lambda1 = 0.0, lambda2 = 0.0;
  if (order == TwoStepOrder::kLaterFirst) {
    defs.push_back(step(traj, tau2, alpha2, lambda2));
    const Trajectory mid = Apply(traj, defs[0].map, tau2);
    defs.push_back(step(mid, tau1, alpha1, lambda1));
  } else {
    defs.push_back(step(traj, tau1, alpha1, lambda1));
    const Trajectory mid = Apply(traj, defs[0].map, tau1);
    defs.push_back(step(mid, tau2, alpha2, lambda2));
  }
  CorrectionResult r = Finish(traj, std::move(defs), target);
  r.parameters = {{"tau1_index", tau1}, {"tau2_index", tau2},
                  {"alpha1", alpha1},   {"alpha2", alpha2},
                  {"lambda1", lambda1}, {"lambda2", lambda2}};
  return r;
}

CorrectionResult Class2CorrectPosition2StepAuto(const Trajectory& traj,
                                                const Vec3& target,
                                                const TauSearchPolicy& policy) {
  if (traj.dim() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "class-II correction is planar");
  }
  const auto pair = BestPair(traj, target, policy);
  if (!pair) {
    throw Error(ErrorCode::kCollinearTangents,
                "no pair of non-collinear tangents is usable");
  }
  return Class2CorrectPosition2Step(traj, target, pair->first, pair->second);
}

CorrectionResult Class2ReachPosition(const Trajectory& traj,
                                     const Vec3& target,
                                     const TauSearchPolicy& policy) {
  try {
    return Class2CorrectPosition(traj, target, policy);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoAccessibleTangent &&
        e.code() != ErrorCode::kInflectionOnlyMatches &&
        e.code() != ErrorCode::kTangentThroughEndpoint) {
      throw;
    }
  }
  return Class2CorrectPosition2StepAuto(traj, target, policy);
}

CorrectionResult Class2CorrectOrientation(const Trajectory& traj,
                                          const Vec3& u_d_in,
                                          const TauSearchPolicy& policy) {
  if (traj.dim() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "class-II correction is planar");
  }
  Vec3 u_d = u_d_in;
  u_d.z() = 0.0;
  if (!(u_d.norm() > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target direction is zero");
  }
  u_d.normalize();
  const Vec3 end = traj.back();
  const double theta_d = std::atan2(u_d.y(), u_d.x());
  const Vec3 v_end = VelocityAt(traj, traj.last());
  if (WrapAngle(FinalHeading(traj) - theta_d) == 0.0) {
    CorrectionResult r = Identity(traj, end);
    r.has_orientation = true;
    return r;
  }

  const SignChangeScan scan = ScanSignChanges(traj, policy, [&](int k) {
    return Cross2(VelocityAt(traj, k), end - traj[k]);
  });
  if (scan.matches.empty()) {
    throw Error(ErrorCode::kNoTangentThroughEndpoint,
                "no usable tangent line goes through C(T)");
  }
  int tau = -1;
  double lambda0 = 0.0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int k : scan.matches) {
    const Lever l = LeverAt(traj, k);
    const double side_d = Cross2(l.v, u_d);
    const double side_t = Cross2(l.v, v_end);
    // Accessible iff u_d lies in the open half-plane of u(T).
    if (!(side_d * side_t > 0.0)) continue;
    // v(T) + s v(tau) is parallel to u_d.
    const double s = -Cross2(v_end, u_d) / side_d;
    const double lambda = s / Delta(l, v_end);
    const double cost = std::abs(lambda) * l.b_norm;
    if (std::isfinite(cost) && cost < best_cost) {
      best_cost = cost;
      tau = k;
      lambda0 = lambda;
    }
  }
  if (tau < 0) {
    throw Error(ErrorCode::kTargetOrientationInaccessible,
                "target orientation is outside every accessible half-circle");
  }

  // The grid tangent at tau misses C(T) by O(dt), so the position is restored
  // with a two-step pass and lambda is refined until both hold.
  TauSearchPolicy restore = policy;
  restore.micro_correct = false;
  const Window w = WindowOf(traj, policy);
  if (w.hi - (tau + 2) >= (tau - 2) - w.lo) {
    restore.min_index = tau + 2;
  } else {
    restore.max_index = tau - 2;
  }
  std::optional<std::pair<int, int>> pair;

  auto evaluate = [&](double lambda, CorrectionResult* out) {
    const AffineMap map = Class2Map(traj, {tau, lambda});
    const Trajectory once = Apply(traj, map, tau);
    CorrectionResult r = Finish(traj, {{tau, map}}, end);
    if ((once.back() - end).norm() > kMicroCorrectionThreshold) {
      if (!pair) pair = BestPair(once, end, restore);
      if (!pair) {
        throw Error(ErrorCode::kCollinearTangents,
                    "no tangent pair available to restore C(T)");
      }
      Append(r, Class2CorrectPosition2Step(once, end, pair->first,
                                           pair->second));
    }
    const double g = WrapAngle(FinalHeading(r.corrected) - theta_d);
    if (out) *out = std::move(r);
    return g;
  };

  std::optional<CorrectionResult> best;
  double x0 = lambda0;
  CorrectionResult first = Identity(traj, end);
  double g0 = evaluate(x0, &first);
  best = std::move(first);
  double x1 = lambda0 + std::max(1e-6, 1e-3 * std::abs(lambda0));
  double g1 = evaluate(x1, nullptr);
  double x_best = x0, g_best = g0;
  for (int it = 0; it < kSecantIterations && std::abs(g_best) > 1e-13; ++it) {
    if (g1 == g0) break;
    const double x2 = x1 - g1 * (x1 - x0) / (g1 - g0);
    CorrectionResult candidate = Identity(traj, end);
    const double g2 = evaluate(x2, &candidate);
    if (std::abs(g2) < std::abs(g_best)) {
      x_best = x2;
      g_best = g2;
      best = std::move(candidate);
    }
    x0 = x1;
    g0 = g1;
    x1 = x2;
    g1 = g2;
  }
  CorrectionResult out = std::move(*best);
  out.parameters.insert(out.parameters.begin(),
                        {{"tau_index", tau}, {"lambda", x_best}});
  out.has_orientation = true;
  out.residual_orientation = std::abs(g_best);
  out.residual_position = (out.corrected.back() - end).norm();
  return out;
}

PoseTaus ChoosePoseTaus(const Trajectory& traj, const TauSearchPolicy& policy,
                        const PoseOptions& options) {
  PoseTaus taus{options.tau1, options.tau2, options.tau3};
  if (taus.tau1 < 0 || taus.tau2 < 0 || taus.tau3 < 0) {
    const std::vector<int> candidates = TauCandidates(traj, policy);
    if (candidates.size() < 3) {
      throw Error(ErrorCode::kCollinearTangents,
                  "fewer than three usable tau candidates");
    }
    // Quantiles of the arc length spanned by the candidates.
    std::vector<double> arc(traj.size(), 0.0);
    for (int k = 1; k < traj.size(); ++k) {
      arc[k] = arc[k - 1] + (traj[k] - traj[k - 1]).norm();
    }
    const double arc_lo = arc[candidates.front()];
    const double arc_hi = arc[candidates.back()];
    auto nearest = [&](double q) {
      const double s = arc_lo + q * (arc_hi - arc_lo);
      int best = candidates.front();
      for (int k : candidates) {
        if (std::abs(arc[k] - s) < std::abs(arc[best] - s)) best = k;
      }
      return best;
    };
    taus = {nearest(0.2), nearest(0.5), nearest(0.8)};
  }
  if (!(taus.tau1 + 2 <= taus.tau2 && taus.tau2 + 2 <= taus.tau3 &&
        taus.tau3 <= traj.last())) {
    throw Error(ErrorCode::kInvalidArgument,
                "pose taus must be increasing and at least two samples apart");
  }
  const Vec3 v1 = VelocityAt(traj, taus.tau1).normalized();
  const Vec3 v2 = VelocityAt(traj, taus.tau2).normalized();
  const Vec3 v3 = VelocityAt(traj, taus.tau3).normalized();
  if (std::abs(Cross2(v1, v2)) < kCollinearTolerance ||
      std::abs(Cross2(v2, v3)) < kCollinearTolerance ||
      std::abs(Cross2(v1, v3)) < kCollinearTolerance) {
    throw Error(ErrorCode::kCollinearTangents,
                "pose taus have collinear tangents");
  }
  return taus;
}

namespace {

struct PoseEval {
  double heading = kNaN;
  // Sum of ||M_i - I||_F over the three deformations.
  double cost = kNaN;
};

PoseEval EvaluatePose(const Trajectory& traj, const Vec3& target,
                      const PoseTaus& taus, double alpha3) {
  const Lever l1 = LeverAt(traj, taus.tau1);
  const Lever l2 = LeverAt(traj, taus.tau2);
  const Lever l3 = LeverAt(traj, taus.tau3);
  auto generator = [](const Lever& l) {
    Mat3 b = Mat3::Zero();
    b(0, 0) = -l.v.x() * l.v.y();
    b(0, 1) = l.v.x() * l.v.x();
    b(1, 0) = -l.v.y() * l.v.y();
    b(1, 1) = l.v.y() * l.v.x();
    return Mat3(b / l.cross_va);
  };
  PoseEval out;
  Vec3 end = traj.back();
  Vec3 tangent = VelocityAt(traj, traj.last());
  double lambda3 = 0.0;
  if (alpha3 != 0.0) {
    const double delta3 = Delta(l3, end - l3.c);
    if (LeverVanishes(delta3, l3, end - l3.c)) return out;
    lambda3 = alpha3 / delta3;
    tangent += lambda3 * generator(l3) * tangent;
    end += alpha3 * l3.v;
  }
  const TwoStepPlan plan = PlanTwoStep(l1, l2, end, target);
  if (!plan.ok) return out;
  tangent += plan.lambda2 * generator(l2) * tangent;
  tangent += plan.lambda1 * generator(l1) * tangent;
  out.heading = std::atan2(tangent.y(), tangent.x());
  out.cost = plan.cost + std::abs(lambda3) * l3.b_norm;
  return out;
}

}  // namespace

double PoseHeadingForAlpha(const Trajectory& traj, const Vec3& target,
                           const PoseTaus& taus, double alpha3) {
  return EvaluatePose(traj, target, taus, alpha3).heading;
}

CorrectionResult Class2CorrectPose3Step(const Trajectory& traj,
                                        const Vec3& target, double theta_d,
                                        const TauSearchPolicy& policy,
                                        const PoseOptions& options) {
  if (traj.dim() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "class-II correction is planar");
  }
  if (options.scan_points < 3 || options.scan_points % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "scan_points must be odd and >= 3");
  }
  const PoseTaus taus = ChoosePoseTaus(traj, policy, options);
  auto residual = [&](double alpha) {
    return WrapAngle(PoseHeadingForAlpha(traj, target, taus, alpha) - theta_d);
  };

  // Deformation at tau3 followed by the two-step return to the target.
  auto build = [&](double alpha3) {
    double lambda3 = 0.0;
    const Lever l3 = LeverAt(traj, taus.tau3);
    if (alpha3 != 0.0) lambda3 = alpha3 / Delta(l3, traj.back() - l3.c);
    std::vector<Deformation> defs{{taus.tau3, Class2Map(traj, {taus.tau3, lambda3})}};
    const Trajectory stage = Apply(traj, defs.back().map, taus.tau3);
    const CorrectionResult back =
        Class2CorrectPosition2Step(stage, target, taus.tau1, taus.tau2);
    for (const auto& d : back.deformations) defs.push_back(d);
    CorrectionResult r = Finish(traj, std::move(defs), target);
    r.parameters = {{"tau3_index", taus.tau3}, {"alpha3", alpha3},
                    {"lambda3", lambda3}};
    for (const auto& p : back.parameters) r.parameters.push_back(p);
    return r;
  };
  // Far roots can shrink M v enough on part of the tail that the turn there
  // is no longer resolved by the grid; those are skipped when the input
  // itself passes the heading check.
  RegularityOptions heading_check;
  heading_check.check_heading = true;
  const bool input_regular = [&] {
    const RegularityReport rep = CheckRegularity(traj, heading_check);
    return rep.is_d2 && rep.heading_d2;
  }();
  auto regular = [&](const Trajectory& corrected) {
    if (!input_regular) return true;
    const RegularityReport rep = CheckRegularity(corrected, heading_check);
    return rep.is_d2 && rep.heading_d2;
  };

  // Every bracketed root is refined; the one with the least total deformation
  // among those passing the check wins. Brackets straddling the +-pi wrap are
  // skipped.
  std::optional<CorrectionResult> chosen;
  const double r0 = residual(0.0);
  if (std::abs(r0) <= options.root_tolerance) {
    chosen = build(0.0);
  } else {
    const int n = options.scan_points;
    std::vector<double> grid(n), values(n);
    for (int i = 0; i < n; ++i) {
      grid[i] = options.alpha_max * (2.0 * i / (n - 1) - 1.0);
      values[i] = i == n / 2 ? r0 : residual(grid[i]);
    }
    bool bracketed = false;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < n; ++i) {
      double lo = grid[i], hi = grid[i + 1];
      double f_lo = values[i];
      const double f_hi = values[i + 1];
      if (!std::isfinite(f_lo) || !std::isfinite(f_hi)) continue;
      if (std::abs(f_lo) >= std::numbers::pi / 2 ||
          std::abs(f_hi) >= std::numbers::pi / 2 || f_lo * f_hi > 0.0) {
        continue;
      }
      double root = f_lo == 0.0 ? lo : hi;
      if (f_lo != 0.0 && f_hi != 0.0) {
        for (int it = 0; it < 200; ++it) {
          root = 0.5 * (lo + hi);
          const double f_mid = residual(root);
          if (!std::isfinite(f_mid) ||
              std::abs(f_mid) <= 0.01 * options.root_tolerance ||
              hi - lo < 1e-15) {
            break;
          }
          if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = root;
            f_lo = f_mid;
          } else {
            hi = root;
          }
        }
      }
      const PoseEval eval = EvaluatePose(traj, target, taus, root);
      if (!(std::abs(WrapAngle(eval.heading - theta_d)) <=
            options.root_tolerance) ||
          !(eval.cost < best_cost)) {
        continue;
      }
      bracketed = true;
      CorrectionResult candidate = build(root);
      if (!regular(candidate.corrected)) continue;
      best_cost = eval.cost;
      chosen = std::move(candidate);
    }
    if (!chosen) {
      throw Error(ErrorCode::kRootNotBracketed,
                  bracketed ? "final heading only reachable through turns the "
                              "sampling grid does not resolve"
                            : "final heading not reachable for |alpha3| <= " +
                                  FormatNumber(options.alpha_max));
    }
  }
  CorrectionResult r = std::move(*chosen);
  r.has_orientation = true;
  r.residual_orientation =
      std::abs(WrapAngle(FinalHeading(r.corrected) - theta_d));
  return r;
}

CorrectionResult UwvCorrectPosition(const Trajectory& traj, int tau_index,
                                    const Vec3& target) {
  if (traj.dim() != 3) {
    throw Error(ErrorCode::kInvalidArgument, "spatial correction needs 3D");
  }
  if (tau_index < 0 || tau_index > traj.last()) {
    throw Error(ErrorCode::kInvalidArgument, "tau index out of range");
  }
  const FrameSample f = FrameAt(traj, tau_index);
  const Mat3 q = FrameBasis(f);
  const Vec3 d1 = q.transpose() * (traj.back() - traj[tau_index]);
  const Vec3 d2 = q.transpose() * (target - traj[tau_index]);
  const Vec3 b = d2 - d1;
  const double y1 = d1.y(), z1 = d1.z();
  const double n = y1 * y1 + z1 * z1;
  if (!(std::sqrt(n) > kLeverTolerance * d1.norm()) || n == 0.0) {
    throw Error(ErrorCode::kDegenerateU,
                "C(T) - C(tau) is along the tangent at sample " +
                    std::to_string(tau_index));
  }
  // Each row of U is (y1, z1) on its own pair of parameters, so the least-norm
  // solution is b_i (y1, z1) / (y1^2 + z1^2) per row.
  Uwv6Params p;
  p.tau_index = tau_index;
  p.lambda = b.x() * y1 / n;
  p.mu = b.x() * z1 / n;
  p.nu = b.y() * y1 / n;
  p.xi = b.y() * z1 / n;
  p.sigma = b.z() * y1 / n;
  p.chi = b.z() * z1 / n;
  const AffineMap map = UwvMap(traj, p);
  CorrectionResult r = Finish(traj, {{tau_index, map}}, target);
  r.parameters = {{"tau_index", tau_index}, {"lambda", p.lambda},
                  {"mu", p.mu},             {"nu", p.nu},
                  {"xi", p.xi},             {"sigma", p.sigma},
                  {"chi", p.chi}};
  return r;
}

CorrectionResult UwvCorrectPositionAuto(const Trajectory& traj,
                                        const Vec3& target,
                                        const TauSearchPolicy& policy) {
  if ((traj.back() - target).norm() == 0.0) return Identity(traj, target);
  // The minimal parameter norm is |b| / sqrt(y1^2 + z1^2); b does not depend
  // on tau, so the best tau maximizes the lever y1^2 + z1^2.
  int best = -1;
  double best_lever = 0.0;
  for (int k : TauCandidates(traj, policy)) {
    const FrameSample f = FrameAt(traj, k);
    const Vec3 d = traj.back() - traj[k];
    const double lever = (d - d.dot(f.u_par) * f.u_par).squaredNorm();
    if (lever > best_lever) {
      best_lever = lever;
      best = k;
    }
  }
  if (best < 0) {
    throw Error(ErrorCode::kDegenerateU, "no tau with a usable lever arm");
  }
  return UwvCorrectPosition(traj, best, target);
}

}  // namespace affdeform
