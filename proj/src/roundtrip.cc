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

#include "affdeform/roundtrip.h"

#include <algorithm>
#include <random>

#include "affdeform/correct.h"
#include "affdeform/error.h"

namespace affdeform {

namespace {

double MaxDeviation(const Trajectory& a, const Trajectory& b) {
  double worst = 0.0;
  for (int k = 0; k < std::min(a.size(), b.size()); ++k) {
    worst = std::max(worst, (a[k] - b[k]).norm());
  }
  return worst;
}

Trajectory Reintegrate(const RobotModel& model, const Trajectory& traj) {
  RecoveryAux aux;
  // A constant body orientation puts the (1,2) robot in its degenerate wheel
  // configuration whenever the path heading is body-lateral. A linear ramp
  // between the end headings avoids that on the fixtures and, unlike the
  // heading itself, stays smooth across the kink in v x a at tau.
  if (model.kind == RobotKind::kType12) {
    const std::vector<double> heading = Heading(traj);
    aux.orientation.resize(traj.size());
    for (int k = 0; k < traj.size(); ++k) {
      aux.orientation[k] = heading.front() + (heading.back() - heading.front()) *
                                                 k / traj.last();
    }
  }
  const Recovery rec = RecoverCommands(model, traj, aux);
  return Integrate(model, rec.states.front(), rec.commands).base;
}

}  // namespace

RandomDeformation RandomAdmissibleDeformation(const RobotModel& model,
                                              const Trajectory& traj,
                                              std::uint64_t seed,
                                              double magnitude) {
  model.Validate();
  if (traj.dim() != model.base_dim()) {
    throw Error(ErrorCode::kInvalidArgument,
                "trajectory dimension does not match the model");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  // Class-II maps need v x a != 0 at tau; the other families only a nonzero
  // velocity.
  std::vector<int> candidates;
  if (model.robot_class() == RobotClass::kClassII) {
    TauSearchPolicy policy;
    policy.margin_fraction = 0.25;
    candidates = TauCandidates(traj, policy);
  } else {
    for (int k = traj.last() / 4; k <= traj.last() - traj.last() / 4; ++k) {
      candidates.push_back(k);
    }
  }
  if (candidates.empty()) {
    throw Error(ErrorCode::kInflectionOnlyMatches,
                "no non-inflection sample in the middle of the trajectory");
  }
  const int tau = candidates[std::uniform_int_distribution<size_t>(
      0, candidates.size() - 1)(rng)];

  RandomDeformation out;
  out.tau_index = tau;
  switch (model.robot_class()) {
    case RobotClass::kClassI: {
      const double lambda = magnitude * unit(rng) / std::sqrt(2.0);
      const double mu = magnitude * unit(rng) / std::sqrt(2.0);
      out.map = Class1Map(traj, ClassIParams{tau, lambda, mu});
      break;
    }
    case RobotClass::kClassII: {
      const double b_norm = Class2Generator(traj, tau).norm();
      out.map = Class2Map(traj, ClassIIParams{tau, magnitude * unit(rng) / b_norm});
      break;
    }
    case RobotClass::kSpatial: {
      const double s = magnitude / std::sqrt(6.0);
      out.map = UwvMap(traj, Uwv6Params{tau, s * unit(rng), s * unit(rng),
                                        s * unit(rng), s * unit(rng),
                                        s * unit(rng), s * unit(rng)});
      break;
    }
  }
  return out;
}

RoundTripResult RoundTrip(const RobotModel& model, const Trajectory& traj,
                          std::uint64_t seed, double magnitude) {
  RandomDeformation d = RandomAdmissibleDeformation(model, traj, seed, magnitude);
  Trajectory deformed = Apply(traj, d.map, d.tau_index);
  Trajectory again = Reintegrate(model, deformed);
  const double deviation = MaxDeviation(deformed, again);
  return RoundTripResult{d.tau_index, d.map, std::move(deformed),
                         std::move(again), deviation};
}

double ReintegrationError(const RobotModel& model, const Trajectory& traj) {
  return MaxDeviation(traj, Reintegrate(model, traj));
}

}  // namespace affdeform
