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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

#include "affdeform/error.h"

namespace affdeform {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double DiscDistance(const Disc& d, const Vec3& p) {
  return (p - d.center).head<2>().norm() - d.radius;
}

double RectDistance(const Rect& r, const Vec3& p) {
  const Eigen::Vector2d q = (r.min.head<2>() - p.head<2>())
                                .cwiseMax(p.head<2>() - r.max.head<2>());
  if (q.maxCoeff() <= 0.0) return q.maxCoeff();
  return q.cwiseMax(0.0).norm();
}

// Distance along unit `n` from `p` to the exit of the disc grown by `grow`;
// 0 when the ray does not leave it.
double DiscExit(const Disc& d, const Vec3& p, const Vec3& n, double grow) {
  const Eigen::Vector2d w = (p - d.center).head<2>();
  const double r = d.radius + grow;
  const double b = w.dot(n.head<2>());
  const double disc = b * b - (w.squaredNorm() - r * r);
  if (disc < 0.0) return 0.0;
  return std::max(0.0, -b + std::sqrt(disc));
}

double RectExit(const Rect& rect, const Vec3& p, const Vec3& n, double grow) {
  double entry = -kInf, exit = kInf;
  for (int i = 0; i < 2; ++i) {
    const double lo = rect.min[i] - grow, hi = rect.max[i] + grow;
    if (n[i] == 0.0) {
      if (p[i] < lo || p[i] > hi) return 0.0;
      continue;
    }
    double t0 = (lo - p[i]) / n[i], t1 = (hi - p[i]) / n[i];
    if (t0 > t1) std::swap(t0, t1);
    entry = std::max(entry, t0);
    exit = std::min(exit, t1);
  }
  if (entry > exit || exit < 0.0) return 0.0;
  return exit;
}

double TotalDistanceFromIdentity(const CorrectionResult& r) {
  double sum = 0.0;
  for (const auto& d : r.deformations) sum += DistanceFromIdentity(d.map);
  return sum;
}

void AppendDeformations(CorrectionResult& into, const CorrectionResult& more) {
  for (const auto& d : more.deformations) into.deformations.push_back(d);
  for (const auto& p : more.parameters) into.parameters.push_back(p);
}

std::vector<int> CollidingSamples(const Trajectory& traj,
                                  const ObstacleSet& obstacles,
                                  double clearance) {
  std::vector<int> out;
  for (int k = 0; k < traj.size(); ++k) {
    if (obstacles.Distance(traj[k]) < clearance) out.push_back(k);
  }
  return out;
}

int NearestObstacle(const ObstacleSet& obstacles, const Vec3& p) {
  int best = -1;
  double best_d = kInf;
  int index = 0;
  for (const Disc& d : obstacles.discs) {
    if (const double dist = DiscDistance(d, p); dist < best_d) {
      best_d = dist;
      best = index;
    }
    ++index;
  }
  for (const Rect& r : obstacles.rects) {
    if (const double dist = RectDistance(r, p); dist < best_d) {
      best_d = dist;
      best = index;
    }
    ++index;
  }
  return best;
}

// Pushes `p` along `n` until it clears every obstacle grown by `grow`.
std::optional<Vec3> PushOut(const ObstacleSet& obstacles, Vec3 p, const Vec3& n,
                            double grow) {
  for (int attempt = 0; attempt < 32; ++attempt) {
    if (obstacles.Distance(p) >= grow) return p;
    double step = 0.0;
    for (const Disc& d : obstacles.discs) {
      if (DiscDistance(d, p) < grow) step = std::max(step, DiscExit(d, p, n, grow));
    }
    for (const Rect& r : obstacles.rects) {
      if (RectDistance(r, p) < grow) step = std::max(step, RectExit(r, p, n, grow));
    }
    if (!(step > 0.0)) return std::nullopt;
    p += (step + 1e-9) * n;
  }
  return std::nullopt;
}

}  // namespace

void ObstacleSet::Validate() const {
  for (const Disc& d : discs) {
    if (!(d.radius > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "disc radius must be > 0");
    }
  }
  for (const Rect& r : rects) {
    if (!(r.max.x() > r.min.x() && r.max.y() > r.min.y())) {
      throw Error(ErrorCode::kInvalidArgument, "rectangle max must exceed min");
    }
  }
}

double ObstacleSet::Distance(const Vec3& p) const {
  double best = kInf;
  for (const Disc& d : discs) best = std::min(best, DiscDistance(d, p));
  for (const Rect& r : rects) best = std::min(best, RectDistance(r, p));
  return best;
}

AvoidResult AvoidObstacles(const Trajectory& traj, const RobotModel& model,
                           const ObstacleSet& obstacles,
                           const AvoidOptions& options) {
  model.Validate();
  obstacles.Validate();
  if (traj.dim() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "obstacle avoidance is planar");
  }
  const Vec3 end = traj.back();
  if (obstacles.Distance(end) < options.clearance) {
    throw Error(ErrorCode::kNoCollisionFreeWaypoint,
                "the final position is inside an obstacle");
  }
  AvoidResult out{CorrectionResult{{}, traj, 0.0, 0.0, false, {}}, 0, {}, {}, {}};
  Trajectory current = traj;
  out.stages.push_back(current);
  const double grow = options.clearance + options.waypoint_margin;

  for (int iteration = 0;; ++iteration) {
    const std::vector<int> hits =
        CollidingSamples(current, obstacles, options.clearance);
    if (hits.empty()) break;
    if (iteration >= options.max_iterations) {
      throw Error(ErrorCode::kIterationCapExceeded,
                  "path still collides after " +
                      std::to_string(options.max_iterations) + " iterations");
    }
    // Deepest sample of the first colliding run.
    int t_obs = hits.front();
    double deepest = obstacles.Distance(current[t_obs]);
    for (size_t i = 1; i < hits.size() && hits[i] == hits[i - 1] + 1; ++i) {
      const double d = obstacles.Distance(current[hits[i]]);
      if (d < deepest) {
        deepest = d;
        t_obs = hits[i];
      }
    }
    if (t_obs < 4 * Trajectory::kMinSegments || t_obs + 4 > current.last()) {
      throw Error(ErrorCode::kNoCollisionFreeWaypoint,
                  "collision too close to an end of the trajectory");
    }

    const Trajectory prefix = current.Slice(0, t_obs);
    const Vec3 normal = FrameAt(current, t_obs).u_perp;
    std::optional<CorrectionResult> best;
    Vec3 best_waypoint = Vec3::Zero();
    double best_cost = kInf;
    for (double sign : {1.0, -1.0}) {
      const auto waypoint = PushOut(obstacles, current[t_obs], sign * normal, grow);
      if (!waypoint) continue;
      try {
        CorrectionResult r =
            Class2ReachPosition(prefix, *waypoint, options.policy);
        const double cost = TotalDistanceFromIdentity(r);
        if (cost < best_cost) {
          best_cost = cost;
          best = std::move(r);
          best_waypoint = *waypoint;
        }
      } catch (const Error&) {
        // Try the other side.
      }
    }
    if (!best) {
      throw Error(ErrorCode::kNoCollisionFreeWaypoint,
                  "no reachable collision-free waypoint near sample " +
                      std::to_string(t_obs));
    }
    out.waypoints.push_back(best_waypoint);
    out.obstacle_indices.push_back(NearestObstacle(obstacles, current[t_obs]));
    current = Replay(current, best->deformations);
    AppendDeformations(out.correction, *best);

    TauSearchPolicy restore = options.policy;
    restore.min_index = t_obs + 2;
    const CorrectionResult back = Class2ReachPosition(current, end, restore);
    current = back.corrected;
    AppendDeformations(out.correction, back);
    out.stages.push_back(current);
    out.iterations = iteration + 1;
  }
  out.correction.corrected = current;
  out.correction.residual_position = (current.back() - end).norm();
  return out;
}

DoorwayResult DoorwayConstraint(const Trajectory& traj, const RobotModel& model,
                                int door_index, const Vec3& position,
                                double heading, const TauSearchPolicy& policy) {
  model.Validate();
  if (traj.dim() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "doorway constraint is planar");
  }
  if (door_index < 4 * Trajectory::kMinSegments ||
      door_index + 4 * Trajectory::kMinSegments > traj.last()) {
    throw Error(ErrorCode::kInvalidArgument,
                "door sample too close to an end of the trajectory");
  }
  const Vec3 end = traj.back();
  DoorwayResult out{CorrectionResult{{}, traj, 0.0, 0.0, true, {}}, 0.0, 0.0,
                    {traj}};
  Trajectory current = traj;

  const CorrectionResult position_fix =
      Class2ReachPosition(current.Slice(0, door_index), position, policy);
  current = Replay(current, position_fix.deformations);
  AppendDeformations(out.correction, position_fix);
  out.stages.push_back(current);

  const Trajectory prefix = current.Slice(0, door_index);
  if (std::abs(WrapAngle(FinalHeading(prefix) - heading)) > 0.0) {
    const CorrectionResult heading_fix = Class2CorrectOrientation(
        prefix, Vec3(std::cos(heading), std::sin(heading), 0.0), policy);
    current = Replay(current, heading_fix.deformations);
    AppendDeformations(out.correction, heading_fix);
    out.stages.push_back(current);
  }

  TauSearchPolicy restore = policy;
  restore.min_index = door_index + 2;
  const CorrectionResult back = Class2ReachPosition(current, end, restore);
  current = back.corrected;
  AppendDeformations(out.correction, back);
  out.stages.push_back(current);

  out.correction.corrected = current;
  out.correction.residual_position = (current.back() - end).norm();
  out.residual_door_position = (current[door_index] - position).norm();
  const Vec3 v_door = VelocityAt(current, door_index);
  out.residual_door_heading =
      std::abs(WrapAngle(std::atan2(v_door.y(), v_door.x()) - heading));
  out.correction.residual_orientation = out.residual_door_heading;
  return out;
}

std::uint64_t ChildSeed(std::uint64_t seed, std::uint64_t run) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (run + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

NoiseModel DefaultFeedbackNoise() {
  NoiseModel noise;
  noise.segment_duration = 1.0;
  noise.accel_amplitude = 0.015;
  noise.zeta_amplitude = 0.006;
  noise.seed = 2024;
  return noise;
}

CommandProfile DefaultFeedbackPlan(double dt, double duration) {
  if (!(dt > 0.0) || !(duration > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dt and duration must be > 0");
  }
  const int n = static_cast<int>(std::lround(duration / dt)) + 1;
  RobotModel car{RobotKind::kKinematicCar, 1.0, {}};
  CommandProfile plan;
  plan.dt = duration / (n - 1);
  plan.names = car.command_names();
  plan.kinds = car.command_kinds();
  plan.channels.assign(2, std::vector<double>(n));
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (int k = 0; k < n; ++k) {
    const double t = k * plan.dt;
    plan.channels[0][k] = 1.0 + 0.2 * std::sin(kTwoPi * t / duration);
    // beta(t) = 0.15 + 0.05 sin(2 pi t / 20).
    plan.channels[1][k] = 0.05 * kTwoPi / 20.0 * std::cos(kTwoPi * t / 20.0);
  }
  return plan;
}

FullState DefaultFeedbackInitial() { return FullState{{0.0, 0.0, 0.0, 0.15}}; }

namespace {

// Car with the speed as a state: (x, y, theta, beta, v), commands (a, zeta).
using CarState = Eigen::Matrix<double, 5, 1>;

CarState CarRate(const CarState& s, double accel, double zeta, double l) {
  CarState d;
  d << s[4] * std::cos(s[2]), s[4] * std::sin(s[2]),
      s[4] * std::tan(s[3]) / l, zeta, accel;
  return d;
}

CarState CarStep(const CarState& s, double a0, double a1, double z0, double z1,
                 double dt, double l) {
  const double am = 0.5 * (a0 + a1), zm = 0.5 * (z0 + z1);
  const CarState k1 = CarRate(s, a0, z0, l);
  const CarState k2 = CarRate(s + 0.5 * dt * k1, am, zm, l);
  const CarState k3 = CarRate(s + 0.5 * dt * k2, am, zm, l);
  const CarState k4 = CarRate(s + dt * k3, a1, z1, l);
  return s + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct RunOutput {
  std::vector<Vec3> path;
  double final_error = 0.0;
  double max_accel = 0.0;
  double max_zeta = 0.0;
  double max_beta = 0.0;
  int attempted = 0;
  int accepted = 0;
};

struct FeedbackSetup {
  RobotModel model;
  double dt = 0.0;
  int n = 0;
  std::vector<double> accel;
  std::vector<double> zeta;
  CarState start;
  Vec3 target;
  double accel_bound = 0.0;
  double zeta_bound = 0.0;
  std::vector<int> correction_indices;
};

double MaxAbs(const std::vector<double>& v, size_t from = 0) {
  double m = 0.0;
  for (size_t i = from; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

RunOutput SimulateRun(const FeedbackSetup& setup, const NoiseModel& noise,
                      const TauSearchPolicy& policy, int run) {
  const int n = setup.n;
  const double dt = setup.dt;
  const double l = setup.model.wheelbase;
  std::mt19937_64 rng(ChildSeed(noise.seed, static_cast<std::uint64_t>(run)));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int segments =
      static_cast<int>(std::ceil((n - 1) * dt / noise.segment_duration)) + 1;
  std::vector<double> xi_a(segments), xi_z(segments);
  for (int i = 0; i < segments; ++i) {
    xi_a[i] = noise.accel_amplitude * gauss(rng);
    xi_z[i] = noise.zeta_amplitude * gauss(rng);
  }

  std::vector<double> accel = setup.accel;
  std::vector<double> zeta = setup.zeta;
  RunOutput out;
  out.path.resize(n);
  CarState s = setup.start;
  size_t next_fix = 0;
  for (int k = 0; k < n; ++k) {
    out.path[k] = Vec3(s[0], s[1], 0.0);
    out.max_beta = std::max(out.max_beta, std::abs(s[3]));
    if (k + 1 == n) break;
    if (next_fix < setup.correction_indices.size() &&
        setup.correction_indices[next_fix] == k) {
      ++next_fix;
      ++out.attempted;
      // Predicted remainder under the current plan, without noise.
      std::vector<Vec3> predicted(n - k);
      CarState p = s;
      for (int j = k; j < n; ++j) {
        predicted[j - k] = Vec3(p[0], p[1], 0.0);
        if (j + 1 < n) {
          p = CarStep(p, accel[j], accel[j + 1], zeta[j], zeta[j + 1], dt, l);
        }
      }
      try {
        const Trajectory ahead(2, dt, std::move(predicted));
        const CorrectionResult fix =
            Class2ReachPosition(ahead, setup.target, policy);
        if (!fix.deformations.empty()) {
          int tau = fix.deformations.front().tau_index;
          for (const auto& d : fix.deformations) tau = std::min(tau, d.tau_index);
          RecoveryAux aux;
          aux.verify_admissible = false;
          const Recovery rec = RecoverCommands(setup.model, fix.corrected, aux);
          const std::vector<double> new_accel =
              DifferentiateSeries(rec.commands.channels[0], dt, 1);
          const std::vector<double>& new_zeta = rec.commands.channels[1];
          if (MaxAbs(new_accel, tau) <= setup.accel_bound &&
              MaxAbs(new_zeta, tau) <= setup.zeta_bound) {
            for (size_t j = tau; j < new_accel.size(); ++j) {
              accel[k + j] = new_accel[j];
              zeta[k + j] = new_zeta[j];
            }
            ++out.accepted;
          }
        }
      } catch (const Error&) {
        // Keep the current plan.
      }
    }
    const int seg = std::min(segments - 1,
                             static_cast<int>(k * dt / noise.segment_duration));
    s = CarStep(s, accel[k] + xi_a[seg], accel[k + 1] + xi_a[seg],
                zeta[k] + xi_z[seg], zeta[k + 1] + xi_z[seg], dt, l);
  }
  out.final_error = (out.path.back() - setup.target).norm();
  out.max_accel = MaxAbs(accel);
  out.max_zeta = MaxAbs(zeta);
  return out;
}

double Mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return v.empty() ? 0.0 : sum / v.size();
}

}  // namespace

FeedbackStats FeedbackSimulate(const RobotModel& model,
                               const CommandProfile& planned,
                               const FullState& initial,
                               const NoiseModel& noise,
                               const FeedbackOptions& options) {
  model.Validate();
  if (model.kind != RobotKind::kKinematicCar) {
    throw Error(ErrorCode::kInvalidArgument,
                "feedback simulation expects a kinematic_car model");
  }
  if (options.corrections < 0 || options.runs < 1 || options.threads < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "need corrections >= 0, runs >= 1 and threads >= 1");
  }
  if (noise.accel_amplitude < 0.0 || noise.zeta_amplitude < 0.0 ||
      !(noise.segment_duration > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "noise amplitudes must be >= 0 and segments > 0");
  }
  if (initial.values.size() != 4 || planned.channels.size() != 2 ||
      planned.size() < 2 * Trajectory::kMinSegments) {
    throw Error(ErrorCode::kInvalidArgument,
                "feedback needs a (x, y, theta, beta) state and a (v, zeta) plan");
  }

  FeedbackSetup setup;
  setup.model = model;
  setup.dt = planned.dt;
  setup.n = planned.size();
  setup.accel = DifferentiateSeries(planned.channels[0], planned.dt, 1);
  setup.zeta = planned.channels[1];
  setup.start << initial.values[0], initial.values[1], initial.values[2],
      initial.values[3], planned.channels[0][0];
  {
    CarState s = setup.start;
    for (int k = 0; k + 1 < setup.n; ++k) {
      s = CarStep(s, setup.accel[k], setup.accel[k + 1], setup.zeta[k],
                  setup.zeta[k + 1], setup.dt, model.wheelbase);
    }
    setup.target = Vec3(s[0], s[1], 0.0);
  }
  setup.accel_bound =
      options.accept_factor * std::max(MaxAbs(setup.accel), options.accel_floor);
  setup.zeta_bound =
      options.accept_factor * std::max(MaxAbs(setup.zeta), options.zeta_floor);
  const int last = setup.n - 1;
  for (int i = 1; i <= options.corrections; ++i) {
    const int k = static_cast<int>(std::lround(
        static_cast<double>(i) * last / (options.corrections + 1)));
    if (k > 0 && k + 4 * Trajectory::kMinSegments < last) {
      setup.correction_indices.push_back(k);
    }
  }

  std::vector<RunOutput> runs(options.runs);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int r = next++; r < options.runs; r = next++) {
      runs[r] = SimulateRun(setup, noise, options.policy, r);
    }
  };
  const int threads = std::min(options.threads, options.runs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Aggregation in run order keeps the statistics independent of threading.
  FeedbackStats stats;
  stats.time.resize(setup.n);
  stats.mean_path.assign(setup.n, Vec3::Zero());
  stats.variability.assign(setup.n, 0.0);
  for (int k = 0; k < setup.n; ++k) stats.time[k] = k * setup.dt;
  for (const RunOutput& r : runs) {
    for (int k = 0; k < setup.n; ++k) stats.mean_path[k] += r.path[k];
    stats.final_errors.push_back(r.final_error);
    stats.max_accel.push_back(r.max_accel);
    stats.max_zeta.push_back(r.max_zeta);
    stats.max_beta.push_back(r.max_beta);
    stats.corrections_attempted += r.attempted;
    stats.corrections_accepted += r.accepted;
  }
  for (Vec3& m : stats.mean_path) m /= options.runs;
  for (const RunOutput& r : runs) {
    for (int k = 0; k < setup.n; ++k) {
      stats.variability[k] += (r.path[k] - stats.mean_path[k]).squaredNorm();
    }
  }
  for (double& v : stats.variability) v = std::sqrt(v / options.runs);
  stats.final_error_mean = Mean(stats.final_errors);
  double var = 0.0;
  for (double e : stats.final_errors) {
    var += (e - stats.final_error_mean) * (e - stats.final_error_mean);
  }
  stats.final_error_std = std::sqrt(var / options.runs);
  stats.max_accel_mean = Mean(stats.max_accel);
  stats.max_zeta_mean = Mean(stats.max_zeta);
  stats.max_beta_mean = Mean(stats.max_beta);
  stats.sample_path = runs.front().path;
  return stats;
}

void WriteFeedbackCsv(std::ostream& out, const FeedbackStats& stats) {
  out << "t,variability,mean_x,mean_y\n";
  for (size_t k = 0; k < stats.time.size(); ++k) {
    out << FormatNumber(stats.time[k]) << ',' << FormatNumber(stats.variability[k])
        << ',' << FormatNumber(stats.mean_path[k].x()) << ','
        << FormatNumber(stats.mean_path[k].y()) << '\n';
  }
}

namespace {

struct EndState {
  Vec3 position;
  double theta = 0.0;
  double beta = 0.0;
  double speed = 0.0;
};

EndState StateAt(const RobotModel& model, const Trajectory& traj, bool last) {
  const Recovery rec = RecoverCommands(model, traj);
  const int k = last ? traj.last() : 0;
  const auto& s = rec.states[k].values;
  return EndState{traj[k], s[2], s[3], rec.commands.channels[0][k]};
}

// Counter-steer to beta = 0 over n_a steps, then drive straight n_b steps.
// A negative speed integrates backward in time.
std::vector<Vec3> GrowStub(const RobotModel& model, const EndState& from,
                           double speed, int n_a, int n_b, double dt,
                           double max_rate, double* final_theta) {
  const double zeta = -from.beta / (n_a * dt);
  if (std::abs(zeta) > max_rate) {
    throw Error(ErrorCode::kStubTooShort,
                "counter-steering needs " + FormatNumber(std::abs(zeta)) +
                    " rad/s, above the cap");
  }
  RobotModel car = model;
  car.kind = RobotKind::kKinematicCar;
  car.hitch_lengths.clear();
  auto profile = [&](int steps, double rate) {
    CommandProfile p;
    p.dt = dt;
    p.names = car.command_names();
    p.kinds = car.command_kinds();
    p.channels = {std::vector<double>(steps + 1, speed),
                  std::vector<double>(steps + 1, rate)};
    return p;
  };
  const IntegrationResult turn = Integrate(
      car,
      FullState{{from.position.x(), from.position.y(), from.theta, from.beta}},
      profile(n_a, zeta));
  FullState mid = turn.states.back();
  mid.values[3] = 0.0;
  const IntegrationResult straight = Integrate(car, mid, profile(n_b, 0.0));
  std::vector<Vec3> points;
  for (int k = 1; k < turn.base.size(); ++k) points.push_back(turn.base[k]);
  for (int k = 1; k < straight.base.size(); ++k) {
    points.push_back(straight.base[k]);
  }
  *final_theta = straight.states.back().values[2];
  return points;
}

}  // namespace

GapFillResult GapFill(const Trajectory& traj1, const Trajectory& traj2,
                      const RobotModel& model, const GapSpec& spec,
                      const PoseOptions& pose_options) {
  model.Validate();
  if (model.kind != RobotKind::kKinematicCar) {
    throw Error(ErrorCode::kInvalidArgument, "gap filling expects kinematic_car");
  }
  if (traj1.dim() != 2 || traj2.dim() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "gap filling is planar");
  }
  if (std::abs(traj1.dt() - traj2.dt()) > 1e-12 * traj1.dt()) {
    throw Error(ErrorCode::kNonUniformGrid, "trajectories use different dt");
  }
  if (!(spec.delta_a > 0.0 && spec.delta_b > 0.0 && spec.max_steer_rate > 0.0 &&
        spec.max_accel > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gap spec values must be > 0");
  }
  const double dt = traj1.dt();
  const EndState e1 = StateAt(model, traj1, true);
  const EndState s2 = StateAt(model, traj2, false);

  auto concatenate = [](const Trajectory& a, const Trajectory& b) {
    std::vector<Vec3> pts = a.points();
    pts.insert(pts.end(), b.points().begin() + 1, b.points().end());
    return Trajectory(2, a.dt(), std::move(pts), a.min_speed());
  };
  const double scale = std::max(1.0, std::max(traj1.Extent(), traj2.Extent()));
  if ((e1.position - s2.position).norm() <= 1e-9 * scale &&
      std::abs(WrapAngle(e1.theta - s2.theta)) <= 1e-6 &&
      std::abs(e1.beta - s2.beta) <= 1e-6 &&
      std::abs(e1.speed - s2.speed) <= 1e-6 * std::max(1.0, e1.speed)) {
    GapFillResult r{concatenate(traj1, traj2), true, traj1, traj2, traj1,
                    std::nullopt, traj1.last(), traj1.last(), 0.0, 0.0,
                    traj1.last()};
    return r;
  }

  const int n_a = std::max(1, static_cast<int>(std::lround(spec.delta_a / dt)));
  const int n_b = std::max(1, static_cast<int>(std::lround(spec.delta_b / dt)));

  double theta_unused = 0.0;
  std::vector<Vec3> stub1 = GrowStub(model, e1, e1.speed, n_a, n_b, dt,
                                     spec.max_steer_rate, &theta_unused);
  std::vector<Vec3> pts1 = traj1.points();
  pts1.insert(pts1.end(), stub1.begin(), stub1.end());
  const Trajectory extended1(2, dt, std::move(pts1), traj1.min_speed());

  double theta2 = 0.0;
  std::vector<Vec3> stub2 = GrowStub(model, s2, -s2.speed, n_a, n_b, dt,
                                     spec.max_steer_rate, &theta2);
  std::reverse(stub2.begin(), stub2.end());
  std::vector<Vec3> pts2 = stub2;
  pts2.insert(pts2.end(), traj2.points().begin(), traj2.points().end());
  const Trajectory extended2(2, dt, std::move(pts2), traj2.min_speed());

  TauSearchPolicy policy;
  policy.max_index = traj1.last();
  CorrectionResult pose = Class2CorrectPose3Step(
      extended1, extended2.front(), theta2, policy, pose_options);
  const Trajectory& corrected1 = pose.corrected;

  // Speed blend over the two straight stubs.
  const int straight1 = traj1.last() + n_a;
  const Vec3 p_start = corrected1[straight1];
  const Vec3 p_end = extended2[n_b];
  const double length = (p_end - p_start).norm();
  const Vec3 u = (p_end - p_start) / length;
  const double v_in = (corrected1[straight1 + 1] - p_start).norm() / dt;
  const double v_out = s2.speed;
  const int steps = 2 * n_b;
  const double d = steps * dt;
  const double c = 6.0 * (length - 0.5 * (v_in + v_out) * d) / (d * d * d);
  const double slope = (v_out - v_in) / d;
  const double max_accel =
      std::max(std::abs(slope + c * d), std::abs(slope - c * d));
  // v(t) is a parabola; with c > 0 its minimum is at an end.
  double min_speed = std::min(v_in, v_out);
  if (c < 0.0) {
    const double t_vertex = std::clamp(0.5 * d + slope / (2.0 * c), 0.0, d);
    min_speed = std::min(min_speed, v_in + slope * t_vertex +
                                        c * t_vertex * (d - t_vertex));
  }
  if (max_accel > spec.max_accel || !(min_speed > 0.0)) {
    throw Error(ErrorCode::kSpeedBlendInfeasible,
                "speed blend needs |a| = " + FormatNumber(max_accel) +
                    " m/s^2 or stops the robot");
  }

  std::vector<Vec3> joined(corrected1.points().begin(),
                           corrected1.points().begin() + straight1 + 1);
  for (int j = 1; j <= steps; ++j) {
    const double t = j * dt;
    const double s =
        v_in * t + 0.5 * slope * t * t + c * (0.5 * d * t * t - t * t * t / 3.0);
    joined.push_back(j == steps ? p_end : Vec3(p_start + s * u));
  }
  joined.insert(joined.end(), extended2.points().begin() + n_b + 1,
                extended2.points().end());

  GapFillResult r{Trajectory(2, dt, std::move(joined), traj1.min_speed()),
                  false,
                  extended1,
                  extended2,
                  corrected1,
                  std::move(pose),
                  straight1,
                  straight1 + steps,
                  c,
                  d,
                  straight1 + steps + n_a};
  return r;
}

}  // namespace affdeform
