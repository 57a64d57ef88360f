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

#include "affdeform/kinematics.h"

#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>

#include "affdeform/error.h"

namespace affdeform {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

using StateVec = Eigen::VectorXd;
using CommandVec = Eigen::VectorXd;

constexpr RobotKind kAllKinds[] = {
    RobotKind::kType30,       RobotKind::kType20,
    RobotKind::kType21,       RobotKind::kType11,
    RobotKind::kType12,       RobotKind::kUnicycle,
    RobotKind::kKinematicCar, RobotKind::kCarWithTrailers,
    RobotKind::kUnderwater3D,
};

void CheckPitch(double pitch) {
  // Pitch lives in (-pi/2, pi/2); a step past the boundary also counts.
  if (std::cos(pitch) < kEulerSingularity) {
    throw Error(ErrorCode::kEulerSingularity,
                "pitch angle reached the Euler-angle singularity");
  }
}

// Maps body rates onto Euler-angle rates (roll, pitch, yaw).
Eigen::Matrix3d EulerRateMatrix(double roll, double pitch) {
  const double sr = std::sin(roll), cr = std::cos(roll);
  const double tp = std::tan(pitch), sp = 1.0 / std::cos(pitch);
  Eigen::Matrix3d r;
  r << 1.0, sr * tp, cr * tp,
       0.0, cr, -sr,
       0.0, sr * sp, cr * sp;
  return r;
}

StateVec Derivative(const RobotModel& m, const StateVec& s,
                    const CommandVec& u) {
  StateVec d = StateVec::Zero(s.size());
  const double L = m.wheelbase;
  switch (m.kind) {
    case RobotKind::kType30: {
      const double c = std::cos(s[2]), sn = std::sin(s[2]);
      d[0] = c * u[0] - sn * u[1];
      d[1] = sn * u[0] + c * u[1];
      d[2] = u[2];
      break;
    }
    case RobotKind::kType20:
      d[0] = -u[0] * std::sin(s[2]);
      d[1] = u[0] * std::cos(s[2]);
      d[2] = u[1];
      break;
    case RobotKind::kType21:
      d[0] = -u[0] * std::sin(s[2] + s[3]);
      d[1] = u[0] * std::cos(s[2] + s[3]);
      d[2] = u[1];
      d[3] = u[2];
      break;
    case RobotKind::kType11:
      d[0] = -u[0] * L * std::sin(s[2]) * std::sin(s[3]);
      d[1] = u[0] * L * std::cos(s[2]) * std::sin(s[3]);
      d[2] = u[0] * std::cos(s[3]);
      d[3] = u[1];
      break;
    case RobotKind::kType12: {
      const double th = s[2], b1 = s[3], b2 = s[4];
      const double prod = std::sin(b1) * std::sin(b2);
      const double sum = std::sin(b1 + b2);
      d[0] = -u[0] * (2.0 * L * std::cos(th) * prod + L * std::sin(th) * sum);
      d[1] = -u[0] * (2.0 * L * std::sin(th) * prod - L * std::cos(th) * sum);
      d[2] = u[0] * std::sin(b2 - b1);
      d[3] = u[1];
      d[4] = u[2];
      break;
    }
    case RobotKind::kUnicycle:
      d[0] = u[0] * std::cos(s[2]);
      d[1] = u[0] * std::sin(s[2]);
      d[2] = u[1];
      break;
    case RobotKind::kKinematicCar:
    case RobotKind::kCarWithTrailers: {
      d[0] = u[0] * std::cos(s[2]);
      d[1] = u[0] * std::sin(s[2]);
      d[2] = u[0] * std::tan(s[3]) / L;
      d[3] = u[1];
      if (m.kind == RobotKind::kCarWithTrailers) {
        // s = (x, y, theta_0, beta, theta_1..theta_p).
        double product = 1.0;
        double previous = s[2];
        for (size_t i = 0; i < m.hitch_lengths.size(); ++i) {
          const double current = s[4 + i];
          d[4 + i] = u[0] / m.hitch_lengths[i] * product *
                     std::sin(previous - current);
          product *= std::cos(previous - current);
          previous = current;
        }
      }
      break;
    }
    case RobotKind::kUnderwater3D: {
      // s = (x, y, z, roll, pitch, yaw).
      const double pitch = s[4], yaw = s[5];
      CheckPitch(pitch);
      d[0] = u[0] * std::cos(yaw) * std::cos(pitch);
      d[1] = u[0] * std::sin(yaw) * std::cos(pitch);
      d[2] = -u[0] * std::sin(pitch);
      d.segment<3>(3) = EulerRateMatrix(s[3], pitch) * u.segment<3>(1);
      break;
    }
  }
  return d;
}

CommandVec CommandAt(const CommandProfile& cmds, int k) {
  CommandVec u(cmds.channels.size());
  for (size_t c = 0; c < cmds.channels.size(); ++c) u[c] = cmds.channels[c][k];
  return u;
}

Vec3 BaseOf(const RobotModel& m, const StateVec& s) {
  return m.kind == RobotKind::kUnderwater3D ? Vec3(s[0], s[1], s[2])
                                            : Vec3(s[0], s[1], 0.0);
}

std::vector<double> Constant(size_t n, double value) {
  return std::vector<double>(n, value);
}

std::vector<double> Rate(const std::vector<double>& series, double dt) {
  return DifferentiateSeries(series, dt, 1);
}

// Orientation profile for the class-I types whose orientation is free.
std::vector<double> FreeOrientation(const RecoveryAux& aux, size_t n) {
  if (aux.orientation.empty()) return Constant(n, aux.orientation_constant);
  if (aux.orientation.size() != n) {
    throw Error(ErrorCode::kInvalidArgument,
                "orientation profile length does not match the trajectory");
  }
  return aux.orientation;
}

CommandProfile MakeProfile(const RobotModel& m, double dt,
                           std::vector<std::vector<double>> channels) {
  CommandProfile p;
  p.dt = dt;
  p.names = m.command_names();
  p.kinds = m.command_kinds();
  p.channels = std::move(channels);
  return p;
}

// Integrates the trailer angles along a sampled car trajectory with the same
// RK4 scheme used by Integrate, interpolating v and theta_0 linearly.
std::vector<std::vector<double>> IntegrateTrailers(
    const RobotModel& m, const std::vector<double>& speed,
    const std::vector<double>& car_heading, const std::vector<double>& initial,
    double dt) {
  const size_t p = m.hitch_lengths.size();
  const size_t n = speed.size();
  auto rhs = [&](double v, double heading, const Eigen::VectorXd& th) {
    Eigen::VectorXd d(p);
    double product = 1.0;
    double previous = heading;
    for (size_t i = 0; i < p; ++i) {
      d[i] = v / m.hitch_lengths[i] * product * std::sin(previous - th[i]);
      product *= std::cos(previous - th[i]);
      previous = th[i];
    }
    return d;
  };
  std::vector<std::vector<double>> out(p, std::vector<double>(n));
  Eigen::VectorXd th(p);
  for (size_t i = 0; i < p; ++i) th[i] = initial[i];
  for (size_t k = 0; k < n; ++k) {
    for (size_t i = 0; i < p; ++i) out[i][k] = th[i];
    if (k + 1 == n) break;
    const double v0 = speed[k], v1 = speed[k + 1], vm = 0.5 * (v0 + v1);
    const double h0 = car_heading[k], h1 = car_heading[k + 1];
    const double hm = 0.5 * (h0 + h1);
    const Eigen::VectorXd k1 = rhs(v0, h0, th);
    const Eigen::VectorXd k2 = rhs(vm, hm, th + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = rhs(vm, hm, th + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = rhs(v1, h1, th + dt * k3);
    th += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return out;
}

}  // namespace

std::string_view RobotKindName(RobotKind kind) {
  switch (kind) {
    case RobotKind::kType30: return "type30";
    case RobotKind::kType20: return "type20";
    case RobotKind::kType21: return "type21";
    case RobotKind::kType11: return "type11";
    case RobotKind::kType12: return "type12";
    case RobotKind::kUnicycle: return "unicycle";
    case RobotKind::kKinematicCar: return "kinematic_car";
    case RobotKind::kCarWithTrailers: return "car_with_trailers";
    case RobotKind::kUnderwater3D: return "underwater3d";
  }
  return "unknown";
}

RobotKind ParseRobotKind(std::string_view name) {
  for (RobotKind kind : kAllKinds) {
    if (RobotKindName(kind) == name) return kind;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown robot model '" + std::string(name) + "'");
}

std::vector<RobotKind> AllRobotKinds() {
  return std::vector<RobotKind>(std::begin(kAllKinds), std::end(kAllKinds));
}

void RobotModel::Validate() const {
  if (!(wheelbase > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "wheelbase must be > 0");
  }
  if (kind == RobotKind::kCarWithTrailers && hitch_lengths.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "car_with_trailers needs at least one trailer");
  }
  for (double l : hitch_lengths) {
    if (!(l > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "hitch lengths must be > 0");
    }
  }
}

int RobotModel::base_dim() const {
  return kind == RobotKind::kUnderwater3D ? 3 : 2;
}

RobotClass RobotModel::robot_class() const {
  switch (kind) {
    case RobotKind::kType30:
    case RobotKind::kType21:
    case RobotKind::kType12:
    case RobotKind::kUnicycle:
      return RobotClass::kClassI;
    case RobotKind::kType20:
    case RobotKind::kType11:
    case RobotKind::kKinematicCar:
    case RobotKind::kCarWithTrailers:
      return RobotClass::kClassII;
    case RobotKind::kUnderwater3D:
      return RobotClass::kSpatial;
  }
  return RobotClass::kClassI;
}

std::vector<std::string> RobotModel::state_names() const {
  switch (kind) {
    case RobotKind::kType30:
    case RobotKind::kType20:
    case RobotKind::kUnicycle:
      return {"x", "y", "theta"};
    case RobotKind::kType21:
    case RobotKind::kType11:
    case RobotKind::kKinematicCar:
      return {"x", "y", "theta", "beta"};
    case RobotKind::kType12:
      return {"x", "y", "theta", "beta1", "beta2"};
    case RobotKind::kCarWithTrailers: {
      std::vector<std::string> names = {"x", "y", "theta0", "beta"};
      for (size_t i = 1; i <= hitch_lengths.size(); ++i) {
        names.push_back("theta" + std::to_string(i));
      }
      return names;
    }
    case RobotKind::kUnderwater3D:
      return {"x", "y", "z", "phi", "theta", "psi"};
  }
  return {};
}

std::vector<std::string> RobotModel::command_names() const {
  switch (kind) {
    case RobotKind::kType30: return {"eta1", "eta2", "eta3"};
    case RobotKind::kType20: return {"eta1", "eta2"};
    case RobotKind::kType21: return {"eta1", "eta2", "zeta1"};
    case RobotKind::kType11: return {"eta1", "zeta1"};
    case RobotKind::kType12: return {"eta1", "zeta1", "zeta2"};
    case RobotKind::kUnicycle: return {"v", "omega"};
    case RobotKind::kKinematicCar:
    case RobotKind::kCarWithTrailers:
      return {"v", "zeta"};
    case RobotKind::kUnderwater3D: return {"v", "omega_x", "omega_y", "omega_z"};
  }
  return {};
}

std::vector<CommandKind> RobotModel::command_kinds() const {
  using enum CommandKind;
  switch (kind) {
    case RobotKind::kType30: return {kVelocity, kVelocity, kVelocity};
    case RobotKind::kType20: return {kVelocity, kVelocity};
    case RobotKind::kType21: return {kVelocity, kVelocity, kRate};
    case RobotKind::kType11: return {kVelocity, kRate};
    case RobotKind::kType12: return {kVelocity, kRate, kRate};
    case RobotKind::kUnicycle: return {kVelocity, kRate};
    case RobotKind::kKinematicCar:
    case RobotKind::kCarWithTrailers:
      return {kVelocity, kRate};
    case RobotKind::kUnderwater3D: return {kVelocity, kRate, kRate, kRate};
  }
  return {};
}

const std::vector<double>& CommandProfile::channel(std::string_view name) const {
  for (size_t c = 0; c < names.size(); ++c) {
    if (names[c] == name) return channels[c];
  }
  throw Error(ErrorCode::kInvalidArgument,
              "no command channel named '" + std::string(name) + "'");
}

IntegrationResult Integrate(const RobotModel& model, const FullState& initial,
                            const CommandProfile& commands) {
  model.Validate();
  const size_t state_size = model.state_names().size();
  if (initial.values.size() != state_size) {
    throw Error(ErrorCode::kInvalidArgument,
                "initial state has " + std::to_string(initial.values.size()) +
                    " values, model expects " + std::to_string(state_size));
  }
  if (commands.channels.size() != model.command_names().size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "command profile does not match the model");
  }
  const int n = commands.size();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "empty command profile");
  for (const auto& ch : commands.channels) {
    if (static_cast<int>(ch.size()) != n) {
      throw Error(ErrorCode::kInvalidArgument, "command series lengths differ");
    }
  }
  const double dt = commands.dt;
  StateVec s = Eigen::Map<const StateVec>(initial.values.data(), state_size);
  if (model.kind == RobotKind::kUnderwater3D) CheckPitch(s[4]);

  std::vector<FullState> states(n);
  std::vector<Vec3> base(n);
  for (int k = 0; k < n; ++k) {
    states[k].values.assign(s.data(), s.data() + s.size());
    base[k] = BaseOf(model, s);
    if (k + 1 == n) break;
    const CommandVec u0 = CommandAt(commands, k);
    const CommandVec u1 = CommandAt(commands, k + 1);
    const CommandVec um = 0.5 * (u0 + u1);
    const StateVec k1 = Derivative(model, s, u0);
    const StateVec k2 = Derivative(model, s + 0.5 * dt * k1, um);
    const StateVec k3 = Derivative(model, s + 0.5 * dt * k2, um);
    const StateVec k4 = Derivative(model, s + dt * k3, u1);
    s += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (model.kind == RobotKind::kUnderwater3D) CheckPitch(s[4]);
  }
  return IntegrationResult{std::move(states),
                           Trajectory(model.base_dim(), dt, std::move(base))};
}

Recovery RecoverCommands(const RobotModel& model, const Trajectory& traj,
                         const RecoveryAux& aux) {
  model.Validate();
  if (traj.dim() != model.base_dim()) {
    throw Error(ErrorCode::kInvalidArgument,
                "trajectory dimension does not match the robot model");
  }
  if (aux.verify_admissible) {
    const RegularityReport report = CheckAdmissible(model, traj);
    if (!IsAdmissible(report)) {
      const auto& idx = report.is_d2 ? report.heading_discontinuity_indices
                                     : report.discontinuity_indices;
      throw Error(ErrorCode::kAdmissibilityViolation,
                  std::string("trajectory is not admissible for ") +
                      std::string(RobotKindName(model.kind)) +
                      (report.is_d2 ? ": heading not D2" : ": not D2") +
                      " at sample " + std::to_string(idx.front()));
    }
  }

  const size_t n = traj.size();
  const double dt = traj.dt();
  const double L = model.wheelbase;
  const std::vector<Vec3> vel = Differentiate(traj, 1);
  std::vector<double> speed(n);
  for (size_t k = 0; k < n; ++k) speed[k] = vel[k].norm();
  // Heading rate from v x a rather than by differentiating the heading, which
  // would stack two one-sided stencils at the ends.
  std::vector<double> omega_path;
  if (traj.dim() == 2) {
    const std::vector<Vec3> acc = Differentiate(traj, 2);
    omega_path.resize(n);
    for (size_t k = 0; k < n; ++k) {
      omega_path[k] = Cross2(vel[k], acc[k]) / vel[k].squaredNorm();
    }
  }

  Recovery out;
  out.states.resize(n);
  auto set_states = [&](const std::vector<const std::vector<double>*>& cols) {
    for (size_t k = 0; k < n; ++k) {
      auto& v = out.states[k].values;
      v.clear();
      v.push_back(traj[k].x());
      v.push_back(traj[k].y());
      if (model.kind == RobotKind::kUnderwater3D) v.push_back(traj[k].z());
      for (const auto* col : cols) v.push_back((*col)[k]);
    }
  };

  switch (model.kind) {
    case RobotKind::kType30: {
      const std::vector<double> theta = FreeOrientation(aux, n);
      const std::vector<double> theta_rate = Rate(theta, dt);
      std::vector<double> eta1(n), eta2(n);
      for (size_t k = 0; k < n; ++k) {
        const double c = std::cos(theta[k]), s = std::sin(theta[k]);
        eta1[k] = c * vel[k].x() + s * vel[k].y();
        eta2[k] = -s * vel[k].x() + c * vel[k].y();
      }
      out.commands = MakeProfile(model, dt, {eta1, eta2, theta_rate});
      set_states({&theta});
      break;
    }
    case RobotKind::kType20: {
      const std::vector<double> heading = Heading(traj);
      std::vector<double> theta(n);
      for (size_t k = 0; k < n; ++k) theta[k] = heading[k] - kHalfPi;
      out.commands = MakeProfile(model, dt, {speed, omega_path});
      set_states({&theta});
      break;
    }
    case RobotKind::kType21: {
      const std::vector<double> heading = Heading(traj);
      const std::vector<double> theta = FreeOrientation(aux, n);
      std::vector<double> beta(n);
      for (size_t k = 0; k < n; ++k) beta[k] = heading[k] - kHalfPi - theta[k];
      out.commands =
          MakeProfile(model, dt, {speed, Rate(theta, dt), Rate(beta, dt)});
      set_states({&theta, &beta});
      break;
    }
    case RobotKind::kType11: {
      const std::vector<double> heading = Heading(traj);
      std::vector<double> theta(n), beta(n), eta1(n);
      for (size_t k = 0; k < n; ++k) {
        theta[k] = heading[k] - kHalfPi;
        beta[k] = std::atan2(speed[k] / L, omega_path[k]);
        const double sb = std::sin(beta[k]);
        if (std::abs(sb) < kSingularSteering) {
          throw Error(ErrorCode::kSingularSteering,
                      "sin(beta) vanishes at sample " + std::to_string(k));
        }
        eta1[k] = speed[k] / (L * sb);
      }
      Unwrap(beta);
      out.commands = MakeProfile(model, dt, {eta1, Rate(beta, dt)});
      set_states({&theta, &beta});
      break;
    }
    case RobotKind::kType12: {
      const std::vector<double> theta = FreeOrientation(aux, n);
      const std::vector<double> theta_rate = Rate(theta, dt);
      std::vector<double> beta1(n), beta2(n), eta1(n);
      for (size_t k = 0; k < n; ++k) {
        const double c = std::cos(theta[k]), s = std::sin(theta[k]);
        // Body-frame velocity.
        const double along = c * vel[k].x() + s * vel[k].y();
        const double across = -s * vel[k].x() + c * vel[k].y();
        const double turn = L * theta_rate[k];
        if (std::hypot(along, across + turn) < kSingularSteering ||
            std::hypot(along, across - turn) < kSingularSteering) {
          throw Error(ErrorCode::kSingularSteering,
                      "steering angles undefined at sample " + std::to_string(k));
        }
        beta1[k] = std::atan2(-along, across + turn);
        beta2[k] = std::atan2(-along, across - turn);
      }
      Unwrap(beta1);
      Unwrap(beta2);
      for (size_t k = 0; k < n; ++k) {
        const double c = std::cos(theta[k]), s = std::sin(theta[k]);
        const Eigen::Vector3d body(c * vel[k].x() + s * vel[k].y(),
                                   -s * vel[k].x() + c * vel[k].y(),
                                   theta_rate[k]);
        const Eigen::Vector3d g(-2.0 * L * std::sin(beta1[k]) * std::sin(beta2[k]),
                                L * std::sin(beta1[k] + beta2[k]),
                                std::sin(beta2[k] - beta1[k]));
        const double g2 = g.squaredNorm();
        if (g2 < kSingularSteering) {
          throw Error(ErrorCode::kSingularSteering,
                      "degenerate wheel configuration at sample " +
                          std::to_string(k));
        }
        eta1[k] = g.dot(body) / g2;
      }
      out.commands =
          MakeProfile(model, dt, {eta1, Rate(beta1, dt), Rate(beta2, dt)});
      set_states({&theta, &beta1, &beta2});
      break;
    }
    case RobotKind::kUnicycle: {
      const std::vector<double> heading = Heading(traj);
      out.commands = MakeProfile(model, dt, {speed, omega_path});
      set_states({&heading});
      break;
    }
    case RobotKind::kKinematicCar:
    case RobotKind::kCarWithTrailers: {
      const std::vector<double> heading = Heading(traj);
      std::vector<double> beta(n);
      for (size_t k = 0; k < n; ++k) beta[k] = std::atan(L * omega_path[k] / speed[k]);
      out.commands = MakeProfile(model, dt, {speed, Rate(beta, dt)});
      if (model.kind == RobotKind::kKinematicCar) {
        set_states({&heading, &beta});
        break;
      }
      std::vector<double> initial = aux.trailer_initial;
      if (initial.empty()) initial.assign(model.hitch_lengths.size(), heading[0]);
      if (initial.size() != model.hitch_lengths.size()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "trailer_initial must list one angle per trailer");
      }
      const auto trailers =
          IntegrateTrailers(model, speed, heading, initial, dt);
      std::vector<const std::vector<double>*> cols = {&heading, &beta};
      for (const auto& t : trailers) cols.push_back(&t);
      set_states(cols);
      break;
    }
    case RobotKind::kUnderwater3D: {
      std::vector<double> yaw(n), pitch(n);
      for (size_t k = 0; k < n; ++k) {
        if (!(std::hypot(vel[k].x(), vel[k].y()) > 0.0)) {
          throw Error(ErrorCode::kEulerSingularity,
                      "vertical velocity at sample " + std::to_string(k));
        }
        yaw[k] = std::atan2(vel[k].y(), vel[k].x());
        pitch[k] = std::asin(std::clamp(-vel[k].z() / speed[k], -1.0, 1.0));
        CheckPitch(pitch[k]);
      }
      Unwrap(yaw);
      std::vector<double> roll = aux.roll;
      if (roll.empty()) roll.assign(n, 0.0);
      if (roll.size() != n) {
        throw Error(ErrorCode::kInvalidArgument,
                    "roll profile length does not match the trajectory");
      }
      const std::vector<double> roll_rate = Rate(roll, dt);
      const std::vector<double> pitch_rate = Rate(pitch, dt);
      const std::vector<double> yaw_rate = Rate(yaw, dt);
      std::vector<double> wx(n), wy(n), wz(n);
      for (size_t k = 0; k < n; ++k) {
        const Eigen::Vector3d body =
            EulerRateMatrix(roll[k], pitch[k])
                .inverse() *
            Eigen::Vector3d(roll_rate[k], pitch_rate[k], yaw_rate[k]);
        wx[k] = body[0];
        wy[k] = body[1];
        wz[k] = body[2];
      }
      out.commands = MakeProfile(model, dt, {speed, wx, wy, wz});
      set_states({&roll, &pitch, &yaw});
      break;
    }
  }
  return out;
}

RegularityReport CheckAdmissible(const RobotModel& model,
                                 const Trajectory& traj) {
  if (traj.dim() != model.base_dim()) {
    throw Error(ErrorCode::kInvalidArgument,
                "trajectory dimension does not match the robot model");
  }
  RegularityOptions options;
  options.check_heading = model.robot_class() == RobotClass::kClassII;
  return CheckRegularity(traj, options);
}

Type21Vars UnicycleToCanonical(const UnicycleVars& u) {
  return Type21Vars{.theta = 0.0,
                    .beta = u.theta - kHalfPi,
                    .eta1 = u.v,
                    .eta2 = 0.0,
                    .zeta = u.omega};
}

UnicycleVars CanonicalToUnicycle(const Type21Vars& c) {
  return UnicycleVars{.theta = c.theta + c.beta + kHalfPi,
                      .v = c.eta1,
                      .omega = c.eta2 + c.zeta};
}

Type11Vars CarToCanonical(const CarVars& car, double wheelbase) {
  return Type11Vars{.theta = car.theta - kHalfPi,
                    .beta = kHalfPi - car.beta,
                    .eta1 = car.v / (wheelbase * std::cos(car.beta)),
                    .zeta = -car.zeta};
}

CarVars CanonicalToCar(const Type11Vars& c, double wheelbase) {
  const double beta = kHalfPi - c.beta;
  return CarVars{.theta = c.theta + kHalfPi,
                 .beta = beta,
                 .v = c.eta1 * wheelbase * std::cos(beta),
                 .zeta = -c.zeta};
}

void WriteStatesCsv(std::ostream& out, const RobotModel& model, double dt,
                    const std::vector<FullState>& states) {
  out << 't';
  for (const std::string& name : model.state_names()) out << ',' << name;
  out << '\n';
  for (size_t k = 0; k < states.size(); ++k) {
    out << FormatNumber(dt * k);
    for (double v : states[k].values) out << ',' << FormatNumber(v);
    out << '\n';
  }
}

}  // namespace affdeform
