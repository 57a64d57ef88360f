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

#include "affdeform/fixtures.h"

#include <cmath>
#include <functional>
#include <numbers>

#include "affdeform/error.h"

namespace affdeform {

namespace {

using Curve = std::function<Vec3(double)>;

struct Generator {
  FixtureInfo info;
  std::function<Curve(const FixtureParams&)> make;
};

double Get(const FixtureParams& p, std::string_view key) {
  return p.find(key)->second;
}

const std::vector<Generator>& Registry() {
  static const std::vector<Generator>* registry = new std::vector<Generator>{
      {{"line", 2, "straight line along +x", {{"speed", 1.0}, {"T", 2.0}}},
       [](const FixtureParams& p) -> Curve {
         const double s = Get(p, "speed");
         return [s](double t) { return Vec3(s * t, 0.0, 0.0); };
       }},
      {{"circle",
        2,
        "counter-clockwise arc from the origin heading +x",
        {{"r", 1.0}, {"speed", 1.0}, {"T", std::numbers::pi}}},
       [](const FixtureParams& p) -> Curve {
         const double r = Get(p, "r");
         const double w = Get(p, "speed") / r;
         return [r, w](double t) {
           return Vec3(r * std::sin(w * t), r - r * std::cos(w * t), 0.0);
         };
       }},
      {{"scurve",
        2,
        "one period of a sine wave: x = L t / T, y = A sin(2 pi t / T)",
        {{"length", 4.0}, {"amplitude", 0.5}, {"T", 4.0}}},
       [](const FixtureParams& p) -> Curve {
         const double l = Get(p, "length"), a = Get(p, "amplitude");
         const double period = Get(p, "T");
         return [l, a, period](double t) {
           return Vec3(l * t / period,
                       a * std::sin(2.0 * std::numbers::pi * t / period), 0.0);
         };
       }},
      {{"helix",
        3,
        "(r cos t, r sin t, c t)",
        {{"r", 1.0}, {"c", 1.0}, {"T", 2.0 * std::numbers::pi}}},
       [](const FixtureParams& p) -> Curve {
         const double r = Get(p, "r"), c = Get(p, "c");
         return [r, c](double t) {
           return Vec3(r * std::cos(t), r * std::sin(t), c * t);
         };
       }},
      {{"curvature_step",
        2,
        "straight segment followed by a tangent left-turning arc",
        {{"speed", 1.0}, {"t_line", 1.0}, {"radius", 1.0}, {"T", 2.0}}},
       [](const FixtureParams& p) -> Curve {
         const double s = Get(p, "speed"), t1 = Get(p, "t_line");
         const double r = Get(p, "radius");
         return [s, t1, r](double t) {
           if (t <= t1) return Vec3(s * t, 0.0, 0.0);
           const double phi = s * (t - t1) / r;
           return Vec3(s * t1 + r * std::sin(phi), r - r * std::cos(phi), 0.0);
         };
       }},
      {{"corner",
        2,
        "two straight segments meeting at a right angle at t = T / 2",
        {{"speed", 1.0}, {"T", 2.0}}},
       [](const FixtureParams& p) -> Curve {
         const double s = Get(p, "speed"), half = 0.5 * Get(p, "T");
         return [s, half](double t) {
           if (t <= half) return Vec3(s * t, 0.0, 0.0);
           return Vec3(s * half, s * (t - half), 0.0);
         };
       }},
      {{"curved_seed",
        2,
        "elliptic arc x = a sin(w t), y = b (1 - cos(w t))",
        {{"a", 30.0}, {"b", 20.0}, {"w", 0.1}, {"T", 12.0}}},
       [](const FixtureParams& p) -> Curve {
         const double a = Get(p, "a"), b = Get(p, "b"), w = Get(p, "w");
         return [a, b, w](double t) {
           return Vec3(a * std::sin(w * t), b * (1.0 - std::cos(w * t)), 0.0);
         };
       }},
  };
  return *registry;
}

}  // namespace

std::vector<FixtureInfo> ListFixtures() {
  std::vector<FixtureInfo> out;
  for (const Generator& g : Registry()) out.push_back(g.info);
  return out;
}

Trajectory GenerateBuiltin(std::string_view name, const FixtureParams& params,
                           double dt) {
  for (const Generator& g : Registry()) {
    if (g.info.name != name) continue;
    FixtureParams merged = g.info.defaults;
    for (const auto& [key, value] : params) {
      if (!g.info.defaults.contains(key)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "fixture '" + g.info.name + "' has no parameter '" + key +
                        "'");
      }
      if (!std::isfinite(value)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "fixture parameter '" + key + "' is not finite");
      }
      merged[key] = value;
    }
    const double duration = merged.at("T");
    if (!(duration > 0.0) || !(dt > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "T and dt must be > 0");
    }
    const int segments = std::max(Trajectory::kMinSegments,
                                  static_cast<int>(std::lround(duration / dt)));
    const double step = duration / segments;
    const Curve curve = g.make(merged);
    std::vector<Vec3> points(segments + 1);
    for (int k = 0; k <= segments; ++k) {
      points[k] = curve(k == segments ? duration : k * step);
    }
    return Trajectory(g.info.dim, step, std::move(points));
  }
  throw Error(ErrorCode::kUnknownGenerator,
              "unknown fixture '" + std::string(name) + "'");
}

Trajectory Place(const Trajectory& traj, const Vec3& origin, double heading) {
  const Mat3 r =
      Eigen::AngleAxisd(traj.dim() == 2 ? heading : 0.0, Vec3::UnitZ())
          .toRotationMatrix();
  if (traj.dim() != 2 && heading != 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "heading placement is planar only");
  }
  std::vector<Vec3> points;
  points.reserve(traj.size());
  for (const Vec3& p : traj.points()) points.push_back(origin + r * p);
  return Trajectory(traj.dim(), traj.dt(), std::move(points), traj.min_speed());
}

std::pair<Trajectory, Trajectory> GapFillFixture(double dt) {
  const Trajectory first = GenerateBuiltin("circle", {{"r", 3.0}, {"T", 3.0}}, dt);
  // The first arc ends heading 1 rad; the second starts 2 m further along
  // its own heading, 0.3 rad to the left.
  const double h = 1.3;
  const Vec3 start = first.back() + 2.0 * Vec3(std::cos(h), std::sin(h), 0.0);
  return {first, Place(first, start, h)};
}

}  // namespace affdeform
