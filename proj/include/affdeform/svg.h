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

// Minimal SVG plotting of planar paths in world coordinates.

#ifndef AFFDEFORM_SVG_H_
#define AFFDEFORM_SVG_H_

#include <string>
#include <string_view>
#include <vector>

#include "affdeform/trajectory.h"

namespace affdeform {

// Stage i of a correction is drawn with StageColor(i): red for the original,
// then blue, green and magenta, cycling.
std::string_view StageColor(int stage);

class SvgPlot {
 public:
  explicit SvgPlot(std::string title = "") : title_(std::move(title)) {}

  void AddPath(const std::vector<Vec3>& points, std::string_view color,
               double width = 1.5, bool dashed = false);
  void AddPath(const Trajectory& traj, std::string_view color,
               double width = 1.5, bool dashed = false) {
    AddPath(traj.points(), color, width, dashed);
  }
  void AddDisc(const Vec3& center, double radius, std::string_view color);
  void AddRect(const Vec3& min, const Vec3& max, std::string_view color);
  void AddDot(const Vec3& p, std::string_view color, double radius_px = 4.0);
  void AddStar(const Vec3& p, std::string_view color);
  // Short arrow of `length` world units at `p` along `heading`.
  void AddArrow(const Vec3& p, double heading, double length,
                std::string_view color);
  void AddLegend(std::string_view label, std::string_view color);

  // Equal axis scaling; the y axis points up.
  std::string Render(int width_px = 800, int height_px = 600) const;

 private:
  struct Item {
    enum Kind { kPath, kDisc, kRect, kDot, kStar } kind;
    std::vector<Vec3> points;
    double size = 0.0;
    std::string color;
    bool dashed = false;
  };
  std::string title_;
  std::vector<Item> items_;
  std::vector<std::pair<std::string, std::string>> legend_;
};

}  // namespace affdeform

#endif  // AFFDEFORM_SVG_H_
