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

#include "affdeform/svg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace affdeform {

namespace {

constexpr std::string_view kStageColors[] = {"red", "blue", "green", "magenta"};

std::string Px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string_view StageColor(int stage) {
  return kStageColors[static_cast<size_t>(std::max(stage, 0)) % 4];
}

void SvgPlot::AddPath(const std::vector<Vec3>& points, std::string_view color,
                      double width, bool dashed) {
  items_.push_back({Item::kPath, points, width, std::string(color), dashed});
}

void SvgPlot::AddDisc(const Vec3& center, double radius,
                      std::string_view color) {
  items_.push_back({Item::kDisc, {center}, radius, std::string(color), false});
}

void SvgPlot::AddRect(const Vec3& min, const Vec3& max,
                      std::string_view color) {
  items_.push_back({Item::kRect, {min, max}, 0.0, std::string(color), false});
}

void SvgPlot::AddDot(const Vec3& p, std::string_view color, double radius_px) {
  items_.push_back({Item::kDot, {p}, radius_px, std::string(color), false});
}

void SvgPlot::AddStar(const Vec3& p, std::string_view color) {
  items_.push_back({Item::kStar, {p}, 7.0, std::string(color), false});
}

void SvgPlot::AddArrow(const Vec3& p, double heading, double length,
                       std::string_view color) {
  const Vec3 tip = p + length * Vec3(std::cos(heading), std::sin(heading), 0.0);
  const double back = 0.3 * length;
  const Vec3 left =
      tip - back * Vec3(std::cos(heading - 0.4), std::sin(heading - 0.4), 0.0);
  const Vec3 right =
      tip - back * Vec3(std::cos(heading + 0.4), std::sin(heading + 0.4), 0.0);
  AddPath({p, tip}, color, 1.5);
  AddPath({left, tip, right}, color, 1.5);
}

void SvgPlot::AddLegend(std::string_view label, std::string_view color) {
  legend_.emplace_back(std::string(label), std::string(color));
}

std::string SvgPlot::Render(int width_px, int height_px) const {
  double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
  double hi_x = -lo_x, hi_y = -lo_x;
  auto grow = [&](const Vec3& p, double r) {
    lo_x = std::min(lo_x, p.x() - r);
    hi_x = std::max(hi_x, p.x() + r);
    lo_y = std::min(lo_y, p.y() - r);
    hi_y = std::max(hi_y, p.y() + r);
  };
  for (const Item& item : items_) {
    const double r = item.kind == Item::kDisc ? item.size : 0.0;
    for (const Vec3& p : item.points) grow(p, r);
  }
  if (!(hi_x >= lo_x)) {
    lo_x = lo_y = -1.0;
    hi_x = hi_y = 1.0;
  }
  const double margin = 30.0;
  const double span_x = std::max(hi_x - lo_x, 1e-9);
  const double span_y = std::max(hi_y - lo_y, 1e-9);
  const double scale = std::min((width_px - 2 * margin) / span_x,
                                (height_px - 2 * margin) / span_y);
  auto sx = [&](double x) { return margin + (x - lo_x) * scale; };
  auto sy = [&](double y) { return height_px - margin - (y - lo_y) * scale; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_px
      << "\" height=\"" << height_px << "\" viewBox=\"0 0 " << width_px << ' '
      << height_px << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title_.empty()) {
    out << "<text x=\"" << Px(margin) << "\" y=\"18\" font-family=\"sans-serif\" "
        << "font-size=\"14\">" << Escape(title_) << "</text>\n";
  }
  for (const Item& item : items_) {
    switch (item.kind) {
      case Item::kPath: {
        if (item.points.empty()) break;
        out << "<polyline fill=\"none\" stroke=\"" << item.color
            << "\" stroke-width=\"" << Px(item.size) << '"';
        if (item.dashed) out << " stroke-dasharray=\"6,4\"";
        out << " points=\"";
        // Thin very dense paths to about one vertex per pixel.
        size_t step = std::max<size_t>(1, item.points.size() / 4000);
        for (size_t i = 0; i < item.points.size(); i += step) {
          out << Px(sx(item.points[i].x())) << ',' << Px(sy(item.points[i].y()))
              << ' ';
        }
        const Vec3& last = item.points.back();
        out << Px(sx(last.x())) << ',' << Px(sy(last.y())) << "\"/>\n";
        break;
      }
      case Item::kDisc:
        out << "<circle cx=\"" << Px(sx(item.points[0].x())) << "\" cy=\""
            << Px(sy(item.points[0].y())) << "\" r=\"" << Px(item.size * scale)
            << "\" fill=\"" << item.color << "\" fill-opacity=\"0.6\"/>\n";
        break;
      case Item::kRect: {
        const Vec3& a = item.points[0];
        const Vec3& b = item.points[1];
        out << "<rect x=\"" << Px(sx(a.x())) << "\" y=\"" << Px(sy(b.y()))
            << "\" width=\"" << Px((b.x() - a.x()) * scale) << "\" height=\""
            << Px((b.y() - a.y()) * scale) << "\" fill=\"" << item.color
            << "\" fill-opacity=\"0.6\"/>\n";
        break;
      }
      case Item::kDot:
        out << "<circle cx=\"" << Px(sx(item.points[0].x())) << "\" cy=\""
            << Px(sy(item.points[0].y())) << "\" r=\"" << Px(item.size)
            << "\" fill=\"" << item.color << "\"/>\n";
        break;
      case Item::kStar: {
        const double cx = sx(item.points[0].x()), cy = sy(item.points[0].y());
        out << "<polygon fill=\"" << item.color << "\" points=\"";
        for (int i = 0; i < 10; ++i) {
          const double r = i % 2 == 0 ? item.size : 0.45 * item.size;
          const double a = std::numbers::pi * (0.5 + 0.2 * i);
          out << Px(cx + r * std::cos(a)) << ',' << Px(cy - r * std::sin(a))
              << ' ';
        }
        out << "\"/>\n";
        break;
      }
    }
  }
  double ly = 40.0;
  for (const auto& [label, color] : legend_) {
    out << "<line x1=\"" << Px(width_px - 170.0) << "\" y1=\"" << Px(ly)
        << "\" x2=\"" << Px(width_px - 145.0) << "\" y2=\"" << Px(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n";
    out << "<text x=\"" << Px(width_px - 138.0) << "\" y=\"" << Px(ly + 4.0)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << Escape(label)
        << "</text>\n";
    ly += 18.0;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace affdeform
