#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "gymkit/render.hpp"

// Minimal software rasterizer for the built-in environments' rgb_array frames.
namespace gymkit::raster {

using Color = std::array<std::uint8_t, 3>;
using Point = std::pair<double, double>;  // (x, y) in pixel coordinates, y down

inline void put(Frame& frame, std::int64_t row, std::int64_t col, const Color& c) {
  if (row < 0 || col < 0 || row >= frame.height || col >= frame.width) return;
  std::copy(c.begin(), c.end(), frame.pixel(row, col));
}

inline void fill_rect(Frame& frame, std::int64_t x0, std::int64_t y0, std::int64_t x1, std::int64_t y1, const Color& c) {
  for (auto y = std::max<std::int64_t>(y0, 0); y < std::min(y1, frame.height); ++y)
    for (auto x = std::max<std::int64_t>(x0, 0); x < std::min(x1, frame.width); ++x) put(frame, y, x, c);
}

/// Convex polygon, vertices in either winding order. Pixel centers are sampled.
inline void fill_convex(Frame& frame, std::span<const Point> poly, const Color& c) {
  if (poly.size() < 3) return;
  double min_x = poly[0].first, max_x = min_x, min_y = poly[0].second, max_y = min_y;
  for (const auto& [x, y] : poly) {
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
  }
  for (auto row = static_cast<std::int64_t>(std::floor(min_y)); row <= static_cast<std::int64_t>(std::ceil(max_y)); ++row) {
    for (auto col = static_cast<std::int64_t>(std::floor(min_x)); col <= static_cast<std::int64_t>(std::ceil(max_x)); ++col) {
      const double px = static_cast<double>(col) + 0.5;
      const double py = static_cast<double>(row) + 0.5;
      bool pos = false;
      bool neg = false;
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& [ax, ay] = poly[i];
        const auto& [bx, by] = poly[(i + 1) % poly.size()];
        const double cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
        pos = pos || cross > 0;
        neg = neg || cross < 0;
      }
      if (!(pos && neg)) put(frame, row, col, c);
    }
  }
}

inline void fill_circle(Frame& frame, double cx, double cy, double radius, const Color& c) {
  for (auto row = static_cast<std::int64_t>(cy - radius); row <= static_cast<std::int64_t>(cy + radius) + 1; ++row)
    for (auto col = static_cast<std::int64_t>(cx - radius); col <= static_cast<std::int64_t>(cx + radius) + 1; ++col) {
      const double dx = static_cast<double>(col) + 0.5 - cx;
      const double dy = static_cast<double>(row) + 0.5 - cy;
      if (dx * dx + dy * dy <= radius * radius) put(frame, row, col, c);
    }
}

/// Rectangle given in a local frame (l, r, b, t), rotated by angle about the
/// local origin and placed at origin (pixel coordinates, y up in local frame).
inline std::vector<Point> rotated_rect(double l, double r, double b, double t, double angle, Point origin) {
  std::vector<Point> out;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  for (const auto& [x, y] : {Point{l, b}, Point{l, t}, Point{r, t}, Point{r, b}}) {
    const double rx = x * c - y * s;
    const double ry = x * s + y * c;
    out.emplace_back(origin.first + rx, origin.second - ry);
  }
  return out;
}

}  // namespace gymkit::raster
