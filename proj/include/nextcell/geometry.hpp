// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace nextcell {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    bool contains(Vec2 p, double eps = 0.0) const {
        return p.x >= x0 - eps && p.x <= x1 + eps && p.y >= y0 - eps && p.y <= y1 + eps;
    }
    /// True when p lies on the rectangle's perimeter (within eps).
    bool on_boundary(Vec2 p, double eps = 1e-9) const {
        if (!contains(p, eps)) return false;
        return std::abs(p.x - x0) <= eps || std::abs(p.x - x1) <= eps ||
               std::abs(p.y - y0) <= eps || std::abs(p.y - y1) <= eps;
    }
};

/// Total arc length of a polyline.
double polyline_length(const std::vector<Vec2>& pts);

/// Point at arc length s along the polyline, clamped to [0, length].
Vec2 polyline_point_at(const std::vector<Vec2>& pts, double s);

/// Samples the polyline at arc lengths {0, step, 2*step, ...} and appends the
/// final vertex when the last full step falls short of it.
std::vector<Vec2> polyline_sample(const std::vector<Vec2>& pts, double step);

} // namespace nextcell
