// SPDX-License-Identifier: Apache-2.0
#include "nextcell/geometry.hpp"

#include <cassert>

namespace nextcell {

double polyline_length(const std::vector<Vec2>& pts) {
    double len = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) len += distance(pts[i - 1], pts[i]);
    return len;
}

Vec2 polyline_point_at(const std::vector<Vec2>& pts, double s) {
    assert(!pts.empty());
    if (s <= 0.0) return pts.front();
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double seg = distance(pts[i - 1], pts[i]);
        if (s <= seg) {
            const double t = seg > 0.0 ? s / seg : 0.0;
            return pts[i - 1] + t * (pts[i] - pts[i - 1]);
        }
        s -= seg;
    }
    return pts.back();
}

std::vector<Vec2> polyline_sample(const std::vector<Vec2>& pts, double step) {
    const double len = polyline_length(pts);
    std::vector<Vec2> out;
    const auto n_full = static_cast<std::size_t>(std::floor(len / step + 1e-12));
    out.reserve(n_full + 2);
    for (std::size_t k = 0; k <= n_full; ++k) out.push_back(polyline_point_at(pts, static_cast<double>(k) * step));
    if (len - static_cast<double>(n_full) * step > 1e-9 * step) out.push_back(pts.back());
    return out;
}

} // namespace nextcell
