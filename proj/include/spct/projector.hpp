#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "spct/geometry.hpp"

namespace spct {

struct PathElement {
    int pixel; // row-major index, iy * width + ix
    double length; // mm
};

namespace detail {

// Incremental Siddon traversal of the segment source->target through the
// pixel grid. Calls visit(ix, iy, length) for every pixel with positive
// intersection length, in order along the ray.
template <typename Visit>
void trace_segment(const GridSpec& grid, const Eigen::Vector2d& s, const Eigen::Vector2d& t, Visit&& visit)
{
    const double px = grid.pixel_size;
    const double x0 = -0.5 * grid.width * px;
    const double y0 = -0.5 * grid.height * px;
    const double x1 = -x0;
    const double y1 = -y0;
    const Eigen::Vector2d d = t - s;
    const double len = d.norm();

    double a_min = 0.0;
    double a_max = 1.0;
    const auto clip = [&](double start, double delta, double lo, double hi) {
        if (delta == 0.0)
            return start > lo && start < hi;
        double a = (lo - start) / delta;
        double b = (hi - start) / delta;
        if (a > b)
            std::swap(a, b);
        a_min = std::max(a_min, a);
        a_max = std::min(a_max, b);
        return true;
    };
    if (!clip(s.x(), d.x(), x0, x1) || !clip(s.y(), d.y(), y0, y1) || !(a_max > a_min))
        return;

    const double a_mid = 0.5 * (a_min + a_max);
    // Starting cell: the one containing the entry point, nudged inward.
    const double ex = s.x() + (a_min + 1e-9 * (a_mid - a_min)) * d.x();
    const double ey = s.y() + (a_min + 1e-9 * (a_mid - a_min)) * d.y();
    int ix = std::clamp(static_cast<int>(std::floor((ex - x0) / px)), 0, grid.width - 1);
    int iy = std::clamp(static_cast<int>(std::floor((ey - y0) / px)), 0, grid.height - 1);

    constexpr double inf = std::numeric_limits<double>::infinity();
    const int step_x = d.x() > 0 ? 1 : -1;
    const int step_y = d.y() > 0 ? 1 : -1;
    const double da_x = d.x() != 0.0 ? px / std::abs(d.x()) : inf;
    const double da_y = d.y() != 0.0 ? px / std::abs(d.y()) : inf;
    double next_x = d.x() != 0.0 ? (x0 + (ix + (step_x > 0 ? 1 : 0)) * px - s.x()) / d.x() : inf;
    double next_y = d.y() != 0.0 ? (y0 + (iy + (step_y > 0 ? 1 : 0)) * px - s.y()) / d.y() : inf;

    double a = a_min;
    while (a < a_max) {
        const double a_next = std::min({ next_x, next_y, a_max });
        const double l = (a_next - a) * len;
        if (l > 0.0)
            visit(ix, iy, l);
        a = a_next;
        if (a >= a_max)
            break;
        if (next_x <= next_y) {
            ix += step_x;
            next_x += da_x;
        } else {
            iy += step_y;
            next_y += da_y;
        }
        if (ix < 0 || ix >= grid.width || iy < 0 || iy >= grid.height)
            break;
    }
}

} // namespace detail

template <typename Visit>
void trace_ray(const FanBeamGeometry& geom, int view, int det, Visit&& visit)
{
    const Ray r = geom.ray(view, det);
    detail::trace_segment(geom.grid(), r.source, r.target, std::forward<Visit>(visit));
}

// Pixels crossed by one ray with their intersection lengths (mm).
std::vector<PathElement> ray_path(const FanBeamGeometry& geom, int view, int det);

// Line integrals of a single-bin image, views x detectors.
Image forward_project(const Image& img, const FanBeamGeometry& geom);
// Exact transpose of forward_project.
Image back_project(const Image& sino, const FanBeamGeometry& geom);

// Per-bin wrappers.
Sinogram forward_project(const SpectralImage& img, const FanBeamGeometry& geom);
SpectralImage back_project(const Sinogram& sino, const FanBeamGeometry& geom);

} // namespace spct
