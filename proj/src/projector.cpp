#include "spct/projector.hpp"

#include <algorithm>
#include <cmath>

namespace spct {

FanBeamGeometry::FanBeamGeometry(const Params& p)
    : p_(p)
{
    if (!(p_.sod > 0.0) || !(p_.sdd > p_.sod))
        throw ValidationError("geometry: require 0 < sod < sdd");
    if (!(p_.detector_pitch > 0.0))
        throw ValidationError("geometry: detector pitch must be positive");
    if (p_.n_views < 1)
        throw ValidationError("geometry: need at least one view");
    if (!(p_.angular_range > 0.0))
        throw ValidationError("geometry: angular range must be positive");
    if (p_.grid.width < 1 || p_.grid.height < 1 || !(p_.grid.pixel_size > 0.0))
        throw ValidationError("geometry: invalid image grid");
    if (p_.n_detectors == 0)
        p_.n_detectors = minimal_detectors(p_.grid, p_.sdd, p_.sod, p_.detector_pitch);
    if (p_.n_detectors < 1)
        throw ValidationError("geometry: need at least one detector");

    const double r = image_radius();
    if (!(r < p_.sod))
        throw ValidationError("geometry: image circle reaches the source");
    const double half_fan = std::atan(0.5 * p_.n_detectors * p_.detector_pitch / p_.sdd);
    if (p_.sod * std::sin(half_fan) < r * (1.0 - 1e-12))
        throw ValidationError("geometry: detector too narrow, image circle of radius " + std::to_string(r)
                              + " mm is not inside the fan");
}

double FanBeamGeometry::image_radius() const
{
    return 0.5 * std::min(p_.grid.width, p_.grid.height) * p_.grid.pixel_size;
}

int FanBeamGeometry::minimal_detectors(const GridSpec& grid, double sdd, double sod, double pitch)
{
    const double r = 0.5 * std::min(grid.width, grid.height) * grid.pixel_size;
    if (!(r < sod))
        throw ValidationError("geometry: image circle reaches the source");
    const double half_width = sdd * std::tan(std::asin(r / sod));
    int n = static_cast<int>(std::ceil(2.0 * half_width / pitch - 1e-9));
    if (n % 2)
        ++n;
    return std::max(n, 2);
}

Ray FanBeamGeometry::ray(int view, int det) const
{
    const double beta = view_angle(view);
    const Eigen::Vector2d dir(std::cos(beta), std::sin(beta));
    const Eigen::Vector2d u(-dir.y(), dir.x());
    return { p_.sod * dir, -(p_.sdd - p_.sod) * dir + detector_offset(det) * u };
}

bool FanBeamGeometry::operator==(const FanBeamGeometry& o) const
{
    return p_.sdd == o.p_.sdd && p_.sod == o.p_.sod && p_.n_detectors == o.p_.n_detectors
        && p_.detector_pitch == o.p_.detector_pitch && p_.n_views == o.p_.n_views
        && p_.angular_range == o.p_.angular_range && p_.grid == o.p_.grid;
}

std::vector<PathElement> ray_path(const FanBeamGeometry& geom, int view, int det)
{
    if (view < 0 || view >= geom.n_views() || det < 0 || det >= geom.n_detectors())
        throw OutOfRangeError("ray_path: view/detector index out of range");
    std::vector<PathElement> out;
    const int w = geom.grid().width;
    trace_ray(geom, view, det, [&](int ix, int iy, double l) { out.push_back({ iy * w + ix, l }); });
    return out;
}

Image forward_project(const Image& img, const FanBeamGeometry& geom)
{
    const auto& g = geom.grid();
    if (img.rows() != g.height || img.cols() != g.width)
        throw DimensionError("forward_project: image does not match geometry grid");
    Image sino(geom.n_views(), geom.n_detectors());
    for (int v = 0; v < geom.n_views(); ++v)
        for (int d = 0; d < geom.n_detectors(); ++d) {
            double acc = 0.0;
            trace_ray(geom, v, d, [&](int ix, int iy, double l) { acc += img(iy, ix) * l; });
            sino(v, d) = acc;
        }
    return sino;
}

Image back_project(const Image& sino, const FanBeamGeometry& geom)
{
    if (sino.rows() != geom.n_views() || sino.cols() != geom.n_detectors())
        throw DimensionError("back_project: sinogram does not match geometry");
    const auto& g = geom.grid();
    Image img = Image::Zero(g.height, g.width);
    for (int v = 0; v < geom.n_views(); ++v)
        for (int d = 0; d < geom.n_detectors(); ++d) {
            const double y = sino(v, d);
            if (y == 0.0)
                continue;
            trace_ray(geom, v, d, [&](int ix, int iy, double l) { img(iy, ix) += y * l; });
        }
    return img;
}

Sinogram forward_project(const SpectralImage& img, const FanBeamGeometry& geom)
{
    Sinogram out(geom.n_views(), geom.n_detectors(), 0, Stage::line_integral);
    for (const auto& b : img.bins)
        out.bins.push_back(forward_project(b, geom));
    return out;
}

SpectralImage back_project(const Sinogram& sino, const FanBeamGeometry& geom)
{
    SpectralImage out;
    out.grid = geom.grid();
    for (const auto& b : sino.bins)
        out.bins.push_back(back_project(b, geom));
    return out;
}

} // namespace spct
