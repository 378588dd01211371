#include "spct/phantom.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "spct/decompose.hpp"

namespace spct {

namespace {

template <typename Inside>
void paint(Image& img, const GridSpec& grid, double value, Inside&& inside)
{
    for (int iy = 0; iy < grid.height; ++iy)
        for (int ix = 0; ix < grid.width; ++ix) {
            const double x = (ix + 0.5 - 0.5 * grid.width) * grid.pixel_size;
            const double y = (iy + 0.5 - 0.5 * grid.height) * grid.pixel_size;
            if (inside(x, y))
                img(iy, ix) = value;
        }
}

std::string vial_name(int index, const VialSpec& v)
{
    std::ostringstream s;
    s << "vial" << index << '_' << v.agent;
    if (v.agent != "water")
        s << '_' << v.concentration;
    return s.str();
}

} // namespace

Image disk_image(const GridSpec& grid, double radius, double value, double cx, double cy, int supersample)
{
    if (supersample < 1)
        throw ValidationError("disk_image: supersample must be >= 1");
    Image img = Image::Zero(grid.height, grid.width);
    const int n = supersample;
    const double r2 = radius * radius;
    for (int iy = 0; iy < grid.height; ++iy)
        for (int ix = 0; ix < grid.width; ++ix) {
            int hits = 0;
            for (int sy = 0; sy < n; ++sy)
                for (int sx = 0; sx < n; ++sx) {
                    const double x = (ix + (sx + 0.5) / n - 0.5 * grid.width) * grid.pixel_size - cx;
                    const double y = (iy + (sy + 0.5) / n - 0.5 * grid.height) * grid.pixel_size - cy;
                    hits += x * x + y * y <= r2;
                }
            img(iy, ix) = value * hits / (n * n);
        }
    return img;
}

VialPhantom make_vial_phantom(const VialPhantomParams& p)
{
    if (p.vials.empty())
        throw ValidationError("vial phantom: no vials");
    if (p.ring_radius + p.vial_radius > p.body_radius)
        throw ValidationError("vial phantom: vials extend past the body");
    if (p.body_radius > 0.5 * std::min(p.grid.width, p.grid.height) * p.grid.pixel_size)
        throw ValidationError("vial phantom: body does not fit the grid");

    VialPhantom ph;
    ph.materials = { "water", "iodine", "gadolinium" };
    ph.concentrations = SpectralImage(p.grid, 3);
    ph.concentrations[0] = disk_image(p.grid, p.body_radius, 1.0);
    const int n = static_cast<int>(p.vials.size());
    for (int k = 0; k < n; ++k) {
        const auto& v = p.vials[k];
        const double a = 2.0 * std::numbers::pi * k / n;
        const double cx = p.ring_radius * std::cos(a), cy = p.ring_radius * std::sin(a);
        int plane = -1;
        if (v.agent == "iodine")
            plane = 1;
        else if (v.agent == "gadolinium")
            plane = 2;
        else if (v.agent != "water")
            throw ValidationError("vial phantom: unknown agent '" + v.agent + "'");
        if (plane > 0) {
            const Image vial = disk_image(p.grid, p.vial_radius, v.concentration, cx, cy);
            ph.concentrations[plane] = (vial > 0.0).select(vial, ph.concentrations[plane]);
        }
        const double px = p.grid.pixel_size;
        Roi roi;
        roi.name = vial_name(k, v);
        roi.shape = Roi::Shape::circle;
        roi.params = { cx / px + 0.5 * p.grid.width, cy / px + 0.5 * p.grid.height,
                       p.roi_fraction * p.vial_radius / px };
        ph.rois.push_back(std::move(roi));
    }
    return ph;
}

MaterialMaps concentration_to_maps(const std::vector<std::string>& materials, const SpectralImage& conc)
{
    if (static_cast<int>(materials.size()) != conc.num_bins())
        throw DimensionError("concentration maps: " + std::to_string(conc.num_bins()) + " planes for "
                             + std::to_string(materials.size()) + " materials");
    MaterialMaps maps { conc.grid, {} };
    for (std::size_t k = 0; k < materials.size(); ++k)
        maps.components.push_back({ bundled_attenuation(materials[k]), conc[k] * concentration_unit(materials[k]) });
    return maps;
}

CtImage body_phantom(const GridSpec& grid)
{
    const double half = 0.5 * std::min(grid.width, grid.height) * grid.pixel_size;
    const double a = 0.85 * half, b = 0.65 * half;
    const auto ellipse = [](double cx, double cy, double rx, double ry) {
        return [=](double x, double y) {
            const double u = (x - cx) / rx, v = (y - cy) / ry;
            return u * u + v * v <= 1.0;
        };
    };
    Image hu = Image::Constant(grid.height, grid.width, -1000.0);
    paint(hu, grid, 1000.0, ellipse(0, 0, a, b));
    paint(hu, grid, 40.0, ellipse(0, 0, 0.93 * a, 0.9 * b));
    paint(hu, grid, -800.0, ellipse(-0.45 * a, 0.05 * b, 0.3 * a, 0.5 * b));
    paint(hu, grid, -800.0, ellipse(0.45 * a, 0.05 * b, 0.3 * a, 0.5 * b));
    paint(hu, grid, 700.0, ellipse(0, 0.6 * b, 0.12 * a, 0.16 * b));
    paint(hu, grid, 60.0, ellipse(0, -0.2 * b, 0.12 * a, 0.15 * b));
    paint(hu, grid, -100.0, ellipse(0.1 * a, -0.6 * b, 0.08 * a, 0.08 * b));
    return { grid, hu };
}

} // namespace spct
