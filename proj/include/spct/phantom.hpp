#pragma once

#include <string>
#include <vector>

#include "spct/image.hpp"
#include "spct/materials.hpp"
#include "spct/roi.hpp"

namespace spct {

// value inside the circle of the given radius (mm) centered at (cx, cy) mm,
// zero elsewhere. Each pixel averages supersample x supersample point
// samples; 1 decides at pixel centers.
Image disk_image(const GridSpec& grid, double radius, double value, double cx = 0.0, double cy = 0.0,
                 int supersample = 1);

struct VialSpec {
    std::string agent; // "iodine", "gadolinium" or "water"
    double concentration; // mg/ml for contrast agents, 0 for water vials
};

struct VialPhantomParams {
    GridSpec grid { 256, 256, 0.3 };
    double body_radius = 32.0; // mm, water
    double ring_radius = 21.0; // mm
    double vial_radius = 3.6;  // mm
    double roi_fraction = 0.7; // ROI radius relative to the vial
    std::vector<VialSpec> vials = {
        { "iodine", 8.0 }, { "iodine", 4.0 }, { "iodine", 2.0 }, { "iodine", 1.0 }, { "iodine", 0.5 },
        { "iodine", 0.25 }, { "water", 0.0 }, { "gadolinium", 8.0 }, { "gadolinium", 4.0 },
        { "gadolinium", 2.0 }, { "gadolinium", 1.0 }, { "gadolinium", 0.5 }, { "gadolinium", 0.25 },
        { "water", 0.0 },
    };
};

// Water cylinder with contrast vials. Concentration planes are ordered
// water (g/ml), iodine (mg/ml), gadolinium (mg/ml).
struct VialPhantom {
    std::vector<std::string> materials;
    SpectralImage concentrations;
    std::vector<Roi> rois; // one per vial, named after agent and concentration
};

VialPhantom make_vial_phantom(const VialPhantomParams& params = {});

// Density maps (g/cm^3) for concentration planes, with bundled tables.
MaterialMaps concentration_to_maps(const std::vector<std::string>& materials, const SpectralImage& conc);

// Elliptical soft-tissue body with a bone ring, spine and lung-like holes, in HU.
CtImage body_phantom(const GridSpec& grid);

} // namespace spct
