#pragma once

#include <string>
#include <vector>

#include "spct/image.hpp"
#include "spct/spectrum.hpp"

namespace spct {

// One basis material: its attenuation table and a density map (g/cm^3).
struct MaterialComponent {
    AttenuationTable table;
    Image density;
};

// Per-material density maps on a shared grid. The two-material bone/soft
// split produces exactly two components; simulated phantoms may carry more
// (e.g. water plus contrast agents).
struct MaterialMaps {
    GridSpec grid;
    std::vector<MaterialComponent> components;

    const MaterialComponent& find(const std::string& material) const;
};

MuImage hu_to_mu(const CtImage& img, double mu_water);
double hu_to_mu(double hu, double mu_water);
double mu_to_hu(double mu, double mu_water);

// Which image feeds the numerator of the soft-threshold ramp. The branch
// tests always look at the attenuation image; the ct_value variant takes the
// ramp numerator from the raw CT values, with the thresholds mapped to HU
// through mu_water so both sides of the ratio share units.
enum class WeightNumerator { attenuation, ct_value };

Image bone_weight(const MuImage& img, double t_soft, double t_bone);
Image bone_weight(const MuImage& img, const CtImage& ct, double t_soft, double t_bone,
                  WeightNumerator numerator, double mu_water);

struct SplitParams {
    double density_bone = 1.92; // g/cm^3
    double density_soft = 1.00; // g/cm^3
    double reference_kev = 60.0;
};

// Splits the attenuation image into bone and soft-tissue density maps using
// weight w for bone and (1 - w) for soft tissue. Densities are scaled so the
// decomposed pixel reproduces its input attenuation at the reference energy.
MaterialMaps split_materials(const MuImage& img, const Image& w, const AttenuationTable& bone,
                             const AttenuationTable& soft, const SplitParams& params = {});

struct SegmentationParams {
    double mu_water = 0.0; // 1/mm; 0 selects the bundled water table at reference_kev
    double t_soft_hu = 100.0;
    double t_bone_hu = 400.0;
    WeightNumerator numerator = WeightNumerator::attenuation;
    SplitParams split;
};

// hu_to_mu + bone_weight + split_materials with bundled bone/soft tables.
MaterialMaps segment_ct(const CtImage& ct, const SegmentationParams& params = {});

double water_mu_per_mm(double e_kev);

} // namespace spct
