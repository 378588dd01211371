#include "spct/materials.hpp"

#include <algorithm>

namespace spct {

const MaterialComponent& MaterialMaps::find(const std::string& material) const
{
    for (const auto& c : components)
        if (c.table.material() == material)
            return c;
    throw ValidationError("material maps: no component named '" + material + "'");
}

double hu_to_mu(double hu, double mu_water) { return std::max(0.0, mu_water * (hu / 1000.0 + 1.0)); }

double mu_to_hu(double mu, double mu_water) { return 1000.0 * (mu / mu_water - 1.0); }

MuImage hu_to_mu(const CtImage& img, double mu_water)
{
    if (!(mu_water > 0.0))
        throw ValidationError("hu_to_mu: mu_water must be positive");
    if (!img.hu.isFinite().all())
        throw ValidationError("hu_to_mu: CT image contains non-finite values");
    MuImage out { img.grid, (mu_water * (img.hu / 1000.0 + 1.0)).max(0.0) };
    return out;
}

namespace {

Image ramp_weight(const Image& test, const Image& numerator, double t_soft, double t_bone,
                  double num_soft, double num_bone)
{
    Image w(test.rows(), test.cols());
    for (Eigen::Index i = 0; i < test.size(); ++i) {
        const double y = test(i);
        if (y > t_bone)
            w(i) = 1.0;
        else if (y < t_soft)
            w(i) = 0.0;
        else
            w(i) = (numerator(i) - num_soft) / (num_bone - num_soft);
    }
    return w;
}

} // namespace

Image bone_weight(const MuImage& img, double t_soft, double t_bone)
{
    if (!(t_soft < t_bone))
        throw ValidationError("bone_weight: soft threshold must be below bone threshold");
    return ramp_weight(img.mu, img.mu, t_soft, t_bone, t_soft, t_bone);
}

Image bone_weight(const MuImage& img, const CtImage& ct, double t_soft, double t_bone, WeightNumerator numerator,
                  double mu_water)
{
    if (numerator == WeightNumerator::attenuation)
        return bone_weight(img, t_soft, t_bone);
    if (!(t_soft < t_bone))
        throw ValidationError("bone_weight: soft threshold must be below bone threshold");
    check_same_grid(img.grid, ct.grid, "bone_weight");
    return ramp_weight(img.mu, ct.hu, t_soft, t_bone, mu_to_hu(t_soft, mu_water), mu_to_hu(t_bone, mu_water));
}

MaterialMaps split_materials(const MuImage& img, const Image& w, const AttenuationTable& bone,
                             const AttenuationTable& soft, const SplitParams& params)
{
    if (w.rows() != img.mu.rows() || w.cols() != img.mu.cols())
        throw DimensionError("split_materials: weight image does not match attenuation image");
    if ((w < 0.0).any() || (w > 1.0).any())
        throw ValidationError("split_materials: weights must lie in [0, 1]");
    if (!(params.density_bone > 0.0) || !(params.density_soft > 0.0))
        throw ValidationError("split_materials: nominal densities must be positive");

    // Nominal linear attenuation (1/mm) of each material at the reference energy.
    const double mu_bone = mass_attenuation(bone, params.reference_kev) * params.density_bone / 10.0;
    const double mu_soft = mass_attenuation(soft, params.reference_kev) * params.density_soft / 10.0;

    MaterialMaps maps;
    maps.grid = img.grid;
    maps.components.push_back({ bone, w * (img.mu / mu_bone) * params.density_bone });
    maps.components.push_back({ soft, (1.0 - w) * (img.mu / mu_soft) * params.density_soft });
    return maps;
}

double water_mu_per_mm(double e_kev) { return mass_attenuation(bundled_attenuation("water"), e_kev) / 10.0; }

MaterialMaps segment_ct(const CtImage& ct, const SegmentationParams& params)
{
    const double mu_water = params.mu_water > 0.0 ? params.mu_water : water_mu_per_mm(params.split.reference_kev);
    const MuImage mu = hu_to_mu(ct, mu_water);
    Image w;
    if (params.numerator == WeightNumerator::attenuation)
        w = bone_weight(mu, hu_to_mu(params.t_soft_hu, mu_water), hu_to_mu(params.t_bone_hu, mu_water));
    else
        w = bone_weight(mu, ct, hu_to_mu(params.t_soft_hu, mu_water), hu_to_mu(params.t_bone_hu, mu_water),
                        WeightNumerator::ct_value, mu_water);
    return split_materials(mu, w, bundled_attenuation("bone"), bundled_attenuation("soft_tissue"), params.split);
}

} // namespace spct
