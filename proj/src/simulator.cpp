#include "spct/simulator.hpp"

#include <cmath>
#include <random>

#include "spct/projector.hpp"

namespace spct {

PolychromaticModel::PolychromaticModel(const SimConfig& cfg, const std::vector<AttenuationTable>& materials)
    : num_materials_(static_cast<int>(materials.size()))
    , flux_(cfg.bins.count(), 0.0)
{
    if (!(cfg.i0_per_ray > 0.0))
        throw ValidationError("simulation: i0_per_ray must be positive");
    if (!(cfg.energy_step > 0.0))
        throw ValidationError("simulation: energy_step must be positive");
    if (materials.empty())
        throw ValidationError("simulation: no materials");

    double total = 0.0;
    for (int m = 0; m < cfg.bins.count(); ++m) {
        const double lo = cfg.bins.lower(m);
        const double hi = cfg.bins.upper(m);
        const int n = std::max(1, static_cast<int>(std::lround((hi - lo) / cfg.energy_step)));
        const double h = (hi - lo) / n;
        for (int k = 0; k <= n; ++k) {
            const double e = (k == n) ? hi : lo + k * h;
            const double w = ((k == 0 || k == n) ? 0.5 : 1.0) * h * cfg.spectrum.intensity(e);
            if (w <= 0.0)
                continue;
            nodes_.push_back({ w, m });
            for (const auto& tab : materials)
                atten_.push_back(mass_attenuation(tab, e) / 10.0);
            flux_[m] += w;
            total += w;
        }
        if (!(flux_[m] > 0.0))
            throw ValidationError("simulation: bin [" + std::to_string(lo) + ", " + std::to_string(hi)
                                  + ") receives no photon flux");
    }
    const double scale = cfg.i0_per_ray / total;
    for (auto& node : nodes_)
        node.weight *= scale;
    for (auto& f : flux_)
        f *= scale;
}

void PolychromaticModel::counts(const double* paths, double* out) const
{
    std::fill(out, out + flux_.size(), 0.0);
    const double* a = atten_.data();
    for (const auto& node : nodes_) {
        double exponent = 0.0;
        for (int j = 0; j < num_materials_; ++j)
            exponent += a[j] * paths[j];
        a += num_materials_;
        out[node.bin] += node.weight * std::exp(-exponent);
    }
}

std::vector<double> PolychromaticModel::counts(const std::vector<double>& material_paths) const
{
    if (static_cast<int>(material_paths.size()) != num_materials_)
        throw DimensionError("counts: expected one path integral per material");
    std::vector<double> out(flux_.size());
    counts(material_paths.data(), out.data());
    return out;
}

Sinogram spectral_counts(const std::vector<Image>& material_paths, const PolychromaticModel& model)
{
    if (static_cast<int>(material_paths.size()) != model.num_materials())
        throw DimensionError("spectral_counts: expected one path plane per material");
    const auto views = static_cast<int>(material_paths.front().rows());
    const auto dets = static_cast<int>(material_paths.front().cols());
    Sinogram out(views, dets, model.num_bins(), Stage::counts);
    std::vector<double> paths(material_paths.size());
    std::vector<double> z(model.num_bins());
    for (int v = 0; v < views; ++v)
        for (int d = 0; d < dets; ++d) {
            for (std::size_t j = 0; j < paths.size(); ++j)
                paths[j] = material_paths[j](v, d);
            model.counts(paths.data(), z.data());
            for (int m = 0; m < model.num_bins(); ++m)
                out.bins[m](v, d) = z[m];
        }
    return out;
}

Sinogram spectral_counts(const MaterialMaps& maps, const FanBeamGeometry& geom, const SimConfig& cfg)
{
    check_same_grid(maps.grid, geom.grid(), "spectral_counts");
    std::vector<AttenuationTable> tables;
    std::vector<Image> paths;
    for (const auto& c : maps.components) {
        if ((c.density < 0.0).any())
            throw ValidationError("spectral_counts: negative density in '" + c.table.material() + "'");
        tables.push_back(c.table);
        paths.push_back(forward_project(c.density, geom));
    }
    return spectral_counts(paths, PolychromaticModel(cfg, tables));
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t bin, std::uint64_t view, std::uint64_t det)
{
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ bin);
    h = splitmix64(h ^ view);
    h = splitmix64(h ^ det);
    state_ = h;
}

CounterRng::result_type CounterRng::operator()()
{
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::int64_t poisson_sample(double mean, std::uint64_t seed, int bin, int view, int det)
{
    if (!(mean >= 0.0) || !std::isfinite(mean))
        throw ValidationError("add_poisson: mean must be finite and non-negative");
    if (mean == 0.0)
        return 0;
    CounterRng rng(seed, static_cast<std::uint64_t>(bin), static_cast<std::uint64_t>(view),
                   static_cast<std::uint64_t>(det));
    std::poisson_distribution<std::int64_t> dist(mean);
    return dist(rng);
}

Sinogram add_poisson(const Sinogram& counts, std::uint64_t seed)
{
    if (counts.stage != Stage::counts)
        throw ValidationError("add_poisson: input must be a counts sinogram");
    Sinogram out = counts;
    for (int m = 0; m < counts.num_bins(); ++m)
        for (int v = 0; v < counts.n_views; ++v)
            for (int d = 0; d < counts.n_detectors; ++d)
                out.bins[m](v, d) = static_cast<double>(poisson_sample(counts.bins[m](v, d), seed, m, v, d));
    return out;
}

Sinogram log_normalize(const Sinogram& counts, const std::vector<double>& flux, double z_floor)
{
    if (counts.stage != Stage::counts)
        throw ValidationError("log_normalize: input must be a counts sinogram");
    if (static_cast<int>(flux.size()) != counts.num_bins())
        throw DimensionError("log_normalize: one flux value per bin required");
    if (!(z_floor > 0.0))
        throw ValidationError("log_normalize: floor must be positive");
    Sinogram out = counts;
    out.stage = Stage::line_integral;
    for (int m = 0; m < counts.num_bins(); ++m) {
        if (!(flux[m] > 0.0))
            throw ValidationError("log_normalize: bin flux must be positive");
        out.bins[m] = -(counts.bins[m].max(z_floor) / flux[m]).log();
    }
    return out;
}

std::vector<double> polychromatic_line_integrals(const PolychromaticModel& model,
                                                 const std::vector<double>& material_paths)
{
    auto z = model.counts(material_paths);
    for (int m = 0; m < model.num_bins(); ++m)
        z[m] = -std::log(z[m] / model.flux()[m]);
    return z;
}

} // namespace spct
