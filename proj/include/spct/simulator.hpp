#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "spct/geometry.hpp"
#include "spct/materials.hpp"
#include "spct/spectrum.hpp"

namespace spct {

struct SimConfig {
    SpectrumTable spectrum = default_spectrum();
    EnergyBins bins = default_bins();
    double i0_per_ray = 4096.0; // photons per ray, summed over bins
    double energy_step = 1.0;   // keV
    bool noise = true;
    std::uint64_t seed = 0;
    double z_floor = 0.5; // photons, applied before the log
};

// Precomputed polychromatic forward model for a fixed material basis:
// per-bin quadrature nodes carrying photon weights and per-material
// attenuation (1/mm per g/cm^3).
class PolychromaticModel {
public:
    PolychromaticModel(const SimConfig& cfg, const std::vector<AttenuationTable>& materials);

    int num_bins() const { return static_cast<int>(flux_.size()); }
    int num_materials() const { return num_materials_; }
    // Unattenuated photons per bin; sums to i0_per_ray.
    const std::vector<double>& flux() const { return flux_; }

    // Expected counts per bin for the given material path integrals
    // (g/cm^3 * mm), one per material.
    void counts(const double* material_paths, double* out) const;
    std::vector<double> counts(const std::vector<double>& material_paths) const;

private:
    struct Node {
        double weight; // photons
        int bin;
    };
    int num_materials_;
    std::vector<Node> nodes_;
    std::vector<double> atten_; // nodes x materials, row-major
    std::vector<double> flux_;
};

// Expected photon counts for every ray and bin.
Sinogram spectral_counts(const MaterialMaps& maps, const FanBeamGeometry& geom, const SimConfig& cfg);

// Same, from precomputed material line integrals (one views x detectors
// plane per material, g/cm^3 * mm).
Sinogram spectral_counts(const std::vector<Image>& material_paths, const PolychromaticModel& model);

// Counter-based generator: a SplitMix64 stream whose starting state is a hash
// of (seed, bin, view, detector). Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;
    CounterRng(std::uint64_t seed, std::uint64_t bin, std::uint64_t view, std::uint64_t det);
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

private:
    std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Draws Poisson(mean) for sample (bin, view, det) under the given seed.
std::int64_t poisson_sample(double mean, std::uint64_t seed, int bin, int view, int det);

Sinogram add_poisson(const Sinogram& counts, std::uint64_t seed);

// p = -ln(max(z, z_floor) / flux[m]); output stage is line_integral.
Sinogram log_normalize(const Sinogram& counts, const std::vector<double>& flux, double z_floor = 0.5);

// -ln(counts / flux) per bin for one ray, for beam-hardening studies.
std::vector<double> polychromatic_line_integrals(const PolychromaticModel& model,
                                                 const std::vector<double>& material_paths);

} // namespace spct
