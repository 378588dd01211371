#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace spct {

// Sampled x-ray emission spectrum, relative photon counts per keV.
class SpectrumTable {
public:
    SpectrumTable(std::vector<double> energies, std::vector<double> intensities);

    const std::vector<double>& energies() const { return energies_; }
    const std::vector<double>& intensities() const { return intensities_; }
    double min_energy() const { return energies_.front(); }
    double max_energy() const { return energies_.back(); }
    std::size_t size() const { return energies_.size(); }

    // Piecewise-linear intensity; zero outside the sampled support.
    double intensity(double e_kev) const;
    // Exact integral of the piecewise-linear intensity over [lo, hi].
    double integrate(double lo, double hi) const;

private:
    std::vector<double> energies_;
    std::vector<double> intensities_;
};

// Bin m spans [edges[m], edges[m+1]).
class EnergyBins {
public:
    explicit EnergyBins(std::vector<double> edges);

    int count() const { return static_cast<int>(edges_.size()) - 1; }
    double lower(int m) const { return edges_[m]; }
    double upper(int m) const { return edges_[m + 1]; }
    const std::vector<double>& edges() const { return edges_; }

private:
    std::vector<double> edges_;
};

// Tabulated mass attenuation coefficient (cm^2/g) of one material.
class AttenuationTable {
public:
    AttenuationTable(std::string material, std::vector<double> energies, std::vector<double> mass_atten);

    const std::string& material() const { return material_; }
    const std::vector<double>& energies() const { return energies_; }
    const std::vector<double>& values() const { return values_; }
    double min_energy() const { return energies_.front(); }
    double max_energy() const { return energies_.back(); }

private:
    std::string material_;
    std::vector<double> energies_;
    std::vector<double> values_;
};

SpectrumTable load_spectrum(const std::filesystem::path& path);
AttenuationTable load_attenuation(const std::filesystem::path& path, std::string material);

// Bundled data under SPCT_DATA_DIR.
std::filesystem::path data_dir();
SpectrumTable default_spectrum();
// Looks up data/<name>.csv, e.g. "water", "bone", "soft_tissue", "iodine", "gadolinium".
AttenuationTable bundled_attenuation(const std::string& name);

// The five bins used throughout: [19,26) [26,36) [36,46) [46,60) [60,120).
EnergyBins default_bins();

// Fraction of the total spectral flux falling into each bin.
std::vector<double> bin_flux(const SpectrumTable& spec, const EnergyBins& bins);

// Log-log interpolation; throws OutOfRangeError outside the table.
double mass_attenuation(const AttenuationTable& tab, double e_kev);

// Spectrum-weighted bin average of the mass attenuation, per bin.
std::vector<double> effective_attenuation(const AttenuationTable& tab, const SpectrumTable& spec,
                                          const EnergyBins& bins);

// Mean photon energy of the spectrum restricted to [lo, hi].
double mean_energy(const SpectrumTable& spec, double lo, double hi);

} // namespace spct
