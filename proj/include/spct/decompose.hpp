#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spct/image.hpp"
#include "spct/spectrum.hpp"

namespace spct {

// M x K matrix mapping per-material concentrations to per-bin attenuation
// (1/mm per concentration unit).
class DecompositionBasis {
public:
    DecompositionBasis(std::vector<std::string> materials, Eigen::MatrixXd matrix);

    const std::vector<std::string>& materials() const { return materials_; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    int num_bins() const { return static_cast<int>(matrix_.rows()); }
    int num_materials() const { return static_cast<int>(matrix_.cols()); }
    double condition_number() const { return condition_; }

private:
    std::vector<std::string> materials_;
    Eigen::MatrixXd matrix_;
    double condition_;
};

// g/cm^3 represented by one concentration unit: 1e-3 for contrast agents
// (mg/ml), 1 for everything else (g/ml).
double concentration_unit(const std::string& material);

DecompositionBasis make_basis(const std::vector<AttenuationTable>& tables, const SpectrumTable& spec,
                              const EnergyBins& bins);
// Bundled tables by name.
DecompositionBasis make_basis(const std::vector<std::string>& materials, const SpectrumTable& spec,
                              const EnergyBins& bins);

// Per-material maps, one plane per basis column.
struct MaterialConcentrationMaps {
    std::vector<std::string> materials;
    SpectralImage maps;
};

// Nonnegative least squares for one pixel by enumerating the active sets.
Eigen::VectorXd solve_nonnegative(const DecompositionBasis& basis, const Eigen::VectorXd& mu);

MaterialConcentrationMaps decompose(const SpectralImage& stack, const DecompositionBasis& basis);
SpectralImage synthesize(const MaterialConcentrationMaps& conc, const DecompositionBasis& basis);

// Water attenuation (1/mm) averaged over each bin.
std::vector<double> bin_water_mu(const SpectrumTable& spec, const EnergyBins& bins);
SpectralImage stack_to_hu(const SpectralImage& mu, const std::vector<double>& water_mu);
SpectralImage stack_to_mu(const SpectralImage& hu, const std::vector<double>& water_mu);

} // namespace spct
