#include "spct/decompose.hpp"

#include <limits>

namespace spct {

namespace {

struct ActiveSet {
    std::vector<int> columns;
    Eigen::MatrixXd solver; // |S| x M least-squares operator
};

std::vector<ActiveSet> active_sets(const Eigen::MatrixXd& a)
{
    const int k = static_cast<int>(a.cols());
    std::vector<ActiveSet> sets;
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
        ActiveSet s;
        for (int j = 0; j < k; ++j)
            if (mask & (1u << j))
                s.columns.push_back(j);
        Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(s.columns.size()));
        for (std::size_t j = 0; j < s.columns.size(); ++j)
            sub.col(static_cast<Eigen::Index>(j)) = a.col(s.columns[j]);
        s.solver = sub.completeOrthogonalDecomposition().pseudoInverse();
        sets.push_back(std::move(s));
    }
    return sets;
}

Eigen::VectorXd solve_with(const Eigen::MatrixXd& a, const std::vector<ActiveSet>& sets, const Eigen::VectorXd& mu)
{
    Eigen::VectorXd best = Eigen::VectorXd::Zero(a.cols());
    double best_res = mu.squaredNorm();
    Eigen::VectorXd c(a.cols());
    for (const auto& s : sets) {
        const Eigen::VectorXd cs = s.solver * mu;
        if ((cs.array() < 0.0).any())
            continue;
        c.setZero();
        for (std::size_t j = 0; j < s.columns.size(); ++j)
            c(s.columns[j]) = cs(static_cast<Eigen::Index>(j));
        const double res = (a * c - mu).squaredNorm();
        if (res < best_res) {
            best_res = res;
            best = c;
        }
    }
    return best;
}

} // namespace

DecompositionBasis::DecompositionBasis(std::vector<std::string> materials, Eigen::MatrixXd matrix)
    : materials_(std::move(materials))
    , matrix_(std::move(matrix))
{
    if (static_cast<Eigen::Index>(materials_.size()) != matrix_.cols())
        throw DimensionError("basis: material names do not match matrix columns");
    if (matrix_.cols() < 1 || matrix_.cols() > matrix_.rows())
        throw ValidationError("basis: need 1 <= materials <= bins");
    if (matrix_.cols() > 3)
        throw ValidationError("basis: at most 3 materials are supported");
    if (!matrix_.allFinite())
        throw ValidationError("basis: non-finite entries");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix_);
    const auto& sv = svd.singularValues();
    const double smax = sv(0), smin = sv(sv.size() - 1);
    if (!(smin > smax * 1e-12))
        throw ValidationError("basis: matrix is rank deficient");
    condition_ = smax / smin;
}

double concentration_unit(const std::string& material)
{
    return material == "iodine" || material == "gadolinium" ? 1e-3 : 1.0;
}

DecompositionBasis make_basis(const std::vector<AttenuationTable>& tables, const SpectrumTable& spec,
                              const EnergyBins& bins)
{
    Eigen::MatrixXd a(bins.count(), static_cast<Eigen::Index>(tables.size()));
    std::vector<std::string> names;
    for (std::size_t k = 0; k < tables.size(); ++k) {
        const auto eff = effective_attenuation(tables[k], spec, bins);
        const double unit = concentration_unit(tables[k].material());
        for (int m = 0; m < bins.count(); ++m)
            a(m, static_cast<Eigen::Index>(k)) = eff[m] * unit / 10.0;
        names.push_back(tables[k].material());
    }
    return DecompositionBasis(std::move(names), std::move(a));
}

DecompositionBasis make_basis(const std::vector<std::string>& materials, const SpectrumTable& spec,
                              const EnergyBins& bins)
{
    std::vector<AttenuationTable> tables;
    for (const auto& m : materials)
        tables.push_back(bundled_attenuation(m));
    return make_basis(tables, spec, bins);
}

Eigen::VectorXd solve_nonnegative(const DecompositionBasis& basis, const Eigen::VectorXd& mu)
{
    if (mu.size() != basis.num_bins())
        throw DimensionError("decompose: bin count mismatch");
    return solve_with(basis.matrix(), active_sets(basis.matrix()), mu);
}

MaterialConcentrationMaps decompose(const SpectralImage& stack, const DecompositionBasis& basis)
{
    if (stack.num_bins() != basis.num_bins())
        throw DimensionError("decompose: stack has " + std::to_string(stack.num_bins()) + " bins, basis expects "
                             + std::to_string(basis.num_bins()));
    const auto sets = active_sets(basis.matrix());
    MaterialConcentrationMaps out { basis.materials(), SpectralImage(stack.grid, basis.num_materials()) };
    Eigen::VectorXd mu(basis.num_bins());
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(stack.grid.pixels()); ++i) {
        for (int m = 0; m < basis.num_bins(); ++m)
            mu(m) = stack[m](i);
        const Eigen::VectorXd c = solve_with(basis.matrix(), sets, mu);
        for (int k = 0; k < basis.num_materials(); ++k)
            out.maps[k](i) = c(k);
    }
    return out;
}

SpectralImage synthesize(const MaterialConcentrationMaps& conc, const DecompositionBasis& basis)
{
    if (conc.maps.num_bins() != basis.num_materials())
        throw DimensionError("synthesize: material count mismatch");
    SpectralImage out(conc.maps.grid, basis.num_bins());
    for (int m = 0; m < basis.num_bins(); ++m)
        for (int k = 0; k < basis.num_materials(); ++k)
            out[m] += basis.matrix()(m, k) * conc.maps[k];
    return out;
}

std::vector<double> bin_water_mu(const SpectrumTable& spec, const EnergyBins& bins)
{
    auto eff = effective_attenuation(bundled_attenuation("water"), spec, bins);
    for (auto& v : eff)
        v /= 10.0;
    return eff;
}

SpectralImage stack_to_hu(const SpectralImage& mu, const std::vector<double>& water_mu)
{
    if (static_cast<int>(water_mu.size()) != mu.num_bins())
        throw DimensionError("stack_to_hu: bin count mismatch");
    SpectralImage out = mu;
    for (int m = 0; m < mu.num_bins(); ++m)
        out[m] = 1000.0 * (mu[m] - water_mu[m]) / water_mu[m];
    return out;
}

SpectralImage stack_to_mu(const SpectralImage& hu, const std::vector<double>& water_mu)
{
    if (static_cast<int>(water_mu.size()) != hu.num_bins())
        throw DimensionError("stack_to_mu: bin count mismatch");
    SpectralImage out = hu;
    for (int m = 0; m < hu.num_bins(); ++m)
        out[m] = water_mu[m] * (1.0 + hu[m] / 1000.0);
    return out;
}

} // namespace spct
