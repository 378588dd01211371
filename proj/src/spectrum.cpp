#include "spct/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "spct/errors.hpp"

namespace spct {

namespace {

void check_increasing(const std::vector<double>& v, const std::string& what)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1]))
            throw ValidationError(what + ": energies must be strictly increasing (index " + std::to_string(i) + ")");
}

struct CsvRows {
    std::vector<double> x;
    std::vector<double> y;
};

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out)
{
    const std::string t = trim(text);
    if (t.empty())
        return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && std::isfinite(out);
}

CsvRows read_two_column_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    CsvRows rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto comma = t.find(',');
        double a = 0.0, b = 0.0;
        if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos
            || !parse_double(t.substr(0, comma), a) || !parse_double(t.substr(comma + 1), b))
            throw ParseError(path.string(), lineno, "expected two numeric columns, got '" + t + "'");
        rows.x.push_back(a);
        rows.y.push_back(b);
    }
    if (rows.x.empty())
        throw ParseError(path.string(), lineno, "no data rows");
    return rows;
}

// Index i such that e lies in [energies[i], energies[i+1]].
std::size_t bracket(const std::vector<double>& energies, double e)
{
    auto it = std::upper_bound(energies.begin(), energies.end(), e);
    std::size_t i = static_cast<std::size_t>(std::distance(energies.begin(), it));
    if (i == 0)
        return 0;
    return std::min(i - 1, energies.size() - 2);
}

// Quadrature nodes for [lo, hi]: both ends plus every interior sample of
// the given grids.
std::vector<double> merged_nodes(double lo, double hi, const std::vector<double>& a, const std::vector<double>& b)
{
    std::vector<double> nodes { lo, hi };
    for (const auto* grid : { &a, &b })
        for (double e : *grid)
            if (e > lo && e < hi)
                nodes.push_back(e);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

} // namespace

SpectrumTable::SpectrumTable(std::vector<double> energies, std::vector<double> intensities)
    : energies_(std::move(energies))
    , intensities_(std::move(intensities))
{
    if (energies_.size() != intensities_.size())
        throw ValidationError("spectrum: energy and intensity columns differ in length");
    if (energies_.size() < 2)
        throw ValidationError("spectrum: at least two samples required");
    if (!(energies_.front() > 0.0))
        throw ValidationError("spectrum: energies must be positive");
    check_increasing(energies_, "spectrum");
    bool any_positive = false;
    for (double v : intensities_) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ValidationError("spectrum: intensities must be finite and non-negative");
        any_positive = any_positive || v > 0.0;
    }
    if (!any_positive)
        throw ValidationError("spectrum: all intensities are zero");
}

double SpectrumTable::intensity(double e) const
{
    if (e < energies_.front() || e > energies_.back())
        return 0.0;
    const std::size_t i = bracket(energies_, e);
    const double t = (e - energies_[i]) / (energies_[i + 1] - energies_[i]);
    return intensities_[i] + t * (intensities_[i + 1] - intensities_[i]);
}

double SpectrumTable::integrate(double lo, double hi) const
{
    lo = std::max(lo, energies_.front());
    hi = std::min(hi, energies_.back());
    if (!(hi > lo))
        return 0.0;
    double sum = 0.0;
    double prev_e = lo;
    double prev_i = intensity(lo);
    for (double e : energies_) {
        if (e <= lo || e >= hi)
            continue;
        const double cur = intensity(e);
        sum += 0.5 * (prev_i + cur) * (e - prev_e);
        prev_e = e;
        prev_i = cur;
    }
    sum += 0.5 * (prev_i + intensity(hi)) * (hi - prev_e);
    return sum;
}

EnergyBins::EnergyBins(std::vector<double> edges)
    : edges_(std::move(edges))
{
    if (edges_.size() < 2)
        throw ValidationError("energy bins: need at least two edges");
    if (!(edges_.front() > 0.0))
        throw ValidationError("energy bins: edges must be positive");
    check_increasing(edges_, "energy bins");
}

AttenuationTable::AttenuationTable(std::string material, std::vector<double> energies, std::vector<double> mass_atten)
    : material_(std::move(material))
    , energies_(std::move(energies))
    , values_(std::move(mass_atten))
{
    if (energies_.size() != values_.size() || energies_.size() < 2)
        throw ValidationError("attenuation table '" + material_ + "': need two same-length columns with >= 2 rows");
    check_increasing(energies_, "attenuation table '" + material_ + "'");
    for (std::size_t i = 0; i < energies_.size(); ++i)
        if (!(energies_[i] > 0.0) || !(values_[i] > 0.0))
            throw ValidationError("attenuation table '" + material_ + "': values must be positive");
}

SpectrumTable load_spectrum(const std::filesystem::path& path)
{
    auto rows = read_two_column_csv(path);
    try {
        return SpectrumTable(std::move(rows.x), std::move(rows.y));
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

AttenuationTable load_attenuation(const std::filesystem::path& path, std::string material)
{
    auto rows = read_two_column_csv(path);
    try {
        return AttenuationTable(std::move(material), std::move(rows.x), std::move(rows.y));
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

std::filesystem::path data_dir()
{
    if (const char* env = std::getenv("SPCT_DATA_DIR"))
        return env;
    return SPCT_DATA_DIR;
}

SpectrumTable default_spectrum() { return load_spectrum(data_dir() / "spectrum_120kvp.csv"); }

AttenuationTable bundled_attenuation(const std::string& name)
{
    const auto path = data_dir() / (name + ".csv");
    if (!std::filesystem::exists(path))
        throw ValidationError("no bundled attenuation table for material '" + name + "'");
    return load_attenuation(path, name);
}

EnergyBins default_bins() { return EnergyBins({ 19.0, 26.0, 36.0, 46.0, 60.0, 120.0 }); }

std::vector<double> bin_flux(const SpectrumTable& spec, const EnergyBins& bins)
{
    const double total = spec.integrate(spec.min_energy(), spec.max_energy());
    std::vector<double> out(bins.count());
    for (int m = 0; m < bins.count(); ++m) {
        const double f = spec.integrate(bins.lower(m), bins.upper(m));
        if (!(f > 0.0)) {
            std::ostringstream os;
            os << "bin [" << bins.lower(m) << ", " << bins.upper(m) << ") receives no photon flux";
            throw ValidationError(os.str());
        }
        out[m] = f / total;
    }
    return out;
}

double mass_attenuation(const AttenuationTable& tab, double e)
{
    const auto& es = tab.energies();
    const auto& vs = tab.values();
    if (!(e >= es.front() && e <= es.back())) {
        std::ostringstream os;
        os << tab.material() << ": energy " << e << " keV outside table range [" << es.front() << ", "
           << es.back() << "]";
        throw OutOfRangeError(os.str());
    }
    const std::size_t i = bracket(es, e);
    if (e == es[i])
        return vs[i];
    if (e == es[i + 1])
        return vs[i + 1];
    const double t = std::log(e / es[i]) / std::log(es[i + 1] / es[i]);
    return std::exp(std::log(vs[i]) + t * std::log(vs[i + 1] / vs[i]));
}

std::vector<double> effective_attenuation(const AttenuationTable& tab, const SpectrumTable& spec,
                                          const EnergyBins& bins)
{
    std::vector<double> out(bins.count());
    for (int m = 0; m < bins.count(); ++m) {
        const double lo = std::max(bins.lower(m), spec.min_energy());
        const double hi = std::min(bins.upper(m), spec.max_energy());
        const auto nodes = merged_nodes(lo, hi, spec.energies(), tab.energies());
        double weight = 0.0, acc = 0.0;
        for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
            const double h = nodes[k + 1] - nodes[k];
            const double i0 = spec.intensity(nodes[k]);
            const double i1 = spec.intensity(nodes[k + 1]);
            weight += 0.5 * h * (i0 + i1);
            acc += 0.5 * h * (i0 * mass_attenuation(tab, nodes[k]) + i1 * mass_attenuation(tab, nodes[k + 1]));
        }
        if (!(weight > 0.0)) {
            std::ostringstream os;
            os << "bin [" << bins.lower(m) << ", " << bins.upper(m) << ") receives no photon flux";
            throw ValidationError(os.str());
        }
        out[m] = acc / weight;
    }
    return out;
}

double mean_energy(const SpectrumTable& spec, double lo, double hi)
{
    lo = std::max(lo, spec.min_energy());
    hi = std::min(hi, spec.max_energy());
    const auto nodes = merged_nodes(lo, hi, spec.energies(), {});
    double weight = 0.0, acc = 0.0;
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
        const double h = nodes[k + 1] - nodes[k];
        const double i0 = spec.intensity(nodes[k]);
        const double i1 = spec.intensity(nodes[k + 1]);
        weight += 0.5 * h * (i0 + i1);
        acc += 0.5 * h * (i0 * nodes[k] + i1 * nodes[k + 1]);
    }
    if (!(weight > 0.0))
        throw ValidationError("mean_energy: empty spectral window");
    return acc / weight;
}

} // namespace spct
