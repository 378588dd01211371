#include "spct/recon.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>

namespace spct {

std::vector<double> ramp_response(int n_fft, double d, RampFilter filter)
{
    // Band-limited ramp sampled in the spatial domain, then transformed, so
    // the DC term is correct for a finite detector.
    std::vector<double> kernel(n_fft, 0.0);
    kernel[0] = 1.0 / (4.0 * d * d);
    for (int k = 1; k <= n_fft / 2; ++k) {
        if (k % 2 == 0)
            continue;
        const double v = -1.0 / (std::numbers::pi * std::numbers::pi * k * k * d * d);
        kernel[k] = v;
        kernel[n_fft - k] = v;
    }
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spectrum;
    fft.fwd(spectrum, kernel);
    std::vector<double> response(n_fft);
    for (int k = 0; k < n_fft; ++k) {
        const int f = std::min(k, n_fft - k);
        double h = spectrum[k].real() * d;
        if (filter == RampFilter::hann)
            h *= 0.5 * (1.0 + std::cos(std::numbers::pi * f / (0.5 * n_fft)));
        response[k] = h;
    }
    return response;
}

Image fbp(const Image& sino, const FanBeamGeometry& geom, const FbpConfig& cfg)
{
    if (sino.rows() != geom.n_views() || sino.cols() != geom.n_detectors())
        throw DimensionError("fbp: sinogram does not match geometry");
    if (std::abs(geom.angular_range() - 2.0 * std::numbers::pi) > 1e-9)
        throw ValidationError("fbp: only full 2*pi scans are supported");

    const int n_det = geom.n_detectors();
    const double sod = geom.sod();
    const double d_virtual = geom.detector_pitch() * sod / geom.sdd();
    int n_fft = 1;
    while (n_fft < 2 * n_det)
        n_fft *= 2;
    const auto response = ramp_response(n_fft, d_virtual, cfg.filter);

    Eigen::ArrayXd cosine_weight(n_det);
    for (int j = 0; j < n_det; ++j) {
        const double t = geom.detector_offset(j) * sod / geom.sdd();
        cosine_weight(j) = sod / std::sqrt(sod * sod + t * t);
    }

    // Filtered, cosine-weighted projections.
    Image filtered(geom.n_views(), n_det);
    Eigen::FFT<double> fft;
    std::vector<double> row(n_fft);
    std::vector<std::complex<double>> freq;
    std::vector<double> back;
    for (int v = 0; v < geom.n_views(); ++v) {
        std::fill(row.begin(), row.end(), 0.0);
        for (int j = 0; j < n_det; ++j)
            row[j] = sino(v, j) * cosine_weight(j);
        fft.fwd(freq, row);
        for (int k = 0; k < n_fft; ++k)
            freq[k] *= response[k];
        fft.inv(back, freq);
        for (int j = 0; j < n_det; ++j)
            filtered(v, j) = back[j];
    }

    const auto& g = geom.grid();
    const double px = g.pixel_size;
    Eigen::ArrayXd xs(g.width), ys(g.height);
    for (int i = 0; i < g.width; ++i)
        xs(i) = (i + 0.5 - 0.5 * g.width) * px;
    for (int i = 0; i < g.height; ++i)
        ys(i) = (i + 0.5 - 0.5 * g.height) * px;

    Image img = Image::Zero(g.height, g.width);
    const double center = 0.5 * (n_det - 1);
    for (int v = 0; v < geom.n_views(); ++v) {
        const double beta = geom.view_angle(v);
        const double c = std::cos(beta), s = std::sin(beta);
        for (int iy = 0; iy < g.height; ++iy) {
            const double y = ys(iy);
            for (int ix = 0; ix < g.width; ++ix) {
                const double x = xs(ix);
                const double l = sod - (x * c + y * s);
                const double t = sod * (-x * s + y * c) / l;
                const double u = t / d_virtual + center;
                double q = 0.0;
                if (cfg.interpolation == Interpolation::nearest) {
                    const long j = std::lround(u);
                    if (j >= 0 && j < n_det)
                        q = filtered(v, j);
                } else {
                    const double fl = std::floor(u);
                    const long j = static_cast<long>(fl);
                    const double a = u - fl;
                    if (j >= 0 && j < n_det)
                        q += (1.0 - a) * filtered(v, j);
                    if (j + 1 >= 0 && j + 1 < n_det)
                        q += a * filtered(v, j + 1);
                }
                const double ratio = sod / l;
                img(iy, ix) += q * ratio * ratio;
            }
        }
    }
    const double d_beta = geom.angular_range() / geom.n_views();
    img *= 0.5 * d_beta;
    return img;
}

SpectralImage fbp(const Sinogram& sino, const FanBeamGeometry& geom, const FbpConfig& cfg)
{
    if (sino.stage != Stage::line_integral)
        throw ValidationError("fbp: sinogram must hold line integrals");
    SpectralImage out;
    out.grid = geom.grid();
    for (const auto& b : sino.bins)
        out.bins.push_back(fbp(b, geom, cfg));
    return out;
}

} // namespace spct
