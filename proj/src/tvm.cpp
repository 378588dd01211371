#include "spct/recon.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "spct/projector.hpp"

namespace spct {

double isotropic_tv(const Image& img, double smoothing)
{
    const Eigen::Index h = img.rows(), w = img.cols();
    Image dx = Image::Zero(h, w), dy = Image::Zero(h, w);
    dx.leftCols(w - 1) = img.rightCols(w - 1) - img.leftCols(w - 1);
    dy.topRows(h - 1) = img.bottomRows(h - 1) - img.topRows(h - 1);
    return (dx.square() + dy.square() + smoothing).sqrt().sum();
}

Image isotropic_tv_gradient(const Image& img, double smoothing)
{
    const Eigen::Index h = img.rows(), w = img.cols();
    Image dx = Image::Zero(h, w), dy = Image::Zero(h, w);
    dx.leftCols(w - 1) = img.rightCols(w - 1) - img.leftCols(w - 1);
    dy.topRows(h - 1) = img.bottomRows(h - 1) - img.topRows(h - 1);
    const Image norm = (dx.square() + dy.square() + smoothing).sqrt();
    const Image nx = dx / norm;
    const Image ny = dy / norm;
    Image g = -(nx + ny);
    g.rightCols(w - 1) += nx.leftCols(w - 1);
    g.bottomRows(h - 1) += ny.topRows(h - 1);
    return g;
}

namespace {

// Projection restricted to the views of one ordered subset.
class SubsetProjector {
public:
    SubsetProjector(const FanBeamGeometry& geom, int subsets)
        : geom_(geom)
        , subsets_(std::max(1, std::min(subsets, geom.n_views())))
    {
        const auto& g = geom.grid();
        ray_length_ = Image::Zero(geom.n_views(), geom.n_detectors());
        for (int v = 0; v < geom.n_views(); ++v)
            for (int d = 0; d < geom.n_detectors(); ++d)
                trace_ray(geom, v, d, [&](int, int, double l) { ray_length_(v, d) += l; });
        column_sums_.assign(subsets_, Image::Zero(g.height, g.width));
        for (int s = 0; s < subsets_; ++s)
            for (int v = s; v < geom.n_views(); v += subsets_)
                for (int d = 0; d < geom.n_detectors(); ++d)
                    trace_ray(geom, v, d, [&](int ix, int iy, double l) { column_sums_[s](iy, ix) += l; });
    }

    int subsets() const { return subsets_; }

    // One OS-SART pass over all subsets; returns 0.5 * sum of squared
    // residuals seen by the subset updates.
    double sweep(Image& x, const Image& sino, double relaxation) const
    {
        const auto& g = geom_.grid();
        double residual = 0.0;
        Image correction(g.height, g.width);
        for (int s = 0; s < subsets_; ++s) {
            correction.setZero();
            for (int v = s; v < geom_.n_views(); v += subsets_)
                for (int d = 0; d < geom_.n_detectors(); ++d) {
                    const double len = ray_length_(v, d);
                    if (len <= 0.0)
                        continue;
                    double ax = 0.0;
                    trace_ray(geom_, v, d, [&](int ix, int iy, double l) { ax += x(iy, ix) * l; });
                    const double r = sino(v, d) - ax;
                    residual += 0.5 * r * r;
                    const double scaled = r / len;
                    trace_ray(geom_, v, d, [&](int ix, int iy, double l) { correction(iy, ix) += scaled * l; });
                }
            const Image& cs = column_sums_[s];
            x += relaxation * (cs > 0.0).select(correction / cs, 0.0);
        }
        return residual;
    }

private:
    const FanBeamGeometry& geom_;
    int subsets_;
    Image ray_length_;
    std::vector<Image> column_sums_;
};

void validate(const TvmConfig& cfg)
{
    if (cfg.n_iters < 1 || cfg.tv_steps < 0 || cfg.subsets < 1)
        throw ValidationError("tvm: iteration counts must be positive");
    if (!(cfg.lambda >= 0.0) || !(cfg.tv_step_size > 0.0))
        throw ValidationError("tvm: lambda and tv_step_size must be non-negative / positive");
    if (!(cfg.sart_relaxation > 0.0 && cfg.sart_relaxation <= 1.0))
        throw ValidationError("tvm: sart_relaxation must lie in (0, 1]");
}

Image tvm_single(const Image& sino, const FanBeamGeometry& geom, const TvmConfig& cfg, const SubsetProjector& proj,
                 const Image* init, std::vector<TvmLogEntry>* log)
{
    const auto& g = geom.grid();
    Image x = init ? *init : Image::Zero(g.height, g.width);
    if (x.rows() != g.height || x.cols() != g.width)
        throw DimensionError("tvm: initial image does not match geometry grid");

    double tau = cfg.tv_step_size;
    double best = std::numeric_limits<double>::infinity();
    for (int it = 0; it < cfg.n_iters; ++it) {
        const Image before = x;
        const double residual = proj.sweep(x, sino, cfg.sart_relaxation);
        if (!std::isfinite(residual))
            throw SolverError("tvm: non-finite data residual at iteration " + std::to_string(it));
        best = std::min(best, residual);
        if (residual > 10.0 * best && best > 0.0)
            throw SolverError("tvm: data residual grew from " + std::to_string(best) + " to "
                              + std::to_string(residual) + " at iteration " + std::to_string(it));
        x = x.max(0.0);

        const double step = std::sqrt((x - before).square().sum());
        for (int k = 0; k < cfg.tv_steps && cfg.lambda > 0.0; ++k) {
            const Image grad = isotropic_tv_gradient(x);
            const double norm = std::sqrt(grad.square().sum());
            if (norm > 0.0)
                x -= (cfg.lambda * tau * step / norm) * grad;
            tau *= 0.995;
        }
        x = x.max(0.0);

        if (log) {
            const Image r = forward_project(x, geom) - sino;
            log->push_back({ it, 0.5 * r.square().sum(), isotropic_tv(x) });
        }
    }
    return x;
}

} // namespace

Image tvm_reconstruct(const Image& sino, const FanBeamGeometry& geom, const TvmConfig& cfg, const Image* init,
                      std::vector<TvmLogEntry>* log)
{
    validate(cfg);
    if (sino.rows() != geom.n_views() || sino.cols() != geom.n_detectors())
        throw DimensionError("tvm: sinogram does not match geometry");
    const SubsetProjector proj(geom, cfg.subsets);
    return tvm_single(sino, geom, cfg, proj, init, log);
}

SpectralImage tvm_reconstruct(const Sinogram& sino, const FanBeamGeometry& geom, const TvmConfig& cfg,
                              const SpectralImage* init, std::vector<std::vector<TvmLogEntry>>* logs)
{
    validate(cfg);
    if (sino.stage != Stage::line_integral)
        throw ValidationError("tvm: sinogram must hold line integrals");
    if (sino.n_views != geom.n_views() || sino.n_detectors != geom.n_detectors())
        throw DimensionError("tvm: sinogram does not match geometry");
    if (init && init->num_bins() != sino.num_bins())
        throw DimensionError("tvm: initial image has the wrong number of bins");
    const SubsetProjector proj(geom, cfg.subsets);
    SpectralImage out;
    out.grid = geom.grid();
    if (logs)
        logs->assign(sino.num_bins(), {});
    for (int m = 0; m < sino.num_bins(); ++m)
        out.bins.push_back(tvm_single(sino.bins[m], geom, cfg, proj, init ? &init->bins[m] : nullptr,
                                      logs ? &(*logs)[m] : nullptr));
    return out;
}

} // namespace spct
