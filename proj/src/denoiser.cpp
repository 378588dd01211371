#include "spct/denoiser.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace spct {

void DenoiseConfig::validate() const
{
    loss.validate();
    if (n_epochs < 1 || inner_steps < 1)
        throw ValidationError("denoise: n_epochs and inner_steps must be >= 1");
    if (!(lr0 > 0.0))
        throw ValidationError("denoise: learning rate must be positive");
    if (!(decay > 0.0 && decay <= 1.0))
        throw ValidationError("denoise: decay must lie in (0, 1]");
    if (!(scale >= 0.0))
        throw ValidationError("denoise: scale must be non-negative");
}

double denoise_scale(const SpectralImage& noisy, const DenoiseConfig& cfg)
{
    if (cfg.scale > 0.0)
        return cfg.scale;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& b : noisy.bins) {
        lo = std::min(lo, b.minCoeff());
        hi = std::max(hi, b.maxCoeff());
    }
    return hi > lo ? hi - lo : 1.0;
}

double lr_schedule(int epoch, const DenoiseConfig& cfg) { return cfg.lr0 * std::pow(cfg.decay, epoch); }

DenoiseResult variational_denoise(const SpectralImage& noisy, const DenoiseConfig& cfg)
{
    cfg.validate();
    if (!noisy.all_finite())
        throw ValidationError("denoise: input contains non-finite values");

    const double s = denoise_scale(noisy, cfg);
    SpectralImage label = noisy;
    for (auto& b : label.bins)
        b /= s;
    DenoiseResult res { label, {} };
    auto& v = res.image;
    const auto record = [&](int epoch) {
        const auto t = loss_terms(v, label, cfg.loss);
        if (!std::isfinite(t.total))
            throw SolverError("denoise: non-finite loss at epoch " + std::to_string(epoch));
        res.trace.push_back({ epoch, t.total, t.lp, t.atv });
    };
    record(0);

    AdamState<double> state(label, cfg.lr0, cfg.alpha1, cfg.alpha2);
    for (int epoch = 0; epoch < cfg.n_epochs; ++epoch) {
        state.lr = lr_schedule(epoch, cfg);
        for (int k = 0; k < cfg.inner_steps; ++k)
            adam_step(v, loss_subgradient(v, label, cfg.loss), state);
        record(epoch + 1);
    }
    for (auto& b : v.bins)
        b *= s;
    return res;
}

} // namespace spct
