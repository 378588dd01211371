#pragma once

#include <cmath>
#include <vector>

#include "spct/image.hpp"
#include "spct/ultra_loss.hpp"

namespace spct {

template <typename Scalar>
struct AdamState {
    SpectralStack<Scalar> first_moment;
    SpectralStack<Scalar> second_moment;
    long step_count = 0;
    double alpha1 = 0.9;
    double alpha2 = 0.999;
    double lr = 1e-3;
    double eps_adam = 1e-8;

    AdamState() = default;
    AdamState(const SpectralStack<Scalar>& like, double lr_, double a1 = 0.9, double a2 = 0.999)
        : first_moment(like.grid, like.num_bins())
        , second_moment(like.grid, like.num_bins())
        , alpha1(a1)
        , alpha2(a2)
        , lr(lr_)
    {
        if (!(a1 > 0.0 && a1 < 1.0) || !(a2 > 0.0 && a2 < 1.0))
            throw ValidationError("adam: decay rates must lie in (0, 1)");
        if (!(lr_ > 0.0))
            throw ValidationError("adam: learning rate must be positive");
    }
};

// One bias-corrected Adam update of params in place.
template <typename Scalar>
void adam_step(SpectralStack<Scalar>& params, const SpectralStack<Scalar>& grad, AdamState<Scalar>& st)
{
    check_same_shape(params, grad, "adam_step");
    check_same_shape(params, st.first_moment, "adam_step");
    ++st.step_count;
    const Scalar a1(st.alpha1), a2(st.alpha2);
    const Scalar c1 = Scalar(1) - std::pow(a1, static_cast<Scalar>(st.step_count));
    const Scalar c2 = Scalar(1) - std::pow(a2, static_cast<Scalar>(st.step_count));
    const Scalar lr(st.lr), eps(st.eps_adam);
    for (int m = 0; m < params.num_bins(); ++m) {
        auto& mom = st.first_moment[m];
        auto& var = st.second_moment[m];
        mom = a1 * mom + (Scalar(1) - a1) * grad[m];
        var = a2 * var + (Scalar(1) - a2) * grad[m].square();
        params[m] -= lr * (mom / c1) / ((var / c2).sqrt() + eps);
    }
}

struct DenoiseConfig {
    // gamma calibrated for the noisy-anchored identity parameterization on a
    // unit-range stack; at 0.001 the prior cannot move v off the input.
    LossConfig loss { .gamma = 1.0 };
    int n_epochs = 50;
    int inner_steps = 20;
    double lr0 = 1e-3;
    double decay = 0.9; // lr(epoch) = lr0 * decay^epoch
    double alpha1 = 0.9;
    double alpha2 = 0.999;
    // The optimizer runs on noisy / scale; 0 picks the stack's value range
    // (max - min over all bins), so lr and gamma act on a unit-range image.
    double scale = 0.0;

    void validate() const;
};

double denoise_scale(const SpectralImage& noisy, const DenoiseConfig& cfg);

double lr_schedule(int epoch, const DenoiseConfig& cfg);

struct LossTraceRow {
    int epoch; // 0 is the starting point, e is after e epochs; values on the scaled stack
    double total_loss;
    double lp_term;
    double atv_term;
};

struct DenoiseResult {
    SpectralImage image;
    std::vector<LossTraceRow> trace;
};

// Minimizes the ULTRA objective over the image itself, starting from and
// anchored to the noisy stack.
DenoiseResult variational_denoise(const SpectralImage& noisy, const DenoiseConfig& cfg);

} // namespace spct
