#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "spct/image.hpp"

namespace spct {

struct LossConfig {
    double p = 1.2;
    double gamma = 0.001;
    double beta1 = 1.0; // along width
    double beta2 = 1.0; // along height
    double w = 0.1;     // spectral weight relative to beta2
    double epsilon = 1e-4;

    double beta3() const { return w * beta2; }
    void validate() const
    {
        if (!(p > 0.0))
            throw ValidationError("loss: p must be positive");
        if (!(epsilon > 0.0))
            throw ValidationError("loss: epsilon must be positive");
        if (!(gamma >= 0.0) || !(beta1 >= 0.0) || !(beta2 >= 0.0) || !(w >= 0.0))
            throw ValidationError("loss: weights must be non-negative");
    }
    // Gradient smoothing applies below p = 2 only; at p >= 2 the power is
    // already differentiable at zero.
    double gradient_epsilon() const { return p < 2.0 ? epsilon : 0.0; }
};

template <typename Scalar>
struct LossTerms {
    Scalar lp;
    Scalar atv;
    Scalar total;
};

namespace detail {

template <typename Scalar>
Scalar sign(Scalar v)
{
    return v > Scalar(0) ? Scalar(1) : (v < Scalar(0) ? Scalar(-1) : Scalar(0));
}

template <typename Derived>
auto signum(const Eigen::ArrayBase<Derived>& a)
{
    using S = typename Derived::Scalar;
    return (a > S(0)).template cast<S>() - (a < S(0)).template cast<S>();
}

} // namespace detail

// Mean of |out - label|^p over all pixels and bins.
template <typename Scalar>
Scalar lp_loss(const SpectralStack<Scalar>& out, const SpectralStack<Scalar>& label, Scalar p)
{
    check_same_shape(out, label, "lp_loss");
    Scalar acc(0);
    for (int m = 0; m < out.num_bins(); ++m)
        acc += (out[m] - label[m]).abs().pow(p).sum();
    return acc / static_cast<Scalar>(out.size());
}

// Mean of (|out - label| + eps)^p: the value whose derivative is the
// smoothed subgradient. Used for gradient checks.
template <typename Scalar>
Scalar lp_loss_smoothed(const SpectralStack<Scalar>& out, const SpectralStack<Scalar>& label, Scalar p, Scalar eps)
{
    check_same_shape(out, label, "lp_loss_smoothed");
    Scalar acc(0);
    for (int m = 0; m < out.num_bins(); ++m)
        acc += ((out[m] - label[m]).abs() + eps).pow(p).sum();
    return acc / static_cast<Scalar>(out.size());
}

// Anisotropically weighted spatio-spectral TV with backward differences;
// differences reaching before the first index of an axis are dropped.
template <typename Scalar>
Scalar atv_prior(const SpectralStack<Scalar>& out, const LossConfig& cfg)
{
    const Eigen::Index h = out.height(), w = out.width();
    Scalar sw(0), sh(0), sm(0);
    for (int m = 0; m < out.num_bins(); ++m) {
        const auto& b = out[m];
        if (w > 1)
            sw += (b.rightCols(w - 1) - b.leftCols(w - 1)).abs().sum();
        if (h > 1)
            sh += (b.bottomRows(h - 1) - b.topRows(h - 1)).abs().sum();
        if (m > 0)
            sm += (b - out[m - 1]).abs().sum();
    }
    const Scalar total = Scalar(cfg.beta1) * sw + Scalar(cfg.beta2) * sh + Scalar(cfg.beta3()) * sm;
    return total / static_cast<Scalar>(out.size());
}

// d(atv_prior)/d(out) with sign(0) = 0.
template <typename Scalar>
SpectralStack<Scalar> atv_prior_gradient(const SpectralStack<Scalar>& out, const LossConfig& cfg)
{
    const Eigen::Index h = out.height(), w = out.width();
    const Scalar n = static_cast<Scalar>(out.size());
    const Scalar c1 = Scalar(cfg.beta1) / n, c2 = Scalar(cfg.beta2) / n, c3 = Scalar(cfg.beta3()) / n;
    SpectralStack<Scalar> g(out.grid, out.num_bins());
    for (int m = 0; m < out.num_bins(); ++m) {
        const auto& b = out[m];
        auto& gm = g[m];
        if (w > 1) {
            const Plane<Scalar> s = c1 * detail::signum(b.rightCols(w - 1) - b.leftCols(w - 1));
            gm.rightCols(w - 1) += s;
            gm.leftCols(w - 1) -= s;
        }
        if (h > 1) {
            const Plane<Scalar> s = c2 * detail::signum(b.bottomRows(h - 1) - b.topRows(h - 1));
            gm.bottomRows(h - 1) += s;
            gm.topRows(h - 1) -= s;
        }
        if (m > 0) {
            const Plane<Scalar> s = c3 * detail::signum(b - out[m - 1]);
            gm += s;
            g[m - 1] -= s;
        }
    }
    return g;
}

template <typename Scalar>
LossTerms<Scalar> loss_terms(const SpectralStack<Scalar>& out, const SpectralStack<Scalar>& label,
                             const LossConfig& cfg)
{
    const Scalar lp = lp_loss(out, label, Scalar(cfg.p));
    const Scalar atv = atv_prior(out, cfg);
    return { lp, atv, lp + Scalar(cfg.gamma) * atv };
}

template <typename Scalar>
Scalar total_loss(const SpectralStack<Scalar>& out, const SpectralStack<Scalar>& label, const LossConfig& cfg)
{
    return loss_terms(out, label, cfg).total;
}

// total_loss with the fidelity term replaced by its epsilon-smoothed form;
// loss_subgradient is the exact gradient of this wherever no difference
// term is zero.
template <typename Scalar>
Scalar total_loss_smoothed(const SpectralStack<Scalar>& out, const SpectralStack<Scalar>& label,
                           const LossConfig& cfg)
{
    return lp_loss_smoothed(out, label, Scalar(cfg.p), Scalar(cfg.gradient_epsilon()))
        + Scalar(cfg.gamma) * atv_prior(out, cfg);
}

// d(total_loss)/d(out): p sign(d) (|d| + eps)^(p-1) / N for the fidelity,
// plus gamma times the signed divergence of the three difference terms.
template <typename Scalar>
SpectralStack<Scalar> loss_subgradient(const SpectralStack<Scalar>& out, const SpectralStack<Scalar>& label,
                                       const LossConfig& cfg)
{
    check_same_shape(out, label, "loss_subgradient");
    const Scalar n = static_cast<Scalar>(out.size());
    const Scalar p(cfg.p), eps(cfg.gradient_epsilon());
    SpectralStack<Scalar> g = atv_prior_gradient(out, cfg);
    for (int m = 0; m < out.num_bins(); ++m) {
        g[m] *= Scalar(cfg.gamma);
        const Plane<Scalar> d = out[m] - label[m];
        g[m] += (p / n) * detail::signum(d) * (d.abs() + eps).pow(p - Scalar(1));
    }
    return g;
}

// Values of an n2 x n2 x n2 neighborhood around one voxel, zero-padded at
// the borders. Offsets are ordered (bin, row, column), each in [-r, r].
template <typename Scalar>
struct Neighborhood {
    int n2 = 1;
    std::vector<Scalar> values;
    std::vector<char> inside;

    int radius() const { return n2 / 2; }
    std::size_t index(int dm, int dh, int dw) const
    {
        const int r = radius();
        return (static_cast<std::size_t>(dm + r) * n2 + static_cast<std::size_t>(dh + r)) * n2
            + static_cast<std::size_t>(dw + r);
    }
    Scalar at(int dm, int dh, int dw) const { return values[index(dm, dh, dw)]; }
    bool has(int dm, int dh, int dw) const { return inside[index(dm, dh, dw)] != 0; }
};

// A prior that reduces each voxel's neighborhood to one scalar. derivative
// writes d(reducer)/d(neighbor) for every neighborhood slot.
template <typename Scalar>
struct NeighborhoodPrior {
    int n2 = 3;
    std::function<Scalar(const Neighborhood<Scalar>&)> reducer;
    std::function<void(const Neighborhood<Scalar>&, std::span<Scalar>)> derivative;
};

template <typename Scalar>
struct PriorValue {
    Scalar value;
    SpectralStack<Scalar> gradient;
};

// Mean over voxels of reducer(neighborhood); the gradient routes every
// per-slot derivative back to the voxel occupying that slot.
template <typename Scalar>
PriorValue<Scalar> generic_prior_loss(const SpectralStack<Scalar>& out, const NeighborhoodPrior<Scalar>& prior)
{
    if (prior.n2 < 1 || prior.n2 % 2 == 0)
        throw ValidationError("neighborhood prior: n2 must be odd and >= 1");
    const int r = prior.n2 / 2;
    const int M = out.num_bins(), H = out.height(), W = out.width();
    const std::size_t slots = static_cast<std::size_t>(prior.n2) * prior.n2 * prior.n2;
    const Scalar n = static_cast<Scalar>(out.size());

    Neighborhood<Scalar> nb { prior.n2, std::vector<Scalar>(slots), std::vector<char>(slots) };
    std::vector<Scalar> deriv(slots);
    PriorValue<Scalar> res { Scalar(0), SpectralStack<Scalar>(out.grid, M) };
    for (int m = 0; m < M; ++m)
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x) {
                for (int dm = -r; dm <= r; ++dm)
                    for (int dh = -r; dh <= r; ++dh)
                        for (int dw = -r; dw <= r; ++dw) {
                            const int mm = m + dm, yy = y + dh, xx = x + dw;
                            const bool in = mm >= 0 && mm < M && yy >= 0 && yy < H && xx >= 0 && xx < W;
                            const std::size_t k = nb.index(dm, dh, dw);
                            nb.inside[k] = in;
                            nb.values[k] = in ? out[mm](yy, xx) : Scalar(0);
                        }
                res.value += prior.reducer(nb);
                std::fill(deriv.begin(), deriv.end(), Scalar(0));
                prior.derivative(nb, std::span<Scalar>(deriv));
                for (int dm = -r; dm <= r; ++dm)
                    for (int dh = -r; dh <= r; ++dh)
                        for (int dw = -r; dw <= r; ++dw) {
                            const std::size_t k = nb.index(dm, dh, dw);
                            if (nb.inside[k] && deriv[k] != Scalar(0))
                                res.gradient[m + dm](y + dh, x + dw) += deriv[k] / n;
                        }
            }
    res.value /= n;
    return res;
}

// The weighted-absolute-backward-difference reducer; generic_prior_loss
// with it reproduces atv_prior and atv_prior_gradient.
template <typename Scalar>
NeighborhoodPrior<Scalar> atv_neighborhood_prior(const LossConfig& cfg)
{
    const Scalar b1(cfg.beta1), b2(cfg.beta2), b3(cfg.beta3());
    NeighborhoodPrior<Scalar> prior;
    prior.n2 = 3;
    prior.reducer = [=](const Neighborhood<Scalar>& nb) {
        const Scalar c = nb.at(0, 0, 0);
        Scalar v(0);
        if (nb.has(0, 0, -1))
            v += b1 * std::abs(c - nb.at(0, 0, -1));
        if (nb.has(0, -1, 0))
            v += b2 * std::abs(c - nb.at(0, -1, 0));
        if (nb.has(-1, 0, 0))
            v += b3 * std::abs(c - nb.at(-1, 0, 0));
        return v;
    };
    prior.derivative = [=](const Neighborhood<Scalar>& nb, std::span<Scalar> d) {
        const Scalar c = nb.at(0, 0, 0);
        const auto term = [&](int dm, int dh, int dw, Scalar beta) {
            if (!nb.has(dm, dh, dw))
                return;
            const Scalar s = beta * detail::sign(c - nb.at(dm, dh, dw));
            d[nb.index(0, 0, 0)] += s;
            d[nb.index(dm, dh, dw)] -= s;
        };
        term(0, 0, -1, b1);
        term(0, -1, 0, b2);
        term(-1, 0, 0, b3);
    };
    return prior;
}

} // namespace spct
