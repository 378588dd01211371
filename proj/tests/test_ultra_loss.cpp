#include <doctest.h>

#include <cmath>

#include "spct/ultra_loss.hpp"
#include "test_util.hpp"

using namespace spct;

namespace {

// Direct loop evaluation of the loss over flat (m, h, w) indexing.
double brute_force_loss(const SpectralImage& out, const SpectralImage& label, const LossConfig& c)
{
    const int M = out.num_bins(), H = out.height(), W = out.width();
    const auto o = [&](int m, int h, int w) { return out.bins[m](h, w); };
    double fid = 0.0, tv = 0.0;
    for (int m = 0; m < M; ++m)
        for (int h = 0; h < H; ++h)
            for (int w = 0; w < W; ++w) {
                fid += std::pow(std::fabs(o(m, h, w) - label.bins[m](h, w)), c.p);
                if (w >= 1)
                    tv += c.beta1 * std::fabs(o(m, h, w) - o(m, h, w - 1));
                if (h >= 1)
                    tv += c.beta2 * std::fabs(o(m, h, w) - o(m, h - 1, w));
                if (m >= 1)
                    tv += c.w * c.beta2 * std::fabs(o(m, h, w) - o(m - 1, h, w));
            }
    const double n = static_cast<double>(M) * H * W;
    return fid / n + c.gamma * tv / n;
}

SpectralImage offset_label(const SpectralImage& out, std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> mag(lo, hi);
    std::bernoulli_distribution flip(0.5);
    SpectralImage label = out;
    for (auto& b : label.bins)
        for (Eigen::Index i = 0; i < b.size(); ++i)
            b(i) += (flip(rng) ? 1.0 : -1.0) * mag(rng);
    return label;
}

double max_fd_error(const SpectralImage& out, const SpectralImage& label, const LossConfig& cfg)
{
    const auto g = loss_subgradient(out, label, cfg);
    const double h = 1e-6;
    double worst = 0.0;
    for (int m = 0; m < out.num_bins(); ++m)
        for (Eigen::Index i = 0; i < out[m].size(); ++i) {
            SpectralImage p = out, q = out;
            p[m](i) += h;
            q[m](i) -= h;
            const double fd = (total_loss_smoothed(p, label, cfg) - total_loss_smoothed(q, label, cfg)) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - g[m](i)) / std::max(std::abs(fd), std::abs(g[m](i))));
        }
    return worst;
}

} // namespace

TEST_SUITE("ultra_loss") {

TEST_CASE("lp loss basics")
{
    std::mt19937_64 rng(1);
    const auto a = test::random_stack(4, 5, 2, rng);
    CHECK(lp_loss(a, a, 1.2) == 0.0);

    SpectralImage x(GridSpec { 1, 1, 1.0 }, 1), y(GridSpec { 1, 1, 1.0 }, 1);
    x[0](0, 0) = 2.0;
    CHECK(lp_loss(x, y, 1.2) == doctest::Approx(2.2974).epsilon(1e-4));
    CHECK(lp_loss(x, y, 1.2) == std::pow(2.0, 1.2));

    const auto b = test::random_stack(4, 5, 2, rng);
    double mse = 0.0;
    for (int m = 0; m < 2; ++m)
        mse += (a[m] - b[m]).square().sum();
    CHECK(lp_loss(a, b, 2.0) == doctest::Approx(mse / 40.0).epsilon(1e-14));
}

TEST_CASE("lp loss scales as |c|^p")
{
    std::mt19937_64 rng(2);
    const auto a = test::random_stack(5, 4, 3, rng), b = test::random_stack(5, 4, 3, rng);
    for (double c : { -2.5, 0.3, 7.0 }) {
        SpectralImage ca = a, cb = b;
        for (int m = 0; m < 3; ++m) {
            ca[m] *= c;
            cb[m] *= c;
        }
        CHECK(lp_loss(ca, cb, 1.2) == doctest::Approx(std::pow(std::abs(c), 1.2) * lp_loss(a, b, 1.2)).epsilon(1e-12));
    }
}

TEST_CASE("atv prior cases")
{
    LossConfig c;
    SpectralImage flat(GridSpec { 3, 4, 1.0 }, 2, 5.0);
    CHECK(atv_prior(flat, c) == 0.0);

    flat[1].setConstant(7.0);
    const double spectral_only = atv_prior(flat, c);
    CHECK(spectral_only == doctest::Approx(c.beta3() * 2.0 * 12.0 / 24.0).epsilon(1e-14));
    LossConfig no_spectral = c;
    no_spectral.w = 0.0;
    CHECK(atv_prior(flat, no_spectral) == 0.0);

    SpectralImage pair(GridSpec { 2, 1, 1.0 }, 1);
    pair[0](0, 1) = 3.0;
    CHECK(atv_prior(pair, c) == 1.5);
}

TEST_CASE("atv prior is translation invariant")
{
    std::mt19937_64 rng(3);
    const auto a = test::random_stack(6, 5, 3, rng);
    SpectralImage b = a;
    for (auto& p : b.bins)
        p += 0.375;
    CHECK(atv_prior(b, LossConfig {}) == doctest::Approx(atv_prior(a, LossConfig {})).epsilon(1e-13));
}

TEST_CASE("total loss degenerate weights")
{
    std::mt19937_64 rng(4);
    const auto a = test::random_stack(4, 4, 2, rng), b = test::random_stack(4, 4, 2, rng);
    LossConfig c;
    c.gamma = 0.0;
    CHECK(total_loss(a, b, c) == lp_loss(a, b, c.p));
    const SpectralImage k(GridSpec { 4, 4, 1.0 }, 2, 0.7);
    CHECK(total_loss(k, k, LossConfig {}) == 0.0);
}

TEST_CASE("total loss at defaults equals the brute-force sum")
{
    const LossConfig c;
    CHECK(c.p == 1.2);
    CHECK(c.gamma == 0.001);
    CHECK(c.w == 0.1);
    CHECK(c.epsilon == 1e-4);
    std::mt19937_64 rng(20240601);
    for (int trial = 0; trial < 5; ++trial) {
        const auto a = test::random_stack(8, 8, 3, rng, -1.0, 1.0);
        const auto b = test::random_stack(8, 8, 3, rng, -1.0, 1.0);
        CHECK(test::rel_diff(total_loss(a, b, c), brute_force_loss(a, b, c)) < 1e-12);
    }
}

TEST_CASE("total loss is non-negative and vanishes only on constant matches")
{
    // every 2x2x2 stack over {0, 1} against every label over {0, 1}
    LossConfig c;
    c.gamma = 0.5;
    const GridSpec g { 2, 2, 1.0 };
    for (int xo = 0; xo < 256; ++xo)
        for (int xl = 0; xl < 256; xl += 17) {
            SpectralImage o(g, 2), l(g, 2);
            for (int k = 0; k < 8; ++k) {
                o[k / 4](k % 4 / 2, k % 2) = (xo >> k) & 1;
                l[k / 4](k % 4 / 2, k % 2) = (xl >> k) & 1;
            }
            const double v = total_loss(o, l, c);
            CHECK(v >= 0.0);
            const bool zero = xo == xl && (xo == 0 || xo == 255);
            CHECK((v == 0.0) == zero);
        }
}

TEST_CASE("subgradient vanishes at a constant perfect match")
{
    const SpectralImage k(GridSpec { 5, 3, 1.0 }, 3, 1.25);
    const auto g = loss_subgradient(k, k, LossConfig {});
    for (const auto& b : g.bins)
        CHECK((b == 0.0).all());
}

TEST_CASE("quadratic subgradient without prior is 2 d / N")
{
    std::mt19937_64 rng(5);
    const auto a = test::random_stack(4, 6, 2, rng), b = test::random_stack(4, 6, 2, rng);
    LossConfig c;
    c.p = 2.0;
    c.gamma = 0.0;
    const auto g = loss_subgradient(a, b, c);
    for (int m = 0; m < 2; ++m)
        CHECK(((g[m] - 2.0 * (a[m] - b[m]) / 48.0).abs() < 1e-15).all());
}

TEST_CASE("subgradient matches finite differences of the smoothed loss")
{
    std::mt19937_64 rng(6);
    for (double p : { 0.5, 1.0, 1.2, 2.0 }) {
        CAPTURE(p);
        LossConfig c;
        c.p = p;
        c.gamma = 0.05;
        const auto out = test::random_stack(8, 8, 3, rng, -1.0, 1.0);
        const auto label = offset_label(out, rng, 0.05, 0.5);
        CHECK(max_fd_error(out, label, c) < 1e-4);
    }
}

TEST_CASE("generic prior with a null reducer")
{
    std::mt19937_64 rng(7);
    const auto a = test::random_stack(4, 3, 2, rng);
    NeighborhoodPrior<double> zero;
    zero.n2 = 3;
    zero.reducer = [](const Neighborhood<double>&) { return 0.0; };
    zero.derivative = [](const Neighborhood<double>&, std::span<double>) {};
    const auto r = generic_prior_loss(a, zero);
    CHECK(r.value == 0.0);
    for (const auto& b : r.gradient.bins)
        CHECK((b == 0.0).all());
}

TEST_CASE("generic prior with the centre reducer is the mean")
{
    std::mt19937_64 rng(8);
    const auto a = test::random_stack(4, 3, 2, rng);
    NeighborhoodPrior<double> centre;
    centre.n2 = 1;
    centre.reducer = [](const Neighborhood<double>& nb) { return nb.at(0, 0, 0); };
    centre.derivative = [](const Neighborhood<double>& nb, std::span<double> d) { d[nb.index(0, 0, 0)] = 1.0; };
    const auto r = generic_prior_loss(a, centre);
    CHECK(r.value == doctest::Approx((a[0].sum() + a[1].sum()) / 24.0).epsilon(1e-14));
    for (const auto& b : r.gradient.bins)
        CHECK(((b - 1.0 / 24.0).abs() < 1e-17).all());
}

TEST_CASE("generic prior with the ATV reducer reproduces atv_prior")
{
    std::mt19937_64 rng(9);
    LossConfig c;
    c.beta1 = 0.7;
    c.beta2 = 1.3;
    const auto a = test::random_stack(7, 6, 4, rng);
    const auto r = generic_prior_loss(a, atv_neighborhood_prior<double>(c));
    CHECK(test::rel_diff(r.value, atv_prior(a, c)) < 1e-12);
    const auto g = atv_prior_gradient(a, c);
    for (int m = 0; m < 4; ++m)
        CHECK((r.gradient[m] - g[m]).abs().maxCoeff() <= 1e-12 * g[m].abs().maxCoeff());
}

TEST_CASE("generic prior rejects even neighbourhoods")
{
    NeighborhoodPrior<double> p;
    p.n2 = 2;
    CHECK_THROWS_AS(generic_prior_loss(SpectralImage(GridSpec { 2, 2, 1.0 }, 1), p), ValidationError);
}

TEST_CASE("loss config validation and shape checks")
{
    LossConfig c;
    c.p = 0.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = {};
    c.epsilon = 0.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    const SpectralImage a(GridSpec { 2, 2, 1.0 }, 2), b(GridSpec { 2, 3, 1.0 }, 2);
    CHECK_THROWS_AS(total_loss(a, b, LossConfig {}), DimensionError);
    CHECK_THROWS_AS(loss_subgradient(a, b, LossConfig {}), DimensionError);
}

TEST_CASE("single precision instantiation")
{
    SpectralStack<float> a(GridSpec { 3, 3, 1.0 }, 2, 1.0f), b(GridSpec { 3, 3, 1.0 }, 2, 0.0f);
    CHECK(total_loss(a, b, LossConfig {}) == doctest::Approx(1.0f));
    CHECK(loss_subgradient(a, b, LossConfig {})[0](1, 1) > 0.0f);
}

}
