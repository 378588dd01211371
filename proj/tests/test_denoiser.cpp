#include <doctest.h>

#include <cmath>

#include "spct/denoiser.hpp"
#include "spct/metrics.hpp"
#include "test_util.hpp"

using namespace spct;

namespace {

SpectralImage noisy_squares(std::mt19937_64& rng, int bins, double sigma)
{
    SpectralImage clean(GridSpec { 24, 24, 1.0 }, bins);
    for (int m = 0; m < bins; ++m) {
        clean[m].setConstant(0.2);
        clean[m].block(6, 6, 12, 12).setConstant(0.8 - 0.05 * m);
    }
    std::normal_distribution<double> n(0.0, sigma);
    SpectralImage noisy = clean;
    for (auto& b : noisy.bins)
        for (Eigen::Index i = 0; i < b.size(); ++i)
            b(i) += n(rng);
    return noisy;
}

DenoiseConfig quick(int epochs = 10)
{
    DenoiseConfig c;
    c.n_epochs = epochs;
    return c;
}

} // namespace

TEST_SUITE("denoiser") {

TEST_CASE("zero gradient leaves parameters in place")
{
    SpectralImage x(GridSpec { 2, 2, 1.0 }, 1, 3.0);
    AdamState<double> st(x, 1e-3);
    adam_step(x, SpectralImage(x.grid, 1), st);
    CHECK((x[0] == 3.0).all());
}

TEST_CASE("first Adam step moves by the learning rate")
{
    SpectralImage x(GridSpec { 1, 1, 1.0 }, 1, 0.5);
    SpectralImage g(x.grid, 1, 1.0);
    AdamState<double> st(x, 1e-3);
    adam_step(x, g, st);
    // bias-corrected m / sqrt(v) = 1 / (1 + 1e-8)
    CHECK(x[0](0, 0) == doctest::Approx(0.5 - 1e-3 / (1.0 + 1e-8)).epsilon(1e-15));
    CHECK(st.step_count == 1);
}

TEST_CASE("Adam trajectories are reproducible")
{
    std::mt19937_64 rng(1);
    const auto start = test::random_stack(4, 4, 2, rng);
    const auto grad = test::random_stack(4, 4, 2, rng, -1.0, 1.0);
    SpectralImage a = start, b = start;
    AdamState<double> sa(a, 1e-2), sb(b, 1e-2);
    for (int k = 0; k < 25; ++k) {
        adam_step(a, grad, sa);
        adam_step(b, grad, sb);
    }
    for (int m = 0; m < 2; ++m)
        CHECK((a[m] == b[m]).all());
}

TEST_CASE("Adam validates its hyperparameters and shapes")
{
    const SpectralImage x(GridSpec { 2, 2, 1.0 }, 1);
    CHECK_THROWS_AS(AdamState<double>(x, 1e-3, 1.0), ValidationError);
    CHECK_THROWS_AS(AdamState<double>(x, 0.0), ValidationError);
    SpectralImage y = x;
    AdamState<double> st(x, 1e-3);
    CHECK_THROWS_AS(adam_step(y, SpectralImage(GridSpec { 3, 2, 1.0 }, 1), st), DimensionError);
}

TEST_CASE("learning rate schedule")
{
    const DenoiseConfig c;
    CHECK(lr_schedule(0, c) == c.lr0);
    CHECK(lr_schedule(2, c) == doctest::Approx(8.1e-4).epsilon(1e-14));
    for (int e = 0; e + 1 < c.n_epochs; ++e)
        CHECK(lr_schedule(e + 1, c) <= lr_schedule(e, c));
}

TEST_CASE("without the prior the noisy input is a fixed point")
{
    std::mt19937_64 rng(2);
    const auto noisy = noisy_squares(rng, 2, 0.05);
    auto c = quick(5);
    c.loss.gamma = 0.0;
    const auto r = variational_denoise(noisy, c);
    for (int m = 0; m < 2; ++m)
        CHECK((r.image[m] - noisy[m]).abs().maxCoeff() < 1e-12);
}

TEST_CASE("a constant input is returned unchanged")
{
    const SpectralImage k(GridSpec { 8, 8, 1.0 }, 3, 0.4);
    const auto r = variational_denoise(k, quick(3));
    for (int m = 0; m < 3; ++m)
        CHECK((r.image[m] == 0.4).all());
    CHECK(r.trace.back().total_loss == 0.0);
}

TEST_CASE("denoising lowers the objective and the error")
{
    std::mt19937_64 rng(3);
    SpectralImage clean(GridSpec { 24, 24, 1.0 }, 3);
    const auto noisy = noisy_squares(rng, 3, 0.08);
    for (int m = 0; m < 3; ++m) {
        clean[m].setConstant(0.2);
        clean[m].block(6, 6, 12, 12).setConstant(0.8 - 0.05 * m);
    }
    const auto r = variational_denoise(noisy, DenoiseConfig {});
    REQUIRE(r.trace.size() == 51);
    CHECK(r.trace.front().epoch == 0);
    CHECK(r.trace.back().total_loss < r.trace.front().total_loss);
    for (int m = 0; m < 3; ++m)
        CHECK(rmse(r.image[m], clean[m]) < rmse(noisy[m], clean[m]));
    // the running minimum never rises across 10-epoch windows
    for (std::size_t e = 10; e + 10 < r.trace.size(); e += 10) {
        double prev = r.trace[e - 10].total_loss, cur = r.trace[e].total_loss;
        for (std::size_t k = e - 10; k < e; ++k)
            prev = std::min(prev, r.trace[k].total_loss);
        for (std::size_t k = e; k < e + 10; ++k)
            cur = std::min(cur, r.trace[k].total_loss);
        CHECK(cur <= prev);
    }
}

TEST_CASE("spectral weight pulls identical noisy bins together")
{
    std::mt19937_64 rng(4);
    const auto one = noisy_squares(rng, 1, 0.08);
    SpectralImage copies(one.grid, 3);
    std::normal_distribution<double> n(0.0, 0.04);
    for (int m = 0; m < 3; ++m) {
        copies[m] = one[0];
        for (Eigen::Index i = 0; i < copies[m].size(); ++i)
            copies[m](i) += n(rng);
    }
    const auto spread = [](const SpectralImage& s) {
        return ((s[1] - s[0]).abs().mean() + (s[2] - s[1]).abs().mean()) / 2.0;
    };
    auto coupled = quick(20);
    auto uncoupled = coupled;
    uncoupled.loss.w = 0.0;
    const double a = spread(variational_denoise(copies, coupled).image);
    const double b = spread(variational_denoise(copies, uncoupled).image);
    CHECK(a < b);
}

TEST_CASE("adding a constant shifts the output by that constant")
{
    std::mt19937_64 rng(5);
    const auto noisy = noisy_squares(rng, 2, 0.05);
    SpectralImage shifted = noisy;
    for (auto& b : shifted.bins)
        b += 0.5;
    auto c = quick(5);
    c.scale = 1.0;
    const auto a = variational_denoise(noisy, c).image;
    const auto b = variational_denoise(shifted, c).image;
    for (int m = 0; m < 2; ++m)
        CHECK((b[m] - a[m] - 0.5).abs().maxCoeff() < 1e-9);
}

TEST_CASE("non-finite input is rejected")
{
    SpectralImage x(GridSpec { 2, 2, 1.0 }, 1);
    x[0](0, 0) = std::nan("");
    CHECK_THROWS_AS(variational_denoise(x, quick(1)), ValidationError);
}

}
