#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "spct/decompose.hpp"
#include "spct/metrics.hpp"
#include "spct/phantom.hpp"
#include "spct/roi.hpp"
#include "test_util.hpp"

using namespace spct;

namespace {

// Per-window SSIM with explicit 2-D Gaussian weights.
double brute_force_ssim(const Image& x, const Image& y, double L)
{
    const int n = 11;
    double k[n][n], ks = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            k[i][j] = std::exp(-((i - 5.0) * (i - 5.0) + (j - 5.0) * (j - 5.0)) / (2.0 * 1.5 * 1.5));
            ks += k[i][j];
        }
    const double c1 = (0.01 * L) * (0.01 * L), c2 = (0.03 * L) * (0.03 * L);
    double acc = 0.0;
    int count = 0;
    for (int r = 0; r + n <= x.rows(); ++r)
        for (int c = 0; c + n <= x.cols(); ++c) {
            double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double w = k[i][j] / ks, a = x(r + i, c + j), b = y(r + i, c + j);
                    mx += w * a;
                    my += w * b;
                }
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double w = k[i][j] / ks, a = x(r + i, c + j) - mx, b = y(r + i, c + j) - my;
                    sxx += w * a * a;
                    syy += w * b * b;
                    sxy += w * a * b;
                }
            acc += (2 * mx * my + c1) * (2 * sxy + c2) / ((mx * mx + my * my + c1) * (sxx + syy + c2));
            ++count;
        }
    return acc / count;
}

DecompositionBasis random_basis(std::mt19937_64& rng, int bins, int k)
{
    std::uniform_real_distribution<double> u(0.1, 2.0);
    Eigen::MatrixXd a(bins, k);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        a(i) = u(rng);
    std::vector<std::string> names;
    for (int j = 0; j < k; ++j)
        names.push_back("m" + std::to_string(j));
    return DecompositionBasis(names, a);
}

} // namespace

TEST_SUITE("analysis") {

TEST_CASE("rmse and psnr examples")
{
    Image a = Image::Zero(2, 2), b = Image::Zero(2, 2);
    b << 1, 1, 1, 1;
    CHECK(rmse(a, b) == 1.0);
    CHECK(psnr(a, b, 1.0) == 0.0);
    CHECK(psnr(a, a, 1.0) == psnr_infinite);
    b(0, 0) = 3.0;
    CHECK(rmse(a, b) == doctest::Approx(std::sqrt(12.0 / 4.0)));
    CHECK(psnr(a, b, 10.0) == doctest::Approx(10.0 * std::log10(100.0 / 3.0)));
    CHECK_THROWS_AS(rmse(a, Image::Zero(2, 3)), DimensionError);
    CHECK_THROWS_AS(psnr(a, b, 0.0), ValidationError);
}

TEST_CASE("ssim matches a brute-force window sum")
{
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 3; ++trial) {
        const Image x = test::random_image(16, 16, rng);
        const Image y = x + 0.2 * test::random_image(16, 16, rng, -1.0, 1.0);
        CHECK(test::rel_diff(ssim(x, y, 1.0), brute_force_ssim(x, y, 1.0)) < 1e-12);
    }
}

TEST_CASE("ssim properties")
{
    std::mt19937_64 rng(2);
    const Image x = test::random_image(20, 24, rng);
    CHECK(ssim(x, x, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    const Image y = test::random_image(20, 24, rng);
    CHECK(ssim(x, y, 1.0) == doctest::Approx(ssim(y, x, 1.0)).epsilon(1e-14));
    CHECK(ssim(x, y, 1.0) < 1.0);

    // a pixel shuffle keeps the histogram but not the structure
    const Image smooth = [] {
        Image s(20, 24);
        for (int r = 0; r < 20; ++r)
            for (int c = 0; c < 24; ++c)
                s(r, c) = std::sin(0.3 * r) * std::cos(0.2 * c);
        return s;
    }();
    Image shuffled = smooth;
    std::shuffle(shuffled.data(), shuffled.data() + shuffled.size(), rng);
    CHECK(ssim(shuffled, smooth, 2.0) < 0.5);
    CHECK_THROWS_AS(ssim(Image::Zero(8, 8), Image::Zero(8, 8), 1.0), DimensionError);
}

TEST_CASE("relative bias")
{
    Image ref = Image::Constant(3, 3, 2.0), x = Image::Constant(3, 3, 2.2);
    const Mask all = Mask::Constant(3, 3, true);
    CHECK(relative_bias(x, ref, all) == doctest::Approx(10.0));
    CHECK(relative_bias(ref, ref, all) == 0.0);

    std::mt19937_64 rng(3);
    const Image r = test::random_image(5, 5, rng, 0.5, 1.5), y = test::random_image(5, 5, rng, 0.5, 1.5);
    const Mask m = test::random_image(5, 5, rng) > 0.3;
    for (double c : { 0.5, 3.0, 100.0 })
        CHECK(relative_bias(c * y, c * r, m) == doctest::Approx(relative_bias(y, r, m)).epsilon(1e-12));

    ref(1, 1) = 0.0;
    CHECK_THROWS_AS(relative_bias(x, ref, all), ValidationError);
    CHECK_THROWS_AS(relative_bias(x, ref, Mask::Constant(3, 3, false)), ValidationError);
}

TEST_CASE("roi masks")
{
    const GridSpec g { 9, 9, 1.0 };
    Roi c { "c", Roi::Shape::circle, { 4.5, 4.5, 2.0 } };
    const Mask m = c.mask(g);
    int expected = 0;
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 9; ++x)
            expected += (x - 4) * (x - 4) + (y - 4) * (y - 4) <= 4;
    CHECK(m.count() == expected);
    CHECK(m.count() == 13);

    Roi r { "r", Roi::Shape::rect, { 1.0, 2.0, 4.0, 3.0 } };
    CHECK(r.mask(g).count() == 3);
    CHECK(r.mask(g)(2, 1));
}

TEST_CASE("roi text round trip and errors")
{
    const auto rois = parse_rois("# comment\na,circle,1,2,3\n\nb,rect,0,0,4,5\n");
    REQUIRE(rois.size() == 2);
    CHECK(rois[1].name == "b");
    CHECK(rois[1].params == std::vector<double> { 0, 0, 4, 5 });
    const auto p = test::scratch_dir() / "rois.csv";
    save_rois(p, rois);
    const auto back = load_rois(p);
    CHECK(back[0].params == rois[0].params);

    try {
        parse_rois("a,circle,1,2,3\nb,triangle,1\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_rois("a,circle,1,2\n"), ParseError);
}

TEST_CASE("decomposition recovers non-negative concentrations")
{
    std::mt19937_64 rng(4);
    for (int k = 1; k <= 3; ++k) {
        CAPTURE(k);
        const auto basis = random_basis(rng, 5, k);
        MaterialConcentrationMaps truth { basis.materials(), test::random_stack(6, 7, k, rng, 0.0, 3.0) };
        const auto stack = synthesize(truth, basis);
        const auto back = decompose(stack, basis);
        for (int j = 0; j < k; ++j)
            CHECK((back.maps[j] - truth.maps[j]).abs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("decomposition of a zero stack is zero")
{
    std::mt19937_64 rng(5);
    const auto basis = random_basis(rng, 4, 3);
    const auto back = decompose(SpectralImage(GridSpec { 3, 3, 1.0 }, 4), basis);
    for (const auto& m : back.maps.bins)
        CHECK((m == 0.0).all());
}

TEST_CASE("non-negative solve satisfies the optimality conditions")
{
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto basis = random_basis(rng, 5, 3);
        Eigen::VectorXd mu(5);
        for (int i = 0; i < 5; ++i)
            mu(i) = n(rng);
        const Eigen::VectorXd x = solve_nonnegative(basis, mu);
        const Eigen::VectorXd g = basis.matrix().transpose() * (basis.matrix() * x - mu);
        for (int j = 0; j < 3; ++j) {
            CHECK(x(j) >= 0.0);
            CHECK(g(j) >= -1e-10);
            CHECK(std::abs(x(j) * g(j)) < 1e-10);
        }
    }
}

TEST_CASE("basis validation")
{
    Eigen::MatrixXd a(3, 2);
    a << 1, 2, 2, 4, 3, 6;
    CHECK_THROWS_AS(DecompositionBasis({ "a", "b" }, a), ValidationError);
    CHECK_THROWS_AS(DecompositionBasis({ "a" }, a), DimensionError);
    CHECK_THROWS_AS(DecompositionBasis({ "a", "b", "c", "d" }, Eigen::MatrixXd::Identity(5, 4)), ValidationError);
    const DecompositionBasis id({ "a", "b" }, Eigen::MatrixXd::Identity(3, 2));
    CHECK(id.condition_number() == doctest::Approx(1.0));
    CHECK_THROWS_AS(decompose(SpectralImage(GridSpec { 2, 2, 1.0 }, 4), id), DimensionError);
}

TEST_CASE("bundled basis")
{
    const auto spec = default_spectrum();
    const auto bins = default_bins();
    const auto basis = make_basis(std::vector<std::string> { "water", "iodine", "gadolinium" }, spec, bins);
    CHECK(basis.num_bins() == 5);
    CHECK((basis.matrix().array() > 0.0).all());
    CHECK(std::isfinite(basis.condition_number()));
    const auto water = bin_water_mu(spec, bins);
    for (int m = 0; m < 5; ++m)
        CHECK(basis.matrix()(m, 0) == doctest::Approx(water[m]).epsilon(1e-12));
    CHECK(concentration_unit("iodine") == 1e-3);
    CHECK(concentration_unit("water") == 1.0);
}

TEST_CASE("hu and mu stacks convert both ways")
{
    std::mt19937_64 rng(7);
    const std::vector<double> water { 0.05, 0.03, 0.02 };
    const auto mu = test::random_stack(4, 4, 3, rng, 0.0, 0.1);
    const auto hu = stack_to_hu(mu, water);
    CHECK(hu[0](0, 0) == doctest::Approx(1000.0 * (mu[0](0, 0) - 0.05) / 0.05));
    const auto back = stack_to_mu(hu, water);
    for (int m = 0; m < 3; ++m)
        CHECK((back[m] - mu[m]).abs().maxCoeff() < 1e-15);
}

TEST_CASE("vial phantom layout")
{
    const auto ph = make_vial_phantom();
    REQUIRE(ph.rois.size() == 14);
    CHECK(ph.materials == std::vector<std::string> { "water", "iodine", "gadolinium" });
    const GridSpec g = ph.concentrations.grid;
    const Mask first = ph.rois[0].mask(g);
    CHECK(first.count() > 0);
    for (Eigen::Index i = 0; i < first.size(); ++i)
        if (first(i)) {
            CHECK(ph.concentrations[1](i) == 8.0);
            CHECK(ph.concentrations[2](i) == 0.0);
        }
    const Mask gd = ph.rois[7].mask(g);
    for (Eigen::Index i = 0; i < gd.size(); ++i)
        if (gd(i))
            CHECK(ph.concentrations[2](i) == 8.0);
    CHECK(ph.concentrations[0](0, 0) == 0.0);
    CHECK(ph.concentrations[0](128, 128) == 1.0);
}

}
