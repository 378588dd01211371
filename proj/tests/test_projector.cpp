#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spct/phantom.hpp"
#include "spct/projector.hpp"
#include "test_util.hpp"

using namespace spct;

namespace {

FanBeamGeometry small_geometry(int views = 16, int dets = 36)
{
    FanBeamGeometry::Params p;
    p.grid = { 32, 32, 1.0 };
    p.n_views = views;
    p.n_detectors = dets;
    p.detector_pitch = 2.0;
    return FanBeamGeometry(p);
}

// Perpendicular distance of a ray from the isocenter.
double ray_distance(const Ray& r)
{
    const Eigen::Vector2d d = (r.target - r.source).normalized();
    return std::abs(r.source.x() * d.y() - r.source.y() * d.x());
}

double chord(double radius, double d) { return d < radius ? 2.0 * std::sqrt(radius * radius - d * d) : 0.0; }

// Length of the segment s->t inside the axis-aligned box [-a, a] x [-b, b].
double box_chord(const Eigen::Vector2d& s, const Eigen::Vector2d& t, double a, double b)
{
    double lo = 0.0, hi = 1.0;
    const Eigen::Vector2d d = t - s;
    const double p[4] = { -d.x(), d.x(), -d.y(), d.y() };
    const double q[4] = { s.x() + a, a - s.x(), s.y() + b, b - s.y() };
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0)
                return 0.0;
            continue;
        }
        const double r = q[i] / p[i];
        if (p[i] < 0.0)
            lo = std::max(lo, r);
        else
            hi = std::min(hi, r);
    }
    return hi > lo ? (hi - lo) * d.norm() : 0.0;
}

} // namespace

TEST_SUITE("projector") {

TEST_CASE("geometry validation")
{
    FanBeamGeometry::Params p;
    p.sod = 600.0;
    CHECK_THROWS_AS(FanBeamGeometry { p }, ValidationError);
    p = {};
    p.n_detectors = 10;
    CHECK_THROWS_AS(FanBeamGeometry { p }, ValidationError);
    p = {};
    p.n_views = 0;
    CHECK_THROWS_AS(FanBeamGeometry { p }, ValidationError);
}

TEST_CASE("automatic detector count covers the image circle")
{
    const FanBeamGeometry g;
    CHECK(g.n_detectors() % 2 == 0);
    const double half_fan = std::atan(0.5 * g.n_detectors() * g.detector_pitch() / g.sdd());
    CHECK(g.sod() * std::sin(half_fan) >= g.image_radius());
    const double smaller = std::atan(0.5 * (g.n_detectors() - 2) * g.detector_pitch() / g.sdd());
    CHECK(g.sod() * std::sin(smaller) < g.image_radius());
}

TEST_CASE("ray missing the grid has an empty path")
{
    FanBeamGeometry::Params p;
    p.grid = { 16, 16, 1.0 };
    p.n_detectors = 400;
    p.detector_pitch = 1.0;
    p.n_views = 4;
    const FanBeamGeometry g(p);
    CHECK(ray_path(g, 0, 0).empty());
    CHECK(ray_path(g, 1, 399).empty());
}

TEST_CASE("central axis-aligned ray through a single pixel")
{
    FanBeamGeometry::Params p;
    p.grid = { 1, 1, 0.75 };
    p.n_detectors = 1;
    p.detector_pitch = 4.0;
    p.n_views = 4;
    const FanBeamGeometry g(p);
    for (int v = 0; v < 4; ++v) {
        const auto path = ray_path(g, v, 0);
        REQUIRE(path.size() == 1);
        CHECK(path[0].pixel == 0);
        CHECK(path[0].length == doctest::Approx(0.75).epsilon(1e-12));
    }
}

TEST_CASE("diagonal ray through one square pixel")
{
    const GridSpec grid { 1, 1, 2.0 };
    double total = 0.0;
    int visits = 0;
    detail::trace_segment(grid, Eigen::Vector2d(-5.0, -5.0), Eigen::Vector2d(5.0, 5.0), [&](int, int, double l) {
        total += l;
        ++visits;
    });
    CHECK(visits == 1);
    CHECK(total == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("path lengths sum to the chord through the image rectangle")
{
    FanBeamGeometry::Params p;
    p.grid = { 40, 24, 0.7 };
    p.n_views = 37;
    const FanBeamGeometry g(p);
    const double a = 0.5 * 40 * 0.7, b = 0.5 * 24 * 0.7;
    for (int v = 0; v < g.n_views(); ++v)
        for (int d = 0; d < g.n_detectors(); d += 13) {
            const Ray r = g.ray(v, d);
            double sum = 0.0;
            for (const auto& e : ray_path(g, v, d)) {
                CHECK(e.length > 0.0);
                sum += e.length;
            }
            const double expected = box_chord(r.source, r.target, a, b);
            if (expected == 0.0)
                CHECK(sum == 0.0);
            else
                CHECK(std::abs(sum - expected) <= 1e-9 * expected);
        }
}

TEST_CASE("ray_path rejects bad indices")
{
    const auto g = small_geometry();
    CHECK_THROWS_AS(ray_path(g, 16, 0), OutOfRangeError);
    CHECK_THROWS_AS(ray_path(g, 0, -1), OutOfRangeError);
}

TEST_CASE("zero image projects to zero and back")
{
    const auto g = small_geometry();
    CHECK((forward_project(Image::Zero(32, 32), g) == 0.0).all());
    CHECK((back_project(Image::Zero(16, 36), g) == 0.0).all());
}

TEST_CASE("projection dimension checks")
{
    const auto g = small_geometry();
    CHECK_THROWS_AS(forward_project(Image::Zero(31, 32), g), DimensionError);
    CHECK_THROWS_AS(back_project(Image::Zero(16, 35), g), DimensionError);
}

TEST_CASE("centered disk: central ray integrates to 2 r mu")
{
    FanBeamGeometry::Params p;
    p.n_views = 8;
    p.n_detectors = FanBeamGeometry::minimal_detectors(p.grid, p.sdd, p.sod, p.detector_pitch) + 1;
    const FanBeamGeometry g(p);
    const Image disk = disk_image(g.grid(), 50.0, 0.02);
    const Image sino = forward_project(disk, g);
    const int centre = (g.n_detectors() - 1) / 2;
    CHECK(g.detector_offset(centre) == 0.0);
    for (int v = 0; v < g.n_views(); v += 2)
        CHECK(sino(v, centre) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("off-centre chords stay within one pixel of the analytic disk")
{
    FanBeamGeometry::Params p;
    p.n_views = 24;
    const FanBeamGeometry g(p);
    const double r = 50.0, mu = 0.02, px = g.grid().pixel_size;
    const Image sino = forward_project(disk_image(g.grid(), r, mu), g);
    for (int v = 0; v < g.n_views(); v += 5)
        for (int d = 0; d < g.n_detectors(); d += 7) {
            const double dist = ray_distance(g.ray(v, d));
            CHECK(sino(v, d) >= mu * chord(r - px, dist) - 1e-12);
            CHECK(sino(v, d) <= mu * chord(r + px, dist) + 1e-12);
        }
}

TEST_CASE("adjoint identity on a 32x32 grid")
{
    const auto g = small_geometry();
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        const Image x = test::random_image(32, 32, rng, -1.0, 1.0);
        const Image y = test::random_image(16, 36, rng, -1.0, 1.0);
        const Image ax = forward_project(x, g);
        const double lhs = (ax * y).sum();
        const double rhs = (x * back_project(y, g)).sum();
        CHECK(std::abs(lhs - rhs) / (ax.matrix().norm() * y.matrix().norm()) < 1e-10);
    }
}

TEST_CASE("back projection of a single-ray sinogram is that ray's footprint")
{
    const auto g = small_geometry();
    Image y = Image::Zero(16, 36);
    y(5, 11) = 1.0;
    const Image bp = back_project(y, g);
    Image expected = Image::Zero(32, 32);
    for (const auto& e : ray_path(g, 5, 11))
        expected(e.pixel / 32, e.pixel % 32) += e.length;
    CHECK((bp - expected).abs().maxCoeff() == 0.0);
}

TEST_CASE("forward projection is linear")
{
    const auto g = small_geometry();
    std::mt19937_64 rng(3);
    const Image x = test::random_image(32, 32, rng), y = test::random_image(32, 32, rng);
    const double a = 1.7, b = -0.6;
    const Image lhs = forward_project(a * x + b * y, g);
    const Image rhs = a * forward_project(x, g) + b * forward_project(y, g);
    CHECK((lhs - rhs).abs().maxCoeff() <= 1e-12 * rhs.abs().maxCoeff());
}

TEST_CASE("centered disk gives view-independent projections")
{
    FanBeamGeometry::Params p;
    p.grid = { 64, 64, 1.0 };
    p.n_views = 96;
    const FanBeamGeometry g(p);
    // a rotationally symmetric image: radial profile sampled at pixel centres
    Image img(64, 64);
    for (int iy = 0; iy < 64; ++iy)
        for (int ix = 0; ix < 64; ++ix) {
            const double x = ix + 0.5 - 32, y = iy + 0.5 - 32;
            img(iy, ix) = std::exp(-(x * x + y * y) / (2.0 * 8.0 * 8.0));
        }
    const Image sino = forward_project(img, g);
    // views 90 degrees apart see the image through the grid's symmetry
    for (int v = 0; v < g.n_views() / 4; ++v)
        for (int d = 0; d < g.n_detectors(); ++d)
            CHECK(std::abs(sino(v + g.n_views() / 4, d) - sino(v, d)) <= 1e-6 * sino.maxCoeff());
}

TEST_CASE("per-bin wrappers project every bin")
{
    const auto g = small_geometry();
    std::mt19937_64 rng(5);
    SpectralImage s(g.grid(), 3);
    for (auto& b : s.bins)
        b = test::random_image(32, 32, rng);
    const Sinogram sino = forward_project(s, g);
    REQUIRE(sino.num_bins() == 3);
    CHECK(sino.stage == Stage::line_integral);
    for (int m = 0; m < 3; ++m)
        CHECK((sino.bins[m] - forward_project(s[m], g)).abs().maxCoeff() == 0.0);
    const SpectralImage bp = back_project(sino, g);
    CHECK((bp[1] - back_project(sino.bins[1], g)).abs().maxCoeff() == 0.0);
}

}
