#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spct/errors.hpp"

namespace spct {

// A single 2-D slice: rows are image rows (y), columns are image columns (x).
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Image = Plane<double>;

// Square-pixel grid centered on the rotation axis.
struct GridSpec {
    int width = 0;
    int height = 0;
    double pixel_size = 1.0; // mm

    std::size_t pixels() const { return static_cast<std::size_t>(width) * height; }
    bool operator==(const GridSpec&) const = default;
};

inline void check_same_grid(const GridSpec& a, const GridSpec& b, const char* what)
{
    if (a.width != b.width || a.height != b.height)
        throw DimensionError(std::string(what) + ": grid mismatch");
}

// H x W x M stack of per-bin planes. Used for attenuation images (1/mm or
// HU), loss inputs, and gradients of those.
template <typename Scalar>
struct SpectralStack {
    GridSpec grid;
    std::vector<Plane<Scalar>> bins;

    SpectralStack() = default;
    SpectralStack(const GridSpec& g, int n_bins, Scalar fill = Scalar(0))
        : grid(g)
        , bins(static_cast<std::size_t>(n_bins), Plane<Scalar>::Constant(g.height, g.width, fill))
    {
    }

    int num_bins() const { return static_cast<int>(bins.size()); }
    int width() const { return grid.width; }
    int height() const { return grid.height; }
    std::size_t size() const { return grid.pixels() * bins.size(); }

    Plane<Scalar>& operator[](std::size_t m) { return bins[m]; }
    const Plane<Scalar>& operator[](std::size_t m) const { return bins[m]; }

    bool same_shape(const SpectralStack& o) const
    {
        return grid.width == o.grid.width && grid.height == o.grid.height && bins.size() == o.bins.size();
    }

    bool all_finite() const
    {
        for (const auto& b : bins)
            if (!b.isFinite().all())
                return false;
        return true;
    }
};

using SpectralImage = SpectralStack<double>;

template <typename Scalar>
void check_same_shape(const SpectralStack<Scalar>& a, const SpectralStack<Scalar>& b, const char* what)
{
    if (!a.same_shape(b))
        throw DimensionError(std::string(what) + ": shape mismatch");
}

// HU-valued conventional CT slice.
struct CtImage {
    GridSpec grid;
    Image hu;
};

// Linear attenuation (1/mm) at the reference energy.
struct MuImage {
    GridSpec grid;
    Image mu;
};

} // namespace spct

namespace spct {

// Processing stage of an SPCT payload; values match the on-disk tag byte.
enum class Stage : std::uint8_t {
    counts = 0,
    line_integral = 1,
    image_mu = 2,
    image_hu = 3,
    concentration = 4,
};

} // namespace spct
