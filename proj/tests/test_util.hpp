#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "spct/image.hpp"

namespace spct::test {

inline std::filesystem::path scratch_dir()
{
    const auto dir = std::filesystem::temp_directory_path() / "spct_unit";
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path write_file(const std::string& name, const std::string& text)
{
    const auto p = scratch_dir() / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

inline Image random_image(int h, int w, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    Image img(h, w);
    for (Eigen::Index i = 0; i < img.size(); ++i)
        img(i) = u(rng);
    return img;
}

inline SpectralImage random_stack(int h, int w, int m, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0)
{
    SpectralImage s(GridSpec { w, h, 1.0 }, m);
    for (auto& b : s.bins)
        b = random_image(h, w, rng, lo, hi);
    return s;
}

inline double rel_diff(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

} // namespace spct::test
