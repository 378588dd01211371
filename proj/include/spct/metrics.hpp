#pragma once

#include <limits>

#include "spct/image.hpp"

namespace spct {

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

double rmse(const Image& x, const Image& ref);

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
};

// Mean SSIM over all fully contained Gaussian windows.
double ssim(const Image& x, const Image& ref, double dynamic_range, const SsimParams& params = {});

inline constexpr double psnr_infinite = std::numeric_limits<double>::infinity();

// 10 log10(peak^2 / MSE); psnr_infinite when the images match.
double psnr(const Image& x, const Image& ref, double peak);

// Mean of |x - ref| / ref over the mask, in percent.
double relative_bias(const Image& x, const Image& ref, const Mask& mask);

} // namespace spct
