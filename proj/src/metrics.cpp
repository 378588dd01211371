#include "spct/metrics.hpp"

#include <cmath>

namespace spct {

namespace {

void check_dims(const Image& a, const Image& b, const char* what)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError(std::string(what) + ": shape mismatch");
}

Eigen::ArrayXd gaussian_kernel(int size, double sigma)
{
    Eigen::ArrayXd k(size);
    const double c = 0.5 * (size - 1);
    for (int i = 0; i < size; ++i)
        k(i) = std::exp(-0.5 * (i - c) * (i - c) / (sigma * sigma));
    return k / k.sum();
}

// Separable 'valid' filtering.
Image filter_valid(const Image& img, const Eigen::ArrayXd& k)
{
    const Eigen::Index n = k.size();
    const Eigen::Index h = img.rows() - n + 1, w = img.cols() - n + 1;
    Image rows = Image::Zero(h, img.cols());
    for (Eigen::Index i = 0; i < n; ++i)
        rows += k(i) * img.middleRows(i, h);
    Image out = Image::Zero(h, w);
    for (Eigen::Index i = 0; i < n; ++i)
        out += k(i) * rows.middleCols(i, w);
    return out;
}

} // namespace

double rmse(const Image& x, const Image& ref)
{
    check_dims(x, ref, "rmse");
    return std::sqrt((x - ref).square().mean());
}

double ssim(const Image& x, const Image& ref, double dynamic_range, const SsimParams& params)
{
    check_dims(x, ref, "ssim");
    if (!(dynamic_range > 0.0))
        throw ValidationError("ssim: dynamic range must be positive");
    if (x.rows() < params.window || x.cols() < params.window)
        throw DimensionError("ssim: image smaller than the window");
    const auto k = gaussian_kernel(params.window, params.sigma);
    const double c1 = std::pow(params.k1 * dynamic_range, 2);
    const double c2 = std::pow(params.k2 * dynamic_range, 2);

    const Image mx = filter_valid(x, k);
    const Image my = filter_valid(ref, k);
    const Image sxx = filter_valid(x.square(), k) - mx.square();
    const Image syy = filter_valid(ref.square(), k) - my.square();
    const Image sxy = filter_valid(x * ref, k) - mx * my;
    const Image map = ((2.0 * mx * my + c1) * (2.0 * sxy + c2))
        / ((mx.square() + my.square() + c1) * (sxx + syy + c2));
    return map.mean();
}

double psnr(const Image& x, const Image& ref, double peak)
{
    check_dims(x, ref, "psnr");
    if (!(peak > 0.0))
        throw ValidationError("psnr: peak must be positive");
    const double mse = (x - ref).square().mean();
    if (mse == 0.0)
        return psnr_infinite;
    return 10.0 * std::log10(peak * peak / mse);
}

double relative_bias(const Image& x, const Image& ref, const Mask& mask)
{
    check_dims(x, ref, "relative_bias");
    if (mask.rows() != x.rows() || mask.cols() != x.cols())
        throw DimensionError("relative_bias: mask shape mismatch");
    double acc = 0.0;
    long count = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!mask(i))
            continue;
        if (ref(i) == 0.0)
            throw ValidationError("relative_bias: reference is zero inside the ROI");
        acc += std::abs(x(i) - ref(i)) / ref(i);
        ++count;
    }
    if (count == 0)
        throw ValidationError("relative_bias: empty ROI");
    return 100.0 * acc / count;
}

} // namespace spct
