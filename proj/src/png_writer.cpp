#include "spct/png_writer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include <png.h>

namespace spct {

std::vector<std::uint8_t> window_image(const Image& img, double lo, double hi)
{
    if (!(lo < hi))
        throw ValidationError("png window: lo must be below hi");
    std::vector<std::uint8_t> px;
    px.reserve(static_cast<std::size_t>(img.size()));
    for (Eigen::Index y = 0; y < img.rows(); ++y)
        for (Eigen::Index x = 0; x < img.cols(); ++x) {
            const double v = std::floor(255.0 * (img(y, x) - lo) / (hi - lo) + 0.5);
            px.push_back(static_cast<std::uint8_t>(std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 255.0)));
        }
    return px;
}

void write_png(const Image& img, double lo, double hi, const std::filesystem::path& path)
{
    const auto px = window_image(img, lo, hi);
    std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!fp)
        throw IoError("cannot write " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng failed writing " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.cols()), static_cast<png_uint_32>(img.rows()), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (Eigen::Index y = 0; y < img.rows(); ++y)
        png_write_row(png, const_cast<png_bytep>(px.data() + y * img.cols()));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace spct
