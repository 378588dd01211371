#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "spct/image.hpp"

namespace spct {

// Linear display window: lo maps to 0, hi to 255, clamped, rounded half up.
std::vector<std::uint8_t> window_image(const Image& img, double lo, double hi);

// 8-bit grayscale PNG of the windowed image.
void write_png(const Image& img, double lo, double hi, const std::filesystem::path& path);

} // namespace spct
