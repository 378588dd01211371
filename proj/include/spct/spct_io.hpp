#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "spct/geometry.hpp"

namespace spct {

// On-disk layout, little-endian:
//   "SPCT" | u16 version | u8 stage | u32 width | u32 height | u32 bins |
//   f64 pixel_size | f32 payload[bins][height][width]
// Images fill width/height with columns/rows. Sinograms put views in the
// width slot and detectors in the height slot, so views run fastest.
struct SpctFile {
    static constexpr std::uint16_t version = 1;
    static constexpr std::size_t header_bytes = 27;

    Stage stage = Stage::image_mu;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint32_t bins = 0;
    double pixel_size = 1.0;
    std::vector<float> payload;

    bool is_sinogram() const { return stage == Stage::counts || stage == Stage::line_integral; }
};

SpctFile read_spct(const std::filesystem::path& path);
void write_spct(const std::filesystem::path& path, const SpctFile& file);

// Conversions between the file record and typed objects. Converting the
// wrong kind throws ValidationError naming the stage.
SpctFile to_spct(const SpectralImage& img, Stage stage);
SpctFile to_spct(const Sinogram& sino);
SpectralImage image_from_spct(const SpctFile& file);
Sinogram sinogram_from_spct(const SpctFile& file);

const char* stage_name(Stage s);

// Headerless little-endian f32 HU slice, row-major.
CtImage read_raw_hu(const std::filesystem::path& path, const GridSpec& grid);

} // namespace spct
