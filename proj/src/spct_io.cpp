#include "spct/spct_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace spct {

static_assert(std::endian::native == std::endian::little, "SPCT I/O assumes a little-endian host");

namespace {

std::vector<char> slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    return { std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>() };
}

template <typename T>
T get(const std::vector<char>& buf, std::size_t offset)
{
    T v;
    std::memcpy(&v, buf.data() + offset, sizeof v);
    return v;
}

template <typename T>
void put(std::vector<char>& buf, T v)
{
    const auto* p = reinterpret_cast<const char*>(&v);
    buf.insert(buf.end(), p, p + sizeof v);
}

} // namespace

const char* stage_name(Stage s)
{
    switch (s) {
    case Stage::counts: return "counts";
    case Stage::line_integral: return "line-integral";
    case Stage::image_mu: return "image-mu";
    case Stage::image_hu: return "image-hu";
    case Stage::concentration: return "concentration";
    }
    return "unknown";
}

SpctFile read_spct(const std::filesystem::path& path)
{
    const auto buf = slurp(path);
    const std::string where = path.string() + ": ";
    if (buf.size() < SpctFile::header_bytes)
        throw IoError(where + "truncated header: " + std::to_string(buf.size()) + " bytes, need "
                      + std::to_string(SpctFile::header_bytes));
    if (std::memcmp(buf.data(), "SPCT", 4) != 0)
        throw IoError(where + "bad magic at byte 0");
    const auto version = get<std::uint16_t>(buf, 4);
    if (version != SpctFile::version)
        throw IoError(where + "unsupported version " + std::to_string(version) + " at byte 4");
    const auto tag = get<std::uint8_t>(buf, 6);
    if (tag > static_cast<std::uint8_t>(Stage::concentration))
        throw IoError(where + "unknown stage tag " + std::to_string(tag) + " at byte 6");

    SpctFile f;
    f.stage = static_cast<Stage>(tag);
    f.width = get<std::uint32_t>(buf, 7);
    f.height = get<std::uint32_t>(buf, 11);
    f.bins = get<std::uint32_t>(buf, 15);
    f.pixel_size = get<double>(buf, 19);
    const std::uint64_t count = std::uint64_t(f.width) * f.height * f.bins;
    const std::uint64_t expected = SpctFile::header_bytes + 4 * count;
    if (buf.size() != expected)
        throw IoError(where + "payload length mismatch: expected " + std::to_string(expected) + " bytes, got "
                      + std::to_string(buf.size()) + " (payload starts at byte "
                      + std::to_string(SpctFile::header_bytes) + ")");
    f.payload.resize(count);
    std::memcpy(f.payload.data(), buf.data() + SpctFile::header_bytes, 4 * count);
    return f;
}

void write_spct(const std::filesystem::path& path, const SpctFile& f)
{
    if (f.payload.size() != std::size_t(f.width) * f.height * f.bins)
        throw DimensionError("write_spct: payload size does not match dimensions");
    std::vector<char> buf;
    buf.reserve(SpctFile::header_bytes + 4 * f.payload.size());
    buf.insert(buf.end(), { 'S', 'P', 'C', 'T' });
    put(buf, SpctFile::version);
    put(buf, static_cast<std::uint8_t>(f.stage));
    put(buf, f.width);
    put(buf, f.height);
    put(buf, f.bins);
    put(buf, f.pixel_size);
    const auto* p = reinterpret_cast<const char*>(f.payload.data());
    buf.insert(buf.end(), p, p + 4 * f.payload.size());

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out)
        throw IoError("write failed: " + path.string());
}

SpctFile to_spct(const SpectralImage& img, Stage stage)
{
    if (stage == Stage::counts || stage == Stage::line_integral)
        throw ValidationError(std::string("an image cannot carry stage ") + stage_name(stage));
    SpctFile f { stage, std::uint32_t(img.width()), std::uint32_t(img.height()), std::uint32_t(img.num_bins()),
                 img.grid.pixel_size, {} };
    f.payload.reserve(img.size());
    for (const auto& b : img.bins)
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x)
                f.payload.push_back(static_cast<float>(b(y, x)));
    return f;
}

SpctFile to_spct(const Sinogram& sino)
{
    if (sino.stage != Stage::counts && sino.stage != Stage::line_integral)
        throw ValidationError(std::string("a sinogram cannot carry stage ") + stage_name(sino.stage));
    SpctFile f { sino.stage, std::uint32_t(sino.n_views), std::uint32_t(sino.n_detectors),
                 std::uint32_t(sino.num_bins()), 0.0, {} };
    f.payload.reserve(std::size_t(sino.n_views) * sino.n_detectors * sino.num_bins());
    for (const auto& b : sino.bins)
        for (int d = 0; d < sino.n_detectors; ++d)
            for (int v = 0; v < sino.n_views; ++v)
                f.payload.push_back(static_cast<float>(b(v, d)));
    return f;
}

SpectralImage image_from_spct(const SpctFile& f)
{
    if (f.is_sinogram())
        throw ValidationError(std::string("expected an image, file holds stage ") + stage_name(f.stage));
    SpectralImage img(GridSpec { int(f.width), int(f.height), f.pixel_size }, int(f.bins));
    std::size_t i = 0;
    for (auto& b : img.bins)
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x)
                b(y, x) = f.payload[i++];
    return img;
}

Sinogram sinogram_from_spct(const SpctFile& f)
{
    if (!f.is_sinogram())
        throw ValidationError(std::string("expected a sinogram, file holds stage ") + stage_name(f.stage));
    Sinogram s(int(f.width), int(f.height), int(f.bins), f.stage);
    std::size_t i = 0;
    for (auto& b : s.bins)
        for (int d = 0; d < s.n_detectors; ++d)
            for (int v = 0; v < s.n_views; ++v)
                b(v, d) = f.payload[i++];
    return s;
}

CtImage read_raw_hu(const std::filesystem::path& path, const GridSpec& grid)
{
    const auto buf = slurp(path);
    const std::size_t expected = 4 * grid.pixels();
    if (buf.size() != expected)
        throw IoError(path.string() + ": raw HU length mismatch: expected " + std::to_string(expected)
                      + " bytes, got " + std::to_string(buf.size()));
    CtImage ct { grid, Image(grid.height, grid.width) };
    for (int y = 0, i = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x, ++i)
            ct.hu(y, x) = get<float>(buf, 4 * std::size_t(i));
    return ct;
}

} // namespace spct
