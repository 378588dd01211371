#include "spct/dataset.hpp"

#include <cstdio>
#include <fstream>

#include "spct/spct_io.hpp"

namespace spct {

namespace {

std::string numbered(const char* prefix, int id, const char* suffix)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%04d%s", prefix, id, suffix);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text))
        throw IoError("cannot write " + path.string());
}

} // namespace

SimulatedScan simulate_scan(const MaterialMaps& maps, const FanBeamGeometry& geom, const SimConfig& cfg)
{
    const Sinogram counts = spectral_counts(maps, geom, cfg);
    std::vector<AttenuationTable> tables;
    for (const auto& c : maps.components)
        tables.push_back(c.table);
    SimulatedScan scan;
    scan.flux = PolychromaticModel(cfg, tables).flux();
    scan.clean = log_normalize(counts, scan.flux, cfg.z_floor);
    scan.noisy = cfg.noise ? log_normalize(add_poisson(counts, cfg.seed), scan.flux, cfg.z_floor) : scan.clean;
    return scan;
}

std::vector<int> patch_offsets(int extent, int size, int stride)
{
    if (size < 1 || stride < 1)
        throw ValidationError("patch size and stride must be positive");
    if (size > extent)
        throw ValidationError("patch size " + std::to_string(size) + " exceeds image extent "
                              + std::to_string(extent));
    std::vector<int> out;
    for (int o = 0; o + size <= extent; o += stride)
        out.push_back(o);
    return out;
}

SpectralImage extract_patch(const SpectralImage& img, int row, int col, int size)
{
    if (row < 0 || col < 0 || row + size > img.height() || col + size > img.width())
        throw OutOfRangeError("patch outside the image");
    SpectralImage p(GridSpec { size, size, img.grid.pixel_size }, img.num_bins());
    for (int m = 0; m < img.num_bins(); ++m)
        p[m] = img[m].block(row, col, size, size);
    return p;
}

DatasetManifest generate_dataset(const std::vector<MaterialMaps>& inputs, const FanBeamGeometry& geom,
                                 const SimConfig& cfg, const DatasetOptions& opts,
                                 const std::filesystem::path& out_dir)
{
    if (inputs.empty())
        throw ValidationError("generate_dataset: no input images");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    if (opts.patch_size > 0) {
        std::filesystem::create_directories(out_dir / "patches", ec);
        if (ec)
            throw IoError("cannot create " + (out_dir / "patches").string() + ": " + ec.message());
    }

    DatasetManifest man;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const int id = static_cast<int>(i);
        SimConfig c = cfg;
        c.seed = cfg.seed + i;
        const SimulatedScan scan = simulate_scan(inputs[i], geom, c);
        const SpectralImage clean = fbp(scan.clean, geom, opts.fbp);
        const SpectralImage noisy = fbp(scan.noisy, geom, opts.fbp);

        ManifestRow row { id, numbered("clean_", id, ".spct"), numbered("noisy_", id, ".spct"), c.seed,
                          opts.config_hash };
        write_spct(out_dir / row.clean_path, to_spct(clean, Stage::image_mu));
        write_spct(out_dir / row.noisy_path, to_spct(noisy, Stage::image_mu));
        man.rows.push_back(row);

        if (opts.patch_size <= 0)
            continue;
        int k = 0;
        for (int r : patch_offsets(clean.height(), opts.patch_size, opts.patch_stride))
            for (int col : patch_offsets(clean.width(), opts.patch_size, opts.patch_stride)) {
                const std::string stem = numbered("patches/", id, "_") + std::to_string(k);
                PatchRow pr { id, k, r, col, stem + "_clean.spct", stem + "_noisy.spct" };
                write_spct(out_dir / pr.clean_path,
                           to_spct(extract_patch(clean, r, col, opts.patch_size), Stage::image_mu));
                write_spct(out_dir / pr.noisy_path,
                           to_spct(extract_patch(noisy, r, col, opts.patch_size), Stage::image_mu));
                man.patches.push_back(pr);
                ++k;
            }
    }

    std::string text = "id,clean_path,noisy_path,seed,config_hash\n";
    for (const auto& r : man.rows)
        text += std::to_string(r.id) + ',' + r.clean_path + ',' + r.noisy_path + ',' + std::to_string(r.seed) + ','
            + r.config_hash + '\n';
    write_text(out_dir / "manifest.csv", text);
    if (opts.patch_size > 0) {
        std::string pt = "id,patch,row,col,clean_path,noisy_path\n";
        for (const auto& p : man.patches)
            pt += std::to_string(p.id) + ',' + std::to_string(p.patch) + ',' + std::to_string(p.row) + ','
                + std::to_string(p.col) + ',' + p.clean_path + ',' + p.noisy_path + '\n';
        write_text(out_dir / "patches.csv", pt);
    }
    return man;
}

DatasetManifest generate_dataset(const std::vector<CtImage>& ct_images, const FanBeamGeometry& geom,
                                 const SimConfig& cfg, const DatasetOptions& opts,
                                 const std::filesystem::path& out_dir)
{
    std::vector<MaterialMaps> maps;
    for (const auto& ct : ct_images)
        maps.push_back(segment_ct(ct, opts.segmentation));
    return generate_dataset(maps, geom, cfg, opts, out_dir);
}

} // namespace spct
