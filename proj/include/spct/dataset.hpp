#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spct/geometry.hpp"
#include "spct/materials.hpp"
#include "spct/recon.hpp"
#include "spct/simulator.hpp"

namespace spct {

// Noise-free and noisy line integrals of one object, with the bin fluxes
// used for the log.
struct SimulatedScan {
    Sinogram clean;
    Sinogram noisy;
    std::vector<double> flux;
};

// spectral_counts, Poisson noise under cfg.seed (skipped when cfg.noise is
// off, in which case noisy equals clean), log_normalize.
SimulatedScan simulate_scan(const MaterialMaps& maps, const FanBeamGeometry& geom, const SimConfig& cfg);

struct DatasetOptions {
    SegmentationParams segmentation;
    FbpConfig fbp;
    int patch_size = 0; // 0 disables patch extraction
    int patch_stride = 64;
    std::string config_hash;
};

struct ManifestRow {
    int id;
    std::string clean_path; // relative to the output directory
    std::string noisy_path;
    std::uint64_t seed;
    std::string config_hash;
};

struct PatchRow {
    int id;
    int patch;
    int row;
    int col;
    std::string clean_path;
    std::string noisy_path;
};

struct DatasetManifest {
    std::vector<ManifestRow> rows;
    std::vector<PatchRow> patches;
};

// Top-left corners of the size x size windows at the given stride.
std::vector<int> patch_offsets(int extent, int size, int stride);
SpectralImage extract_patch(const SpectralImage& img, int row, int col, int size);

// Writes clean_<id>.spct / noisy_<id>.spct (stage image-mu) per input, and
// manifest.csv (plus patches/ and patches.csv in patch mode). Input i is
// simulated with seed cfg.seed + i.
DatasetManifest generate_dataset(const std::vector<MaterialMaps>& inputs, const FanBeamGeometry& geom,
                                 const SimConfig& cfg, const DatasetOptions& opts,
                                 const std::filesystem::path& out_dir);
DatasetManifest generate_dataset(const std::vector<CtImage>& ct_images, const FanBeamGeometry& geom,
                                 const SimConfig& cfg, const DatasetOptions& opts,
                                 const std::filesystem::path& out_dir);

} // namespace spct
