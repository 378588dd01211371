#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "spct/geometry.hpp"

namespace spct {

enum class RampFilter { ramp, hann };
enum class Interpolation { nearest, linear };

struct FbpConfig {
    RampFilter filter = RampFilter::hann;
    Interpolation interpolation = Interpolation::linear;
};

// Fan-beam FBP for a flat detector over a full 2*pi scan, one bin at a time.
Image fbp(const Image& sino, const FanBeamGeometry& geom, const FbpConfig& cfg = {});
SpectralImage fbp(const Sinogram& sino, const FanBeamGeometry& geom, const FbpConfig& cfg = {});

// Frequency response of the discrete ramp filter on a virtual detector with
// the given spacing, zero-padded to n_fft samples.
std::vector<double> ramp_response(int n_fft, double spacing, RampFilter filter);

struct TvmConfig {
    double lambda = 1.5;         // TV step relative to the data-step size
    int n_iters = 50;
    int tv_steps = 10;
    double tv_step_size = 1.0;   // initial descent step, shrinks x0.995 per step
    double sart_relaxation = 1.0;
    int subsets = 4;             // ordered subsets per SART sweep
};

struct TvmLogEntry {
    int iter;
    double data_residual; // 0.5 * ||A mu - p||^2 after the iteration
    double tv_value;
};

// Alternates an OS-SART data-consistency sweep, a nonnegativity clamp and
// normalized steepest descent on isotropic TV, independently per bin.
// When log is non-null the exact data residual is recomputed every
// iteration (one extra forward projection).
Image tvm_reconstruct(const Image& sino, const FanBeamGeometry& geom, const TvmConfig& cfg,
                      const Image* init = nullptr, std::vector<TvmLogEntry>* log = nullptr);
SpectralImage tvm_reconstruct(const Sinogram& sino, const FanBeamGeometry& geom, const TvmConfig& cfg,
                              const SpectralImage* init = nullptr,
                              std::vector<std::vector<TvmLogEntry>>* logs = nullptr);

// Isotropic total variation with smoothing, and its gradient.
double isotropic_tv(const Image& img, double smoothing = 1e-8);
Image isotropic_tv_gradient(const Image& img, double smoothing = 1e-8);

} // namespace spct
