#pragma once

#include <Eigen/Core>

#include <numbers>

#include "spct/image.hpp"

namespace spct {

struct Ray {
    Eigen::Vector2d source;
    Eigen::Vector2d target; // detector element center
};

// Circular fan-beam scan with a flat, equispaced detector. The image grid is
// centered on the isocenter; the source starts on the +x axis and rotates
// counter-clockwise.
class FanBeamGeometry {
public:
    struct Params {
        double sdd = 560.0;           // source to detector, mm
        double sod = 280.0;           // source to isocenter, mm
        int n_detectors = 0;          // 0 picks the smallest even count covering the image circle
        double detector_pitch = 0.225; // mm
        int n_views = 1080;
        double angular_range = 2.0 * std::numbers::pi;
        GridSpec grid { 256, 256, 1.0 };
    };

    FanBeamGeometry()
        : FanBeamGeometry(Params {})
    {
    }
    explicit FanBeamGeometry(const Params& p);

    double sdd() const { return p_.sdd; }
    double sod() const { return p_.sod; }
    int n_detectors() const { return p_.n_detectors; }
    double detector_pitch() const { return p_.detector_pitch; }
    int n_views() const { return p_.n_views; }
    double angular_range() const { return p_.angular_range; }
    const GridSpec& grid() const { return p_.grid; }
    const Params& params() const { return p_; }

    double view_angle(int view) const { return p_.angular_range * view / p_.n_views; }
    // Signed offset of detector element centers from the central ray, mm.
    double detector_offset(int det) const { return (det - 0.5 * (p_.n_detectors - 1)) * p_.detector_pitch; }
    Ray ray(int view, int det) const;

    // Radius of the circle inscribed in the image grid.
    double image_radius() const;
    static int minimal_detectors(const GridSpec& grid, double sdd, double sod, double pitch);

    bool operator==(const FanBeamGeometry& o) const;

private:
    Params p_;
};

// views x detectors planes, one per energy bin.
struct Sinogram {
    int n_views = 0;
    int n_detectors = 0;
    Stage stage = Stage::line_integral;
    std::vector<Image> bins;

    Sinogram() = default;
    Sinogram(int views, int detectors, int n_bins, Stage s)
        : n_views(views)
        , n_detectors(detectors)
        , stage(s)
        , bins(static_cast<std::size_t>(n_bins), Image::Zero(views, detectors))
    {
    }
    int num_bins() const { return static_cast<int>(bins.size()); }
};

} // namespace spct
