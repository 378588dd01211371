#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spct/metrics.hpp"

namespace spct {

// Region of interest in pixel coordinates (column x, row y, pixel centers at
// integer + 0.5). Text form, one per line:
//   name,circle,cx,cy,radius
//   name,rect,x0,y0,x1,y1
struct Roi {
    enum class Shape { circle, rect };
    std::string name;
    Shape shape = Shape::circle;
    std::vector<double> params;

    Mask mask(const GridSpec& grid) const;
};

std::vector<Roi> parse_rois(const std::string& text, const std::string& source = "<rois>");
std::vector<Roi> load_rois(const std::filesystem::path& path);
void save_rois(const std::filesystem::path& path, const std::vector<Roi>& rois);

} // namespace spct
