#include "spct/roi.hpp"

#include <fstream>
#include <sstream>

namespace spct {

Mask Roi::mask(const GridSpec& grid) const
{
    Mask m = Mask::Constant(grid.height, grid.width, false);
    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x) {
            const double cx = x + 0.5, cy = y + 0.5;
            if (shape == Shape::circle) {
                const double dx = cx - params[0], dy = cy - params[1];
                m(y, x) = dx * dx + dy * dy <= params[2] * params[2];
            } else {
                m(y, x) = cx >= params[0] && cx <= params[2] && cy >= params[1] && cy <= params[3];
            }
        }
    return m;
}

std::vector<Roi> parse_rois(const std::string& text, const std::string& source)
{
    std::vector<Roi> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#')
            continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ','))
            fields.push_back(f);
        if (fields.size() < 2)
            throw ParseError(source, lineno, "expected name,shape,params...");
        Roi roi;
        roi.name = fields[0];
        std::size_t expected = 0;
        if (fields[1] == "circle") {
            roi.shape = Roi::Shape::circle;
            expected = 3;
        } else if (fields[1] == "rect") {
            roi.shape = Roi::Shape::rect;
            expected = 4;
        } else {
            throw ParseError(source, lineno, "unknown ROI shape '" + fields[1] + "'");
        }
        if (fields.size() != expected + 2)
            throw ParseError(source, lineno, "wrong number of parameters for " + fields[1]);
        for (std::size_t i = 2; i < fields.size(); ++i) {
            try {
                std::size_t used = 0;
                roi.params.push_back(std::stod(fields[i], &used));
            } catch (const std::exception&) {
                throw ParseError(source, lineno, "non-numeric parameter '" + fields[i] + "'");
            }
        }
        out.push_back(std::move(roi));
    }
    return out;
}

std::vector<Roi> load_rois(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_rois(buf.str(), path.string());
}

void save_rois(const std::filesystem::path& path, const std::vector<Roi>& rois)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    for (const auto& r : rois) {
        out << r.name << ',' << (r.shape == Roi::Shape::circle ? "circle" : "rect");
        for (double p : r.params)
            out << ',' << p;
        out << '\n';
    }
}

} // namespace spct
