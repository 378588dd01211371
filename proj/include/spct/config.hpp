#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "spct/denoiser.hpp"
#include "spct/geometry.hpp"
#include "spct/materials.hpp"
#include "spct/phantom.hpp"
#include "spct/recon.hpp"
#include "spct/simulator.hpp"

namespace spct {

// Flat `section.key = value` configuration. Every known key has a default;
// parsing rejects unknown keys, duplicates and malformed lines.
class RunConfig {
public:
    RunConfig(); // all defaults

    static RunConfig parse(const std::string& text, const std::string& source = "<config>");
    static RunConfig load(const std::filesystem::path& path);

    // Applies "section.key=value".
    void set_override(const std::string& assignment);
    void set(const std::string& key, const std::string& value);

    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_list(const std::string& key) const;
    std::vector<std::string> get_words(const std::string& key) const;

    // Sorted "key = value" lines covering every key.
    std::string canonical() const;
    // Lowercase hex SHA-256 of canonical().
    std::string hash() const;

    static std::vector<std::string> known_keys();

private:
    std::map<std::string, std::string> values_;
};

std::string sha256_hex(const std::string& data);

FanBeamGeometry geometry_from(const RunConfig& cfg);
SimConfig sim_from(const RunConfig& cfg);
SegmentationParams segmentation_from(const RunConfig& cfg);
FbpConfig fbp_from(const RunConfig& cfg);
TvmConfig tvm_from(const RunConfig& cfg);
DenoiseConfig denoise_from(const RunConfig& cfg);
VialPhantomParams vial_params_from(const RunConfig& cfg);

} // namespace spct
