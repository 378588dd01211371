#include "spct/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

namespace spct {

namespace {

const std::map<std::string, std::string>& defaults()
{
    static const std::map<std::string, std::string> d {
        { "geometry.sdd", "560" },
        { "geometry.sod", "280" },
        { "geometry.n_detectors", "0" },
        { "geometry.detector_pitch", "0.225" },
        { "geometry.n_views", "1080" },
        { "geometry.angular_range", "6.283185307179586" },
        { "geometry.width", "256" },
        { "geometry.height", "256" },
        { "geometry.pixel_size", "1" },
        { "spectrum.path", "" },
        { "bins.edges", "19,26,36,46,60,120" },
        { "sim.i0_per_ray", "4096" },
        { "sim.energy_step", "1" },
        { "sim.noise", "true" },
        { "sim.seed", "0" },
        { "sim.z_floor", "0.5" },
        { "segment.t_soft_hu", "100" },
        { "segment.t_bone_hu", "400" },
        { "segment.numerator", "attenuation" },
        { "segment.density_bone", "1.92" },
        { "segment.density_soft", "1" },
        { "segment.reference_kev", "60" },
        { "fbp.filter", "hann" },
        { "fbp.interpolation", "linear" },
        { "tvm.lambda", "1.5" },
        { "tvm.n_iters", "50" },
        { "tvm.tv_steps", "10" },
        { "tvm.tv_step_size", "1" },
        { "tvm.sart_relaxation", "1" },
        { "tvm.subsets", "4" },
        { "loss.p", "1.2" },
        { "loss.gamma", "1" },
        { "loss.beta1", "1" },
        { "loss.beta2", "1" },
        { "loss.w", "0.1" },
        { "loss.epsilon", "0.0001" },
        { "denoise.n_epochs", "50" },
        { "denoise.inner_steps", "20" },
        { "denoise.lr0", "0.001" },
        { "denoise.decay", "0.9" },
        { "denoise.alpha1", "0.9" },
        { "denoise.alpha2", "0.999" },
        { "denoise.scale", "0" },
        { "dataset.source", "vials" },
        { "dataset.patch_size", "0" },
        { "dataset.patch_stride", "64" },
        { "phantom.body_radius", "32" },
        { "phantom.ring_radius", "21" },
        { "phantom.vial_radius", "3.6" },
        { "decompose.materials", "water,iodine,gadolinium" },
        { "evaluate.units", "hu" },
        { "evaluate.dynamic_range", "0" },
    };
    return d;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Trims the value and the items of comma-separated lists.
std::string normalize_value(const std::string& v)
{
    std::string out;
    std::stringstream ss(trim(v));
    std::string item;
    bool first = true;
    while (std::getline(ss, item, ',')) {
        if (!first)
            out += ',';
        out += trim(item);
        first = false;
    }
    return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* kind)
{
    throw ValidationError("config: " + key + " = '" + value + "' is not " + kind);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value, const char* kind)
{
    T out {};
    const auto* end = value.data() + value.size();
    const auto res = std::from_chars(value.data(), end, out);
    if (value.empty() || res.ec != std::errc {} || res.ptr != end)
        bad_value(key, value, kind);
    return out;
}

template <typename E>
E choose(const RunConfig& cfg, const std::string& key, std::initializer_list<std::pair<const char*, E>> choices)
{
    const auto& v = cfg.get(key);
    for (const auto& [name, e] : choices)
        if (v == name)
            return e;
    bad_value(key, v, "a recognised option");
}

} // namespace

RunConfig::RunConfig()
    : values_(defaults())
{
}

std::vector<std::string> RunConfig::known_keys()
{
    std::vector<std::string> keys;
    for (const auto& [k, v] : defaults())
        keys.push_back(k);
    return keys;
}

RunConfig RunConfig::parse(const std::string& text, const std::string& source)
{
    RunConfig cfg;
    std::map<std::string, std::size_t> seen;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError(source, lineno, "expected 'section.key = value'");
        const std::string key = trim(t.substr(0, eq));
        if (!defaults().contains(key))
            throw ParseError(source, lineno, "unknown key '" + key + "'");
        if (auto it = seen.find(key); it != seen.end())
            throw ParseError(source, lineno, "duplicate key '" + key + "' (first on line " + std::to_string(it->second) + ")");
        seen[key] = lineno;
        cfg.values_[key] = normalize_value(t.substr(eq + 1));
    }
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

void RunConfig::set_override(const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ValidationError("--set expects section.key=value, got '" + assignment + "'");
    set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void RunConfig::set(const std::string& key, const std::string& value)
{
    if (!defaults().contains(key))
        throw ValidationError("config: unknown key '" + key + "'");
    values_[key] = normalize_value(value);
}

const std::string& RunConfig::get(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end())
        throw ValidationError("config: unknown key '" + key + "'");
    return it->second;
}

double RunConfig::get_double(const std::string& key) const
{
    return parse_number<double>(key, get(key), "a number");
}

long long RunConfig::get_int(const std::string& key) const
{
    return parse_number<long long>(key, get(key), "an integer");
}

std::uint64_t RunConfig::get_u64(const std::string& key) const
{
    return parse_number<std::uint64_t>(key, get(key), "a non-negative integer");
}

bool RunConfig::get_bool(const std::string& key) const
{
    const auto& v = get(key);
    if (v == "true" || v == "1" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "off")
        return false;
    bad_value(key, v, "a boolean");
}

std::vector<double> RunConfig::get_list(const std::string& key) const
{
    std::vector<double> out;
    for (const auto& w : get_words(key))
        out.push_back(parse_number<double>(key, w, "a list of numbers"));
    return out;
}

std::vector<std::string> RunConfig::get_words(const std::string& key) const
{
    std::vector<std::string> out;
    std::stringstream ss(get(key));
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(item);
    return out;
}

std::string RunConfig::canonical() const
{
    std::string out;
    for (const auto& [k, v] : values_)
        out += k + " = " + v + "\n";
    return out;
}

std::string RunConfig::hash() const
{
    return sha256_hex(canonical());
}

std::string sha256_hex(const std::string& data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    std::ostringstream s;
    for (unsigned int i = 0; i < len; ++i)
        s << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return s.str();
}

FanBeamGeometry geometry_from(const RunConfig& cfg)
{
    FanBeamGeometry::Params p;
    p.sdd = cfg.get_double("geometry.sdd");
    p.sod = cfg.get_double("geometry.sod");
    p.n_detectors = static_cast<int>(cfg.get_int("geometry.n_detectors"));
    p.detector_pitch = cfg.get_double("geometry.detector_pitch");
    p.n_views = static_cast<int>(cfg.get_int("geometry.n_views"));
    p.angular_range = cfg.get_double("geometry.angular_range");
    p.grid = { static_cast<int>(cfg.get_int("geometry.width")), static_cast<int>(cfg.get_int("geometry.height")),
               cfg.get_double("geometry.pixel_size") };
    return FanBeamGeometry(p);
}

SimConfig sim_from(const RunConfig& cfg)
{
    SimConfig s;
    if (const auto& path = cfg.get("spectrum.path"); !path.empty())
        s.spectrum = load_spectrum(path);
    s.bins = EnergyBins(cfg.get_list("bins.edges"));
    s.i0_per_ray = cfg.get_double("sim.i0_per_ray");
    s.energy_step = cfg.get_double("sim.energy_step");
    s.noise = cfg.get_bool("sim.noise");
    s.seed = cfg.get_u64("sim.seed");
    s.z_floor = cfg.get_double("sim.z_floor");
    if (!(s.i0_per_ray > 0.0))
        throw ValidationError("config: sim.i0_per_ray must be positive");
    if (!(s.energy_step > 0.0))
        throw ValidationError("config: sim.energy_step must be positive");
    if (!(s.z_floor > 0.0))
        throw ValidationError("config: sim.z_floor must be positive");
    return s;
}

SegmentationParams segmentation_from(const RunConfig& cfg)
{
    SegmentationParams p;
    p.t_soft_hu = cfg.get_double("segment.t_soft_hu");
    p.t_bone_hu = cfg.get_double("segment.t_bone_hu");
    p.numerator = choose<WeightNumerator>(cfg, "segment.numerator",
                                          { { "attenuation", WeightNumerator::attenuation },
                                            { "ct_value", WeightNumerator::ct_value } });
    p.split.density_bone = cfg.get_double("segment.density_bone");
    p.split.density_soft = cfg.get_double("segment.density_soft");
    p.split.reference_kev = cfg.get_double("segment.reference_kev");
    return p;
}

FbpConfig fbp_from(const RunConfig& cfg)
{
    FbpConfig f;
    f.filter = choose<RampFilter>(cfg, "fbp.filter", { { "ramp", RampFilter::ramp }, { "hann", RampFilter::hann } });
    f.interpolation = choose<Interpolation>(cfg, "fbp.interpolation",
                                            { { "nearest", Interpolation::nearest },
                                              { "linear", Interpolation::linear } });
    return f;
}

TvmConfig tvm_from(const RunConfig& cfg)
{
    TvmConfig t;
    t.lambda = cfg.get_double("tvm.lambda");
    t.n_iters = static_cast<int>(cfg.get_int("tvm.n_iters"));
    t.tv_steps = static_cast<int>(cfg.get_int("tvm.tv_steps"));
    t.tv_step_size = cfg.get_double("tvm.tv_step_size");
    t.sart_relaxation = cfg.get_double("tvm.sart_relaxation");
    t.subsets = static_cast<int>(cfg.get_int("tvm.subsets"));
    return t;
}

DenoiseConfig denoise_from(const RunConfig& cfg)
{
    DenoiseConfig d;
    d.loss.p = cfg.get_double("loss.p");
    d.loss.gamma = cfg.get_double("loss.gamma");
    d.loss.beta1 = cfg.get_double("loss.beta1");
    d.loss.beta2 = cfg.get_double("loss.beta2");
    d.loss.w = cfg.get_double("loss.w");
    d.loss.epsilon = cfg.get_double("loss.epsilon");
    d.n_epochs = static_cast<int>(cfg.get_int("denoise.n_epochs"));
    d.inner_steps = static_cast<int>(cfg.get_int("denoise.inner_steps"));
    d.lr0 = cfg.get_double("denoise.lr0");
    d.decay = cfg.get_double("denoise.decay");
    d.alpha1 = cfg.get_double("denoise.alpha1");
    d.alpha2 = cfg.get_double("denoise.alpha2");
    d.scale = cfg.get_double("denoise.scale");
    d.validate();
    return d;
}

VialPhantomParams vial_params_from(const RunConfig& cfg)
{
    VialPhantomParams p;
    p.grid = geometry_from(cfg).grid();
    p.body_radius = cfg.get_double("phantom.body_radius");
    p.ring_radius = cfg.get_double("phantom.ring_radius");
    p.vial_radius = cfg.get_double("phantom.vial_radius");
    return p;
}

} // namespace spct
