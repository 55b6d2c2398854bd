#include "core/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "core/error.hpp"
#include "core/metrics.hpp"

namespace sdgf {

namespace {

struct KeyEntry {
    const char* key;
    const char* doc;
    std::function<void(PipelineConfig&, const std::string&)> set;
    std::function<std::string(const PipelineConfig&)> get;
};

[[noreturn]] void reject(const std::string& key, const std::string& value,
                         const std::string& why) {
    fail_config("key '" + key + "': value '" + value + "' rejected: " + why);
}

int parse_int(const std::string& key, const std::string& value) {
    int out{};
    const auto* end = value.data() + value.size();
    auto [p, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || p != end) reject(key, value, "not an integer");
    return out;
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
    uint64_t out{};
    const auto* end = value.data() + value.size();
    auto [p, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || p != end) reject(key, value, "not an unsigned integer");
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const double out = std::stod(value, &pos);
        if (pos != value.size()) reject(key, value, "not a number");
        return out;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        reject(key, value, "not a number");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "on" || value == "yes") return true;
    if (value == "0" || value == "false" || value == "off" || value == "no") return false;
    reject(key, value, "expected a boolean (true/false/1/0/on/off)");
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

const std::vector<KeyEntry>& registry() {
    static const std::vector<KeyEntry> entries = {
        {"threads", "worker threads (0 = hardware concurrency)",
         [](PipelineConfig& c, const std::string& v) {
             const int t = parse_int("threads", v);
             if (t < 0) reject("threads", v, "must be >= 0");
             c.threads = t;
         },
         [](const PipelineConfig& c) { return std::to_string(c.threads); }},
        {"seed", "RNG seed for hint sampling and textures",
         [](PipelineConfig& c, const std::string& v) { c.seed = parse_u64("seed", v); },
         [](const PipelineConfig& c) { return std::to_string(c.seed); }},
        {"rig.baseline_m", "stereo baseline in meters",
         [](PipelineConfig& c, const std::string& v) {
             const double b = parse_double("rig.baseline_m", v);
             if (!(b > 0)) reject("rig.baseline_m", v, "must be positive");
             c.rig.baseline_m = b;
         },
         [](const PipelineConfig& c) { return fmt(c.rig.baseline_m); }},
        {"rig.focal_px", "focal length in pixels",
         [](PipelineConfig& c, const std::string& v) {
             const double f = parse_double("rig.focal_px", v);
             if (!(f > 0)) reject("rig.focal_px", v, "must be positive");
             c.rig.focal_px = f;
         },
         [](const PipelineConfig& c) { return fmt(c.rig.focal_px); }},
        {"census_window", "census window size (odd, >= 3)",
         [](PipelineConfig& c, const std::string& v) {
             const int w = parse_int("census_window", v);
             if (w < 3 || w % 2 == 0) reject("census_window", v, "must be odd and >= 3");
             c.features.census_window = w;
         },
         [](const PipelineConfig& c) { return std::to_string(c.features.census_window); }},
        {"context_radii", "comma-separated box-mean radii in pixels",
         [](PipelineConfig& c, const std::string& v) {
             std::vector<int> radii;
             std::istringstream ss(v);
             std::string item;
             while (std::getline(ss, item, ',')) {
                 const int r = parse_int("context_radii", item);
                 if (r < 1) reject("context_radii", v, "radii must be >= 1");
                 radii.push_back(r);
             }
             if (radii.empty()) reject("context_radii", v, "needs at least one radius");
             c.features.context_radii = radii;
         },
         [](const PipelineConfig& c) {
             std::string s;
             for (size_t i = 0; i < c.features.context_radii.size(); ++i) {
                 if (i) s += ",";
                 s += std::to_string(c.features.context_radii[i]);
             }
             return s;
         }},
        {"cost.census_w", "census term weight",
         [](PipelineConfig& c, const std::string& v) {
             const double w = parse_double("cost.census_w", v);
             if (w < 0) reject("cost.census_w", v, "must be >= 0");
             c.cost.census_w = static_cast<float>(w);
         },
         [](const PipelineConfig& c) { return fmt(c.cost.census_w); }},
        {"cost.grad_w", "gradient term weight",
         [](PipelineConfig& c, const std::string& v) {
             const double w = parse_double("cost.grad_w", v);
             if (w < 0) reject("cost.grad_w", v, "must be >= 0");
             c.cost.grad_w = static_cast<float>(w);
         },
         [](const PipelineConfig& c) { return fmt(c.cost.grad_w); }},
        {"cost.max_cost", "matching cost ceiling",
         [](PipelineConfig& c, const std::string& v) {
             const double m = parse_double("cost.max_cost", v);
             if (!(m > 0)) reject("cost.max_cost", v, "must be positive");
             c.cost.max_cost = static_cast<float>(m);
         },
         [](const PipelineConfig& c) { return fmt(c.cost.max_cost); }},
        {"propagation.window", "propagation window P (odd, >= 3)",
         [](PipelineConfig& c, const std::string& v) {
             const int w = parse_int("propagation.window", v);
             if (w < 3 || w % 2 == 0) reject("propagation.window", v, "must be odd and >= 3");
             c.prop_window = w;
         },
         [](const PipelineConfig& c) { return std::to_string(c.prop_window); }},
        {"propagation.dilation", "window dilation in pixels (>= 1)",
         [](PipelineConfig& c, const std::string& v) {
             const int d = parse_int("propagation.dilation", v);
             if (d < 1) reject("propagation.dilation", v, "must be >= 1");
             c.prop_dilation = d;
         },
         [](const PipelineConfig& c) { return std::to_string(c.prop_dilation); }},
        {"propagation.offset_source", "zero | edge_aware | external:PATH",
         [](PipelineConfig& c, const std::string& v) {
             if (v != "zero" && v != "edge_aware" && v.rfind("external:", 0) != 0)
                 reject("propagation.offset_source", v,
                        "expected zero, edge_aware or external:PATH");
             c.offset_source = v;
         },
         [](const PipelineConfig& c) { return c.offset_source; }},
        {"propagation.temperature", "softmax temperature (> 0)",
         [](PipelineConfig& c, const std::string& v) {
             const double t = parse_double("propagation.temperature", v);
             if (!(t > 0)) reject("propagation.temperature", v, "must be positive");
             c.prop_temperature = t;
         },
         [](const PipelineConfig& c) { return fmt(c.prop_temperature); }},
        {"propagation.normalize", "divide D_p by C_p where confident",
         [](PipelineConfig& c, const std::string& v) {
             c.prop_normalize = parse_bool("propagation.normalize", v);
         },
         [](const PipelineConfig& c) { return c.prop_normalize ? "true" : "false"; }},
        {"cg.enabled", "apply confidence-based Gaussian modulation",
         [](PipelineConfig& c, const std::string& v) {
             c.cg_enabled = parse_bool("cg.enabled", v);
         },
         [](const PipelineConfig& c) { return c.cg_enabled ? "true" : "false"; }},
        {"cg.k", "Gaussian peak height (> 0)",
         [](PipelineConfig& c, const std::string& v) {
             const double k = parse_double("cg.k", v);
             if (!(k > 0)) reject("cg.k", v, "must be positive");
             c.cg.k = static_cast<float>(k);
         },
         [](const PipelineConfig& c) { return fmt(c.cg.k); }},
        {"cg.omega", "Gaussian width in disparity units (> 0)",
         [](PipelineConfig& c, const std::string& v) {
             const double w = parse_double("cg.omega", v);
             if (!(w > 0)) reject("cg.omega", v, "must be positive");
             c.cg.omega = static_cast<float>(w);
         },
         [](const PipelineConfig& c) { return fmt(c.cg.omega); }},
        {"cg.rho", "confidence threshold in [0,1]",
         [](PipelineConfig& c, const std::string& v) {
             const double r = parse_double("cg.rho", v);
             if (!(r >= 0.0 && r <= 1.0)) reject("cg.rho", v, "must be in [0,1]");
             c.cg.rho = static_cast<float>(r);
         },
         [](const PipelineConfig& c) { return fmt(c.cg.rho); }},
        {"volume.d_max", "disparity range at full resolution (>= 8)",
         [](PipelineConfig& c, const std::string& v) {
             const int d = parse_int("volume.d_max", v);
             if (d < 8) reject("volume.d_max", v, "must be >= 8");
             c.volume.d_max = d;
         },
         [](const PipelineConfig& c) { return std::to_string(c.volume.d_max); }},
        {"volume.hint_weight", "hint-consistency term weight (>= 0)",
         [](PipelineConfig& c, const std::string& v) {
             const double w = parse_double("volume.hint_weight", v);
             if (w < 0) reject("volume.hint_weight", v, "must be >= 0");
             c.volume.hint_weight = static_cast<float>(w);
         },
         [](const PipelineConfig& c) { return fmt(c.volume.hint_weight); }},
        {"volume.tau", "hint-consistency saturation in disparity units (> 0)",
         [](PipelineConfig& c, const std::string& v) {
             const double t = parse_double("volume.tau", v);
             if (!(t > 0)) reject("volume.tau", v, "must be positive");
             c.volume.tau = static_cast<float>(t);
         },
         [](const PipelineConfig& c) { return fmt(c.volume.tau); }},
        {"volume.softargmin_t", "softargmin temperature (> 0)",
         [](PipelineConfig& c, const std::string& v) {
             const double t = parse_double("volume.softargmin_t", v);
             if (!(t > 0)) reject("volume.softargmin_t", v, "must be positive");
             c.softargmin_t = static_cast<float>(t);
         },
         [](const PipelineConfig& c) { return fmt(c.softargmin_t); }},
        {"agg.p1", "SGM small-step penalty (> 0)",
         [](PipelineConfig& c, const std::string& v) {
             const double p = parse_double("agg.p1", v);
             if (!(p > 0)) reject("agg.p1", v, "must be positive");
             c.agg.p1 = static_cast<float>(p);
         },
         [](const PipelineConfig& c) { return fmt(c.agg.p1); }},
        {"agg.p2", "SGM jump penalty (>= p1)",
         [](PipelineConfig& c, const std::string& v) {
             const double p = parse_double("agg.p2", v);
             if (!(p > 0)) reject("agg.p2", v, "must be positive");
             c.agg.p2 = static_cast<float>(p);
         },
         [](const PipelineConfig& c) { return fmt(c.agg.p2); }},
        {"agg.paths", "SGM path count at the coarsest level (4 or 8)",
         [](PipelineConfig& c, const std::string& v) {
             const int p = parse_int("agg.paths", v);
             if (p != 4 && p != 8) reject("agg.paths", v, "must be 4 or 8");
             c.agg.paths = p;
         },
         [](const PipelineConfig& c) { return std::to_string(c.agg.paths); }},
        {"agg.lambda_u", "search-range multiplier on uncertainty (>= 0)",
         [](PipelineConfig& c, const std::string& v) {
             const double l = parse_double("agg.lambda_u", v);
             if (l < 0) reject("agg.lambda_u", v, "must be >= 0");
             c.agg.lambda_u = static_cast<float>(l);
         },
         [](const PipelineConfig& c) { return fmt(c.agg.lambda_u); }},
        {"agg.r_min", "minimum half-range in disparity units (>= 1)",
         [](PipelineConfig& c, const std::string& v) {
             const int r = parse_int("agg.r_min", v);
             if (r < 1) reject("agg.r_min", v, "must be >= 1");
             c.agg.r_min = r;
         },
         [](const PipelineConfig& c) { return std::to_string(c.agg.r_min); }},
        {"pyramid.levels", "coarse-to-fine levels below quarter resolution (1-4)",
         [](PipelineConfig& c, const std::string& v) {
             const int l = parse_int("pyramid.levels", v);
             if (l < 1 || l > 4) reject("pyramid.levels", v, "must be in 1..4");
             c.pyramid_levels = l;
         },
         [](const PipelineConfig& c) { return std::to_string(c.pyramid_levels); }},
        {"upsample.sigma_range", "bilateral range sigma; 0 disables the range kernel",
         [](PipelineConfig& c, const std::string& v) {
             const double s = parse_double("upsample.sigma_range", v);
             if (s < 0) reject("upsample.sigma_range", v, "must be >= 0");
             c.upsample_sigma_range = static_cast<float>(s);
         },
         [](const PipelineConfig& c) { return fmt(c.upsample_sigma_range); }},
        {"residuals.provider", "zero | lidar | file:DELTA1.pfm,DELTA2.pfm",
         [](PipelineConfig& c, const std::string& v) {
             if (v != "zero" && v != "lidar" && v.rfind("file:", 0) != 0)
                 reject("residuals.provider", v, "expected zero, lidar or file:D1,D2");
             c.residual_provider = v;
         },
         [](const PipelineConfig& c) { return c.residual_provider; }},
        {"eval.buckets", "depth buckets, e.g. 0-20,20-100 (meters)",
         [](PipelineConfig& c, const std::string& v) {
             parse_buckets(v);  // validation only
             c.eval_buckets = v;
         },
         [](const PipelineConfig& c) { return c.eval_buckets; }},
        {"eval.format", "table | csv | json-lines",
         [](PipelineConfig& c, const std::string& v) {
             if (v != "table" && v != "csv" && v != "json-lines")
                 reject("eval.format", v, "expected table, csv or json-lines");
             c.eval_format = v;
         },
         [](const PipelineConfig& c) { return c.eval_format; }},
        {"eval.penalty_depth_m", "auto or depth in meters charged for missing predictions",
         [](PipelineConfig& c, const std::string& v) {
             if (v != "auto") {
                 const double p = parse_double("eval.penalty_depth_m", v);
                 if (!(p > 0)) reject("eval.penalty_depth_m", v, "must be positive or auto");
             }
             c.eval_penalty_depth = v;
         },
         [](const PipelineConfig& c) { return c.eval_penalty_depth; }},
        {"debug.dump_volume", "write aggregated volumes as PFM stacks",
         [](PipelineConfig& c, const std::string& v) {
             c.dump_volume = parse_bool("debug.dump_volume", v);
         },
         [](const PipelineConfig& c) { return c.dump_volume ? "true" : "false"; }},
        {"synth.layout", "fronto_plane | slanted_plane | two_box",
         [](PipelineConfig& c, const std::string& v) {
             if (v == "fronto_plane")
                 c.synth.layout = SceneLayout::fronto_plane;
             else if (v == "slanted_plane")
                 c.synth.layout = SceneLayout::slanted_plane;
             else if (v == "two_box")
                 c.synth.layout = SceneLayout::two_box;
             else
                 reject("synth.layout", v, "expected fronto_plane, slanted_plane or two_box");
         },
         [](const PipelineConfig& c) {
             switch (c.synth.layout) {
                 case SceneLayout::fronto_plane: return std::string("fronto_plane");
                 case SceneLayout::slanted_plane: return std::string("slanted_plane");
                 case SceneLayout::two_box: return std::string("two_box");
             }
             return std::string("fronto_plane");
         }},
        {"synth.width", "scene width in pixels",
         [](PipelineConfig& c, const std::string& v) {
             const int w = parse_int("synth.width", v);
             if (w < 16) reject("synth.width", v, "must be >= 16");
             c.synth.width = w;
         },
         [](const PipelineConfig& c) { return std::to_string(c.synth.width); }},
        {"synth.height", "scene height in pixels",
         [](PipelineConfig& c, const std::string& v) {
             const int h = parse_int("synth.height", v);
             if (h < 16) reject("synth.height", v, "must be >= 16");
             c.synth.height = h;
         },
         [](const PipelineConfig& c) { return std::to_string(c.synth.height); }},
        {"synth.z", "fronto plane depth in meters",
         [](PipelineConfig& c, const std::string& v) {
             c.synth.z_m = parse_double("synth.z", v);
         },
         [](const PipelineConfig& c) { return fmt(c.synth.z_m); }},
        {"synth.z0", "slanted plane center depth in meters",
         [](PipelineConfig& c, const std::string& v) {
             c.synth.z0_m = parse_double("synth.z0", v);
         },
         [](const PipelineConfig& c) { return fmt(c.synth.z0_m); }},
        {"synth.slope", "slanted plane disparity slope (px per px)",
         [](PipelineConfig& c, const std::string& v) {
             c.synth.slope = parse_double("synth.slope", v);
         },
         [](const PipelineConfig& c) { return fmt(c.synth.slope); }},
        {"synth.z_near", "two_box foreground depth in meters",
         [](PipelineConfig& c, const std::string& v) {
             c.synth.z_near_m = parse_double("synth.z_near", v);
         },
         [](const PipelineConfig& c) { return fmt(c.synth.z_near_m); }},
        {"synth.z_far", "two_box background depth in meters",
         [](PipelineConfig& c, const std::string& v) {
             c.synth.z_far_m = parse_double("synth.z_far", v);
         },
         [](const PipelineConfig& c) { return fmt(c.synth.z_far_m); }},
        {"synth.hint_density", "hint sampling density in (0,1]",
         [](PipelineConfig& c, const std::string& v) {
             const double d = parse_double("synth.hint_density", v);
             if (!(d > 0.0 && d <= 1.0)) reject("synth.hint_density", v, "must be in (0,1]");
             c.synth.hint_density = d;
         },
         [](const PipelineConfig& c) { return fmt(c.synth.hint_density); }},
        {"synth.hint_noise_px", "hint disparity noise stddev in pixels (>= 0)",
         [](PipelineConfig& c, const std::string& v) {
             const double n = parse_double("synth.hint_noise_px", v);
             if (n < 0) reject("synth.hint_noise_px", v, "must be >= 0");
             c.synth.hint_noise_px = n;
         },
         [](const PipelineConfig& c) { return fmt(c.synth.hint_noise_px); }},
    };
    return entries;
}

const KeyEntry* find_key(const std::string& key) {
    for (const KeyEntry& e : registry())
        if (key == e.key) return &e;
    return nullptr;
}

}  // namespace

void config_set(PipelineConfig& config, const std::string& key, const std::string& value) {
    const KeyEntry* e = find_key(key);
    if (!e) fail_config("unknown config key '" + key + "'");
    e->set(config, value);
}

std::string config_get(const PipelineConfig& config, const std::string& key) {
    const KeyEntry* e = find_key(key);
    if (!e) fail_config("unknown config key '" + key + "'");
    return e->get(config);
}

PipelineConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_io("cannot open config file '" + path + "'");
    PipelineConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto strip = [](std::string s) {
            const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
            s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
            s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
            return s;
        };
        const std::string stripped = strip(line);
        if (stripped.empty()) continue;
        const size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            fail_config(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = strip(stripped.substr(0, eq));
        const std::string value = strip(stripped.substr(eq + 1));
        try {
            config_set(config, key, value);
        } catch (const Error& e) {
            fail_config(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return config;
}

void apply_env_overrides(PipelineConfig& config) {
    for (const KeyEntry& e : registry()) {
        std::string env_name = "SDG_FUSE_";
        for (const char* p = e.key; *p; ++p)
            env_name += *p == '.' ? '_' : static_cast<char>(std::toupper(*p));
        if (const char* value = std::getenv(env_name.c_str())) config_set(config, e.key, value);
    }
}

void validate_config(const PipelineConfig& config) {
    config.rig.validate();
    config.cg.validate();
    if (config.agg.p2 < config.agg.p1) fail_config("agg.p2 must be >= agg.p1");
    config.agg.validate();
    parse_buckets(config.eval_buckets);
    // quarter resolution must survive the configured pyramid depth
    if (config.volume.d_max / (4 << (config.pyramid_levels - 1)) < 2)
        fail_config("volume.d_max too small for pyramid.levels (coarsest range < 2)");
}

std::map<std::string, std::string> config_echo(const PipelineConfig& config) {
    std::map<std::string, std::string> echo;
    for (const KeyEntry& e : registry()) echo[e.key] = e.get(config);
    return echo;
}

std::string reference_config_text() {
    const PipelineConfig defaults;
    std::ostringstream os;
    os << "# sdg-fuse reference configuration: every key with its default value.\n";
    os << "# Any key can also be overridden via SDG_FUSE_<KEY> (dots become underscores).\n\n";
    for (const KeyEntry& e : registry())
        os << "# " << e.doc << "\n" << e.key << " = " << e.get(defaults) << "\n\n";
    return os.str();
}

}  // namespace sdgf
