#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/aggregation.hpp"
#include "core/cost_volume.hpp"
#include "core/features.hpp"
#include "core/raster.hpp"
#include "core/synth.hpp"

namespace sdgf {

/// All tunables of the pipeline, populated from defaults, a config file,
/// environment overrides (SDG_FUSE_<KEY> with '.' -> '_', uppercase) and
/// per-key set calls, in that order.
struct PipelineConfig {
    int threads = 1;   // 0 = hardware concurrency
    uint64_t seed = 0;

    CameraRig rig{0.54, 721.0};

    FeatureParams features;
    CostParams cost;

    int prop_window = 9;
    int prop_dilation = 2;
    std::string offset_source = "edge_aware";  // zero | edge_aware | external:PATH
    double prop_temperature = 1.0;
    bool prop_normalize = false;

    bool cg_enabled = true;
    ModulationParams cg;

    VolumeParams volume;
    float softargmin_t = 0.5f;

    AggregationParams agg;
    int pyramid_levels = 3;

    float upsample_sigma_range = 0.1f;

    std::string residual_provider = "lidar";  // zero | lidar | file:D1.pfm,D2.pfm

    std::string eval_buckets = "0-20,20-100";
    std::string eval_format = "table";        // table | csv | json-lines
    std::string eval_penalty_depth = "auto";  // auto (= bf / 0.1 px) | meters

    bool dump_volume = false;

    SceneSpec synth;  // layout parameters; rig and seed are taken from above
};

/// Sets one key; throws Error(config) naming the key for unknown keys or
/// rejected values.
void config_set(PipelineConfig& config, const std::string& key, const std::string& value);

/// Canonical string value of one key; throws for unknown keys.
std::string config_get(const PipelineConfig& config, const std::string& key);

/// key = value lines, '#' comments; unknown keys and bad values are rejected
/// with the offending line number.
PipelineConfig parse_config_file(const std::string& path);

/// Applies SDG_FUSE_* environment overrides on top of the current values.
void apply_env_overrides(PipelineConfig& config);

/// Cross-key validation (window/dilation interplay, rig, scene spec).
void validate_config(const PipelineConfig& config);

/// Every key with its current value, for run manifests.
std::map<std::string, std::string> config_echo(const PipelineConfig& config);

/// Commented reference config listing every key and default.
std::string reference_config_text();

}  // namespace sdgf
