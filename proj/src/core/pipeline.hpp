#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/depth_conversion.hpp"
#include "core/metrics.hpp"
#include "core/propagation.hpp"
#include "core/raster.hpp"

namespace sdgf {

inline constexpr const char* kVersion = "0.1.0";

struct PipelineInputs {
    ImageGrid left;
    ImageGrid right;
    SparseHintMap hints;           // full-resolution disparity hints; may be all-invalid
    std::optional<DepthMap> lidar; // metric hints; derived from the hints and rig when absent
};

struct StageTiming {
    std::string stage;
    double ms = 0.0;
};

struct PipelineResult {
    int height = 0;
    int width = 0;
    std::vector<float> disparity;      // full resolution, pixels
    std::vector<float> uncertainty_q;  // quarter resolution
    SemiDenseHint hint_quarter;
    DepthMap depth;
    ResidualMaps residuals;
    ErrorMap error_map;
    std::vector<StageTiming> timings;
    std::vector<CostVolume> volume_dump;  // filled when debug.dump_volume is on
};

/// extract -> downsample hints -> propagate -> coarse-to-fine -> upsample ->
/// residuals -> triangulate -> error map. Stage failures rethrow with a
/// stage-tagged message.
PipelineResult run_pipeline(const PipelineInputs& inputs, const PipelineConfig& config);

// ---- file-level runners (the C API and CLI surface) ----

/// Renders the configured scene and writes left/right PNGs, gt disparity PFM,
/// gt depth PNG (occluded pixels invalid), hint depth PNG and a manifest.
void synth_to_files(const PipelineConfig& config, const std::string& out_dir);

/// Propagation stage alone: writes dp.pfm / confidence.pfm at quarter
/// resolution plus a manifest.
void propagate_to_files(const PipelineConfig& config, const std::string& left_path,
                        const std::string& hints_path, const std::string& out_dir);

/// Matching through upsample: writes disparity.pfm (full res), dp.pfm,
/// confidence.pfm, optional volume dumps, and a manifest.
void match_to_files(const PipelineConfig& config, const std::string& left_path,
                    const std::string& right_path, const std::string& hints_path,
                    const std::string& out_dir);

/// Disparity-to-depth stage alone, consuming a disparity PFM produced by
/// match: writes depth.png, error_map.pfm, delta1/delta2.pfm and a manifest.
void depth_to_files(const PipelineConfig& config, const std::string& left_path,
                    const std::string& right_path, const std::string& disparity_path,
                    const std::string& hints_path, const std::string& out_dir);

/// Full pipeline; when gt_depth_path is nonempty the metric report (in
/// eval.format) is returned, otherwise an empty string.
std::string run_to_files(const PipelineConfig& config, const std::string& left_path,
                         const std::string& right_path, const std::string& hints_path,
                         const std::string& gt_depth_path, const std::string& out_dir);

/// pred/gt may be single depth PNGs or directories holding matching names.
std::string eval_files(const PipelineConfig& config, const std::string& pred_path,
                       const std::string& gt_path);

/// Loads a hint depth PNG and converts it to disparity hints via the rig.
SparseHintMap load_hints_as_disparity(const std::string& path, const CameraRig& rig);

}  // namespace sdgf
