#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/raster.hpp"

namespace sdgf {

/// Depth interval in meters, [lo, hi).
struct DepthBucket {
    double lo_m = 0.0;
    double hi_m = 0.0;
    std::string label() const;
};

struct MetricReport {
    DepthBucket bucket;
    double rmse_mm = 0.0;
    double mae_mm = 0.0;
    double irmse_per_km = 0.0;
    double imae_per_km = 0.0;
    size_t valid_count = 0;
};

struct DepthMetricsOptions {
    /// Depth substituted when the prediction is invalid but gt is valid, so
    /// missing predictions count as errors instead of being skipped.
    /// The default is the d_eps-clamped depth of the default rig
    /// (0.54 m * 721 px / 0.1 px).
    double penalty_depth_m = 3893.4;
};

/// RMSE/MAE of (pred - gt) in millimeters and iRMSE/iMAE of (1/pred - 1/gt)
/// in 1/km, over pixels where gt is valid and falls in the bucket. Buckets
/// with no evaluated pixels are omitted. Reductions use pairwise summation.
std::vector<MetricReport> depth_metrics(const DepthMap& pred, const DepthMap& gt,
                                        const std::vector<DepthBucket>& buckets,
                                        const DepthMetricsOptions& options = {});

struct DisparityMetrics {
    double epe_px = 0.0;
    double d1_pct = 0.0;
    size_t valid_count = 0;
};

/// EPE = mean |pred - gt|; D1 = % of valid pixels with |err| > 3 px and
/// |err| > 5% of gt. Fails if no pixel is valid in gt.
DisparityMetrics disparity_metrics(const std::vector<float>& pred, const std::vector<float>& gt,
                                   const std::vector<uint8_t>& gt_valid);

/// Parses "0-20,20-100" into buckets (meters).
std::vector<DepthBucket> parse_buckets(const std::string& spec);

}  // namespace sdgf
