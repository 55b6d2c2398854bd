#pragma once

#include <vector>

#include "core/cost_volume.hpp"
#include "core/features.hpp"
#include "core/propagation.hpp"
#include "core/raster.hpp"

namespace sdgf {

struct AggregationParams {
    float p1 = 1.0f;       // |delta d| = 1 penalty
    float p2 = 8.0f;       // |delta d| > 1 penalty, scaled down across image edges
    int paths = 8;         // 4 or 8, used at the coarsest level; finer levels cap at 4
    float lambda_u = 3.0f; // search-range multiplier on uncertainty
    int r_min = 4;         // minimum half-range, disparity units
    void validate() const;
};

/// Per-pixel inclusive disparity search bounds, 0 <= lo <= hi < d_max.
struct SearchRange {
    int height = 0;
    int width = 0;
    int d_max = 0;
    std::vector<int> lo;
    std::vector<int> hi;

    size_t index(int x, int y) const { return static_cast<size_t>(y) * width + x; }
};

/// Standard SGM scanline recurrence with min-normalization per step; p2 is
/// divided by (1 + 10 |dI|) across the step, floored at p1. Aggregated cost is
/// the per-path sum divided by the path count, so p1 = p2 = 0 is the identity.
CostVolume sgm_aggregate(const CostVolume& cv, const ImageGrid& luma,
                         const AggregationParams& params, int paths, int threads = 1);

/// lo/hi = clamp(round(2 (d -/+ (lambda_u u + r_min))), 0, d_max-1): the factor
/// 2 converts coarse-level disparity to the next finer level. After clamping
/// the window is re-widened so hi - lo >= min(r_min, d_max-1); the doubled
/// coarse prediction always stays inside [lo, hi].
SearchRange range_from_uncertainty(const std::vector<float>& disparity,
                                   const std::vector<float>& uncertainty, int height, int width,
                                   float lambda_u, int r_min, int d_max);

struct CoarseToFineConfig {
    VolumeParams volume;      // d_max given at full resolution
    CostParams cost;
    ModulationParams cg;
    bool cg_enabled = true;
    AggregationParams agg;
    float softargmin_t = 0.5f;
    int levels = 3;           // 3 => 1/16, 1/8, 1/4
    int threads = 1;
};

struct CoarseToFineResult {
    int height = 0;           // quarter resolution
    int width = 0;
    std::vector<float> disparity;    // quarter-resolution disparity units
    std::vector<float> uncertainty;
};

/// Runs the cascade over feature pyramids ordered finest-first
/// (index 0 = 1/4, index levels-1 = coarsest). The coarsest level evaluates
/// the full disparity range; finer levels only evaluate d inside the
/// uncertainty-derived SearchRange, with out-of-range cells held at
/// k * cost ceiling. The Gaussian modulation is applied at every level with
/// D_p and omega rescaled to the level.
CoarseToFineResult coarse_to_fine(const std::vector<FeatureMap>& left_pyr,
                                  const std::vector<FeatureMap>& right_pyr,
                                  const std::vector<ImageGrid>& luma_pyr,
                                  const SemiDenseHint& hint_quarter,
                                  const CoarseToFineConfig& cfg,
                                  std::vector<CostVolume>* volume_dump = nullptr);

/// Plain bilinear x4 upsampling of a quarter-resolution plane (values kept).
std::vector<float> upsample_x4_bilinear(const std::vector<float>& quarter, int qheight,
                                        int qwidth, int height, int width, int threads = 1);

/// Joint-bilateral x4 upsampling guided by the full-resolution luma; disparity
/// values are scaled by 4. sigma_range <= 0 disables the range kernel, which
/// degenerates to plain bilinear interpolation.
std::vector<float> upsample_disparity(const std::vector<float>& d_quarter, int qheight,
                                      int qwidth, const ImageGrid& guide_luma, float sigma_range,
                                      int threads = 1);

}  // namespace sdgf
