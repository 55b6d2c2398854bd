#pragma once

#include <string>
#include <vector>

#include "core/features.hpp"
#include "core/propagation.hpp"
#include "core/raster.hpp"

namespace sdgf {

// Disparity below this is treated as singular during triangulation.
constexpr float kDisparityEps = 0.1f;

// Residual clamp ranges: delta1 in disparity pixels, delta2 in meters.
constexpr float kDelta1Clamp = 0.2f;
constexpr float kDelta2Clamp = 0.6f;

/// Pixel-wise corrections applied as G = b f / (D_s + delta1) + delta2.
struct ResidualMaps {
    int height = 0;
    int width = 0;
    std::vector<float> delta1;  // disparity pixels, clamped to +-0.2
    std::vector<float> delta2;  // meters, clamped to +-0.6

    ResidualMaps() = default;
    ResidualMaps(int h, int w)
        : height(h), width(w), delta1(static_cast<size_t>(h) * w, 0.f),
          delta2(static_cast<size_t>(h) * w, 0.f) {}
    size_t index(int x, int y) const { return static_cast<size_t>(y) * width + x; }
    void validate() const;
};

/// Per-pixel photometric residual (left - warped right) per channel, with a
/// validity mask for in-bounds warps.
struct ErrorMap {
    ImageGrid error;
    std::vector<uint8_t> valid;
};

/// G = b f / (D_s + delta1) + delta2. Pixels with D_s + delta1 <= eps or with
/// non-positive G after delta2 are marked invalid.
DepthMap triangulate(const std::vector<float>& disparity, int height, int width,
                     const CameraRig& rig, const ResidualMaps& residuals);

/// error(x,y) = left(x,y) - bilinear right(x - D_s(x,y), y); out-of-bounds
/// source columns are flagged invalid.
ErrorMap warp_error_map(const ImageGrid& left, const ImageGrid& right,
                        const std::vector<float>& disparity);

struct LidarResidualConfig {
    int window = 9;
    double temperature = 1.0;
    float rho = 0.4f;         // confidence gate on the propagated residual
    FeatureParams features;   // for the quarter-resolution propagation weights
    int threads = 1;
};

/// Deterministic depth-space residual provider: at every valid LiDAR hint
/// compute r = Z_lidar - b f / D_s, pool r to quarter resolution, propagate it
/// with the Eq. 2-4 machinery (zero offsets, confidence-normalized), gate by
/// propagation confidence, upsample back and clamp to +-0.6 m. delta1 stays 0.
ResidualMaps lidar_anchored_residuals(const std::vector<float>& disparity, int height, int width,
                                      const CameraRig& rig, const DepthMap& lidar,
                                      const ImageGrid& left_image,
                                      const LidarResidualConfig& config);

/// Loads delta1/delta2 PFM files, clamping out-of-range samples to the paper
/// ranges; clamped_count reports how many samples were clamped.
ResidualMaps external_residuals(const std::string& delta1_path, const std::string& delta2_path,
                                int height, int width, size_t* clamped_count = nullptr);

void save_residuals(const std::string& delta1_path, const std::string& delta2_path,
                    const ResidualMaps& residuals);

}  // namespace sdgf
