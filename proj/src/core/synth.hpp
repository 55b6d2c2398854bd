#pragma once

#include <cstdint>
#include <vector>

#include "core/raster.hpp"

namespace sdgf {

enum class SceneLayout { fronto_plane, slanted_plane, two_box };

/// Deterministic stereo + LiDAR test scene description. All randomness flows
/// from the explicit seeds; the same spec renders the same bytes.
struct SceneSpec {
    SceneLayout layout = SceneLayout::fronto_plane;
    double z_m = 10.0;                     // fronto_plane depth
    double z0_m = 10.0;                    // slanted_plane center depth
    double slope = 0.05;                   // slanted_plane disparity px per px along x
    double z_near_m = 8.0;                 // two_box foreground depth
    double z_far_m = 30.0;                 // two_box background depth
    CameraRig rig{0.54, 721.0};
    int height = 384;
    int width = 512;
    uint64_t texture_seed = 1;
    double hint_density = 0.05;
    double hint_noise_px = 0.0;

    void validate() const;
};

struct Scene {
    ImageGrid left;                        // single channel in [0,1]
    ImageGrid right;
    std::vector<float> gt_disparity;       // left frame, defined everywhere
    DepthMap gt_depth;                     // analytic, valid everywhere
    std::vector<uint8_t> non_occluded;     // 1 = pixel has a right-image correspondence
    SparseHintMap hints;                   // disparity pixels, from sample_hints
};

/// Band-limited value-noise texture mapped onto the layout geometry; the right
/// image is the exact inverse warp under d = b f / Z, so warping right by the
/// ground-truth disparity reproduces left on non-occluded pixels.
Scene render_scene(const SceneSpec& spec);

/// Seeded per-pixel Bernoulli selection; selected pixels carry
/// gt + N(0, noise_px^2) clamped at 0.
SparseHintMap sample_hints(const std::vector<float>& gt_disparity, int height, int width,
                           double density, double noise_px, uint64_t seed);

/// Depth hints for the LiDAR-anchored residual provider: Z = b f / d at valid
/// hint pixels (hints below the disparity epsilon are dropped).
DepthMap hints_to_depth(const SparseHintMap& hints, const CameraRig& rig);

}  // namespace sdgf
