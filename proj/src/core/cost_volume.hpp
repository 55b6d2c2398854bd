#pragma once

#include <vector>

#include "core/features.hpp"
#include "core/propagation.hpp"
#include "core/raster.hpp"

namespace sdgf {

/// Scalar matching costs over (x, y, candidate disparity), d fastest.
struct CostVolume {
    int height = 0;
    int width = 0;
    int d_max = 0;
    std::vector<float> cost;

    CostVolume() = default;
    CostVolume(int h, int w, int d);

    size_t index(int x, int y, int d) const {
        return (static_cast<size_t>(y) * width + x) * d_max + d;
    }
    float* slice(int x, int y) { return cost.data() + index(x, y, 0); }
    const float* slice(int x, int y) const { return cost.data() + index(x, y, 0); }
};

/// Gaussian modulation constants: k scales the peak height, omega its width
/// in disparity units, rho gates on propagation confidence.
struct ModulationParams {
    float k = 2.0f;
    float omega = 8.0f;
    float rho = 0.4f;
    void validate() const;
};

struct VolumeParams {
    int d_max = 192;          // at full resolution
    float hint_weight = 0.5f;
    float tau = 4.0f;         // hint-consistency saturation, disparity units
};

/// cost(x,y,d) = matching_cost(x,y,d)
///             + hint_weight * C_p(x,y) * min(|d - D_p(x,y)|, tau) / tau.
/// hint may be null (or hint_weight 0) to disable the hint channel.
CostVolume build_cost_volume(const FeatureMap& left, const FeatureMap& right, int d_max,
                             const SemiDenseHint* hint, const VolumeParams& vparams,
                             const CostParams& cparams, int threads = 1);

/// Eq.-6 pixel-varying weight: f = 1 - M + M * k * C_p * exp(-(d-D_p)^2/(2 omega^2))
/// with M = [C_p > rho]. Evaluated in double precision.
double modulation_weight(float confidence, double d, double disparity_p,
                         const ModulationParams& params);

/// Applies f in similarity space s = ceiling - cost so the Gaussian peak
/// amplifies the hinted disparity. Pixels with M = 0 are left untouched
/// (exact identity). For M = 1 pixels the result is re-expressed as
/// cost' = k * ceiling - f * s, which keeps costs in [0, k * ceiling].
/// cost_ceiling must upper-bound every cost in the volume; for volumes from
/// build_cost_volume that is max_cost + hint_weight.
void gaussian_modulate(CostVolume& cv, const SemiDenseHint& hint, const ModulationParams& params,
                       float cost_ceiling, int threads = 1);

/// Ceiling of build_cost_volume output given its parameters.
inline float volume_cost_ceiling(const VolumeParams& vparams, const CostParams& cparams,
                                 bool hint_enabled) {
    return cparams.max_cost + (hint_enabled ? vparams.hint_weight : 0.f);
}

/// Softargmin disparity regression plus spread:
///   p(d) = softmax_d(-cost/temperature), disparity = sum d p(d),
///   uncertainty = sqrt(sum (d - disparity)^2 p(d)).
void softargmin_disparity(const CostVolume& cv, float temperature,
                          std::vector<float>& disparity, std::vector<float>& uncertainty,
                          int threads = 1);

}  // namespace sdgf
