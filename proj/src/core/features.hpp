#pragma once

#include <vector>

#include "core/raster.hpp"

namespace sdgf {

/// Per-pixel descriptor grid: census comparisons stored as +-1 channels,
/// two central-difference gradient channels, then box-mean context channels
/// (one per radius). Channel order: [census.. | gx gy | context..].
struct FeatureMap {
    ImageGrid grid;
    int census_channels = 0;
    int context_channels = 0;

    int gradient_offset() const { return census_channels; }
    int context_offset() const { return census_channels + 2; }
    int height() const { return grid.height(); }
    int width() const { return grid.width(); }
};

struct FeatureParams {
    int census_window = 5;            // odd, >= 3
    std::vector<int> context_radii = {4, 16};
};

struct CostParams {
    float census_w = 1.0f;
    float grad_w = 0.25f;
    float max_cost = 2.0f;
};

/// Converts 3-channel images to luma (Rec.601); single-channel passes through.
ImageGrid to_luma(const ImageGrid& image);

/// Census ties (neighbor == center) map to +1. Gradients are central
/// differences with clamped borders. Context channels are box means of luma.
FeatureMap extract_features(const ImageGrid& image, const FeatureParams& params);

/// Normalized census Hamming distance plus weighted absolute gradient
/// difference, clamped to max_cost. Right coordinate x-d out of bounds
/// yields max_cost. Symmetric in its two descriptors.
float matching_cost(const FeatureMap& left, const FeatureMap& right, int x, int y, int d,
                    const CostParams& params);

}  // namespace sdgf
