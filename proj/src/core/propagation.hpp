#pragma once

#include <span>
#include <string>
#include <vector>

#include "core/features.hpp"
#include "core/raster.hpp"

namespace sdgf {

/// Per pixel, P^2 sample offsets, each a 2-vector in [-1,1]. Offsets are
/// expressed in units of the window dilation: component 1 displaces a sample
/// by one lattice step.
struct OffsetField {
    int height = 0;
    int width = 0;
    int window = 0;  // P
    std::vector<float> data;  // H * W * P^2 * 2, (dx, dy) pairs

    size_t base(int x, int y) const {
        return (static_cast<size_t>(y) * width + x) * window * window * 2;
    }
    void validate() const;
};

/// Per pixel, P^2 nonnegative weights summing to 1.
struct PropagationWeights {
    int height = 0;
    int width = 0;
    int window = 0;
    std::vector<float> data;  // H * W * P^2

    size_t base(int x, int y) const {
        return (static_cast<size_t>(y) * width + x) * window * window;
    }
};

/// Propagated disparity D_p and confidence C_p in [0,1], quarter resolution.
struct SemiDenseHint {
    int height = 0;
    int width = 0;
    std::vector<float> disparity_p;
    std::vector<float> confidence_p;

    size_t index(int x, int y) const { return static_cast<size_t>(y) * width + x; }
};

OffsetField zero_offset_field(int height, int width, int window);

/// Shrinks each sample toward the window center in proportion to the largest
/// gradient magnitude met along the center-to-sample segment, clamped to one
/// lattice step. Keeps propagation windows from crossing strong edges.
OffsetField edge_aware_offset_field(const FeatureMap& features, int window, int dilation);

/// Loads a PFM stack of 2*P^2 planes (dx0, dy0, dx1, dy1, ...). Rejects wrong
/// shapes and components outside [-1,1].
OffsetField load_offset_field(const std::string& path, int height, int width, int window);
void save_offset_field(const std::string& path, const OffsetField& field);

/// Sample i of the window at (x,y) lands at
///   (x,y) + dilation * (u_i + offset_x_i, v_i + offset_y_i)
/// where (u_i, v_i) spans the P x P integer lattice centered at 0,
/// row-major (i = (v+P/2)*P + (u+P/2)). Null offsets mean the regular grid.
void deform_window(int x, int y, int window, int dilation, const OffsetField* offsets,
                   std::span<float> xs, std::span<float> ys);

/// Softmax over the window of feature self-correlations. Dot products are
/// normalized by the descriptor norms before the temperature is applied, so
/// logits stay in [-1/T, 1/T] regardless of descriptor dimensionality.
PropagationWeights propagation_weights(const FeatureMap& features, const OffsetField& offsets,
                                       int dilation, double temperature, int threads = 1);

/// Weighted propagation of an arbitrary masked value plane: returns the
/// weighted value sum and the weighted mask mass per pixel. Both use the same
/// bilinear kernel so the mass exactly tracks weight landing on valid support.
void propagate_masked(const std::vector<float>& values, const std::vector<float>& mask,
                      int height, int width, const PropagationWeights& weights,
                      const OffsetField& offsets, int dilation,
                      std::vector<float>& value_out, std::vector<float>& mass_out,
                      int threads = 1);

/// D_p = sum_i A_i * sampled disparity, C_p = sum_i A_i * sampled mask.
/// With normalize set, D_p is divided by C_p where C_p > eps.
SemiDenseHint propagate(const SparseHintMap& hints, const PropagationWeights& weights,
                        const OffsetField& offsets, int dilation, bool normalize = false,
                        int threads = 1);

/// The confidence-corrected reading of the propagated hint: D_p / C_p where
/// C_p is meaningful. At partial confidence the raw weighted sum understates
/// the disparity by the factor C_p, which would mis-center any guidance built
/// on it, so downstream consumers take this variant.
SemiDenseHint confidence_normalized(const SemiDenseHint& hint);

}  // namespace sdgf
