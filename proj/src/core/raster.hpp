#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sdgf {

/// Dense H x W x C float raster, row-major, channel-interleaved.
/// Used for images, feature maps, disparity/confidence maps and residuals.
class ImageGrid {
public:
    ImageGrid() = default;
    ImageGrid(int height, int width, int channels, float fill = 0.f);

    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return channels_; }
    bool empty() const { return data_.empty(); }

    float& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
    float at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

    std::span<float> pixel(int x, int y) {
        return {data_.data() + index(x, y, 0), static_cast<size_t>(channels_)};
    }
    std::span<const float> pixel(int x, int y) const {
        return {data_.data() + index(x, y, 0), static_cast<size_t>(channels_)};
    }

    std::vector<float>& data() { return data_; }
    const std::vector<float>& data() const { return data_; }

    bool same_shape(const ImageGrid& o) const {
        return height_ == o.height_ && width_ == o.width_ && channels_ == o.channels_;
    }

    /// Throws if any dimension < 1 or a sample is non-finite.
    void validate(const char* what) const;

private:
    size_t index(int x, int y, int c) const {
        return (static_cast<size_t>(y) * width_ + x) * channels_ + c;
    }

    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<float> data_;
};

/// Per-pixel disparity (pixels) plus a binary validity mask. Invalid pixels
/// store disparity 0 so masked weighted sums need no branching.
struct SparseHintMap {
    int height = 0;
    int width = 0;
    std::vector<float> disparity;
    std::vector<uint8_t> valid;

    SparseHintMap() = default;
    SparseHintMap(int h, int w)
        : height(h), width(w), disparity(static_cast<size_t>(h) * w, 0.f),
          valid(static_cast<size_t>(h) * w, 0) {}

    size_t index(int x, int y) const { return static_cast<size_t>(y) * width + x; }
    void set(int x, int y, float d) {
        disparity[index(x, y)] = d;
        valid[index(x, y)] = 1;
    }
    void clear(int x, int y) {
        disparity[index(x, y)] = 0.f;
        valid[index(x, y)] = 0;
    }
    size_t valid_count() const;

    void validate(const char* what) const;
};

/// Metric depth in meters plus validity mask.
struct DepthMap {
    int height = 0;
    int width = 0;
    std::vector<float> depth;
    std::vector<uint8_t> valid;

    DepthMap() = default;
    DepthMap(int h, int w)
        : height(h), width(w), depth(static_cast<size_t>(h) * w, 0.f),
          valid(static_cast<size_t>(h) * w, 0) {}

    size_t index(int x, int y) const { return static_cast<size_t>(y) * width + x; }
    void validate(const char* what) const;
};

/// Stereo rig intrinsics needed for disparity <-> depth conversion.
struct CameraRig {
    double baseline_m = 0.0;
    double focal_px = 0.0;

    double bf() const { return baseline_m * focal_px; }
    void validate() const;
};

/// Bilinear interpolation of the four neighbors; coordinates outside
/// [0,W-1]x[0,H-1] clamp to the border. Exact at integer coordinates.
void bilinear_sample(const ImageGrid& grid, float x, float y, std::span<float> out);
float bilinear_sample(const ImageGrid& grid, float x, float y, int channel);

/// Bilinear sample of a single-plane float raster given as (values, h, w).
float bilinear_sample_plane(const float* values, int height, int width, float x, float y);

/// Block-mean reduction of a masked value plane. Each factor x factor block
/// yields the mean over valid source pixels; the output mask is set iff the
/// block held at least one valid pixel. Output dims are ceil(H/f) x ceil(W/f).
void downsample_masked(const std::vector<float>& values, const std::vector<uint8_t>& mask,
                       int height, int width, int factor,
                       std::vector<float>& out_values, std::vector<uint8_t>& out_mask,
                       int& out_height, int& out_width);

/// Hint reduction for propagation: block-mean of valid disparities, then the
/// mean is divided by `factor` since disparity units shrink with resolution.
SparseHintMap downsample_hints(const SparseHintMap& hints, int factor);

/// Box pyramid: level k is ceil(H/2^k) x ceil(W/2^k) via 2x2 averaging
/// (partial blocks at odd borders average the available pixels).
std::vector<ImageGrid> build_pyramid(const ImageGrid& grid, int levels);

}  // namespace sdgf
