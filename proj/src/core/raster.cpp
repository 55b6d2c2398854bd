#include "core/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"

namespace sdgf {

ImageGrid::ImageGrid(int height, int width, int channels, float fill)
    : height_(height), width_(width), channels_(channels) {
    if (height < 1 || width < 1 || channels < 1)
        fail_invalid("ImageGrid dimensions must be >= 1, got " + std::to_string(height) + "x" +
                     std::to_string(width) + "x" + std::to_string(channels));
    data_.assign(static_cast<size_t>(height) * width * channels, fill);
}

void ImageGrid::validate(const char* what) const {
    if (height_ < 1 || width_ < 1 || channels_ < 1)
        fail_invalid(std::string(what) + ": empty grid");
    for (float v : data_)
        if (!std::isfinite(v)) fail_invalid(std::string(what) + ": non-finite sample");
}

size_t SparseHintMap::valid_count() const {
    size_t n = 0;
    for (uint8_t v : valid) n += v;
    return n;
}

void SparseHintMap::validate(const char* what) const {
    if (height < 1 || width < 1) fail_invalid(std::string(what) + ": empty hint map");
    for (size_t i = 0; i < valid.size(); ++i) {
        if (valid[i] > 1) fail_invalid(std::string(what) + ": mask value not in {0,1}");
        if (valid[i]) {
            if (!(disparity[i] >= 0.f) || !std::isfinite(disparity[i]))
                fail_invalid(std::string(what) + ": valid hint with negative or non-finite disparity");
        } else if (disparity[i] != 0.f) {
            fail_invalid(std::string(what) + ": invalid hint must store disparity 0");
        }
    }
}

void DepthMap::validate(const char* what) const {
    if (height < 1 || width < 1) fail_invalid(std::string(what) + ": empty depth map");
    for (size_t i = 0; i < valid.size(); ++i) {
        if (valid[i] && (!(depth[i] > 0.f) || !std::isfinite(depth[i])))
            fail_invalid(std::string(what) + ": valid depth must be positive and finite");
    }
}

void CameraRig::validate() const {
    if (!(baseline_m > 0.0) || !(focal_px > 0.0))
        fail_invalid("camera rig requires strictly positive baseline and focal length");
}

namespace {

inline float clampf(float v, float lo, float hi) { return std::min(hi, std::max(lo, v)); }

struct BilinearSupport {
    int x0, x1, y0, y1;
    float fx, fy;
};

inline BilinearSupport support(const ImageGrid& g, float x, float y) {
    const float cx = clampf(x, 0.f, static_cast<float>(g.width() - 1));
    const float cy = clampf(y, 0.f, static_cast<float>(g.height() - 1));
    BilinearSupport s;
    s.x0 = static_cast<int>(std::floor(cx));
    s.y0 = static_cast<int>(std::floor(cy));
    s.x1 = std::min(s.x0 + 1, g.width() - 1);
    s.y1 = std::min(s.y0 + 1, g.height() - 1);
    s.fx = cx - static_cast<float>(s.x0);
    s.fy = cy - static_cast<float>(s.y0);
    return s;
}

}  // namespace

void bilinear_sample(const ImageGrid& grid, float x, float y, std::span<float> out) {
    const BilinearSupport s = support(grid, x, y);
    for (int c = 0; c < grid.channels(); ++c) {
        const float top = grid.at(s.x0, s.y0, c) * (1.f - s.fx) + grid.at(s.x1, s.y0, c) * s.fx;
        const float bot = grid.at(s.x0, s.y1, c) * (1.f - s.fx) + grid.at(s.x1, s.y1, c) * s.fx;
        out[c] = top * (1.f - s.fy) + bot * s.fy;
    }
}

float bilinear_sample(const ImageGrid& grid, float x, float y, int channel) {
    const BilinearSupport s = support(grid, x, y);
    const float top =
        grid.at(s.x0, s.y0, channel) * (1.f - s.fx) + grid.at(s.x1, s.y0, channel) * s.fx;
    const float bot =
        grid.at(s.x0, s.y1, channel) * (1.f - s.fx) + grid.at(s.x1, s.y1, channel) * s.fx;
    return top * (1.f - s.fy) + bot * s.fy;
}

float bilinear_sample_plane(const float* values, int height, int width, float x, float y) {
    const float cx = clampf(x, 0.f, static_cast<float>(width - 1));
    const float cy = clampf(y, 0.f, static_cast<float>(height - 1));
    const int x0 = static_cast<int>(std::floor(cx));
    const int y0 = static_cast<int>(std::floor(cy));
    const int x1 = std::min(x0 + 1, width - 1);
    const int y1 = std::min(y0 + 1, height - 1);
    const float fx = cx - static_cast<float>(x0);
    const float fy = cy - static_cast<float>(y0);
    const float* row0 = values + static_cast<size_t>(y0) * width;
    const float* row1 = values + static_cast<size_t>(y1) * width;
    const float top = row0[x0] * (1.f - fx) + row0[x1] * fx;
    const float bot = row1[x0] * (1.f - fx) + row1[x1] * fx;
    return top * (1.f - fy) + bot * fy;
}

void downsample_masked(const std::vector<float>& values, const std::vector<uint8_t>& mask,
                       int height, int width, int factor,
                       std::vector<float>& out_values, std::vector<uint8_t>& out_mask,
                       int& out_height, int& out_width) {
    if (factor < 1) fail_invalid("downsample factor must be >= 1");
    out_height = (height + factor - 1) / factor;
    out_width = (width + factor - 1) / factor;
    out_values.assign(static_cast<size_t>(out_height) * out_width, 0.f);
    out_mask.assign(static_cast<size_t>(out_height) * out_width, 0);
    for (int oy = 0; oy < out_height; ++oy) {
        for (int ox = 0; ox < out_width; ++ox) {
            double sum = 0.0;
            int n = 0;
            const int y_end = std::min((oy + 1) * factor, height);
            const int x_end = std::min((ox + 1) * factor, width);
            for (int y = oy * factor; y < y_end; ++y) {
                for (int x = ox * factor; x < x_end; ++x) {
                    const size_t i = static_cast<size_t>(y) * width + x;
                    if (mask[i]) {
                        sum += values[i];
                        ++n;
                    }
                }
            }
            const size_t o = static_cast<size_t>(oy) * out_width + ox;
            if (n > 0) {
                out_values[o] = static_cast<float>(sum / n);
                out_mask[o] = 1;
            }
        }
    }
}

SparseHintMap downsample_hints(const SparseHintMap& hints, int factor) {
    SparseHintMap out;
    downsample_masked(hints.disparity, hints.valid, hints.height, hints.width, factor,
                      out.disparity, out.valid, out.height, out.width);
    const float scale = 1.f / static_cast<float>(factor);
    for (size_t i = 0; i < out.disparity.size(); ++i) out.disparity[i] *= scale;
    return out;
}

std::vector<ImageGrid> build_pyramid(const ImageGrid& grid, int levels) {
    if (levels < 1) fail_invalid("pyramid needs at least one level");
    std::vector<ImageGrid> pyr;
    pyr.reserve(levels);
    pyr.push_back(grid);
    for (int k = 1; k < levels; ++k) {
        const ImageGrid& prev = pyr.back();
        const int h = (prev.height() + 1) / 2;
        const int w = (prev.width() + 1) / 2;
        if (h < 1 || w < 1) fail_invalid("pyramid level would be zero-sized");
        ImageGrid next(h, w, prev.channels());
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const int y_end = std::min(2 * y + 2, prev.height());
                const int x_end = std::min(2 * x + 2, prev.width());
                for (int c = 0; c < prev.channels(); ++c) {
                    float sum = 0.f;
                    int n = 0;
                    for (int yy = 2 * y; yy < y_end; ++yy)
                        for (int xx = 2 * x; xx < x_end; ++xx) {
                            sum += prev.at(xx, yy, c);
                            ++n;
                        }
                    next.at(x, y, c) = sum / static_cast<float>(n);
                }
            }
        }
        pyr.push_back(std::move(next));
    }
    return pyr;
}

}  // namespace sdgf
