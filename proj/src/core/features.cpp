#include "core/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"

namespace sdgf {

ImageGrid to_luma(const ImageGrid& image) {
    if (image.channels() == 1) return image;
    if (image.channels() != 3) fail_invalid("to_luma: image must have 1 or 3 channels");
    ImageGrid out(image.height(), image.width(), 1);
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x)
            out.at(x, y) = 0.299f * image.at(x, y, 0) + 0.587f * image.at(x, y, 1) +
                           0.114f * image.at(x, y, 2);
    return out;
}

namespace {

inline int clampi(int v, int lo, int hi) { return std::min(hi, std::max(lo, v)); }

// Summed-area table with one guard row/column of zeros.
std::vector<double> integral_image(const ImageGrid& luma) {
    const int h = luma.height(), w = luma.width();
    std::vector<double> sat(static_cast<size_t>(h + 1) * (w + 1), 0.0);
    for (int y = 0; y < h; ++y) {
        double row = 0.0;
        for (int x = 0; x < w; ++x) {
            row += luma.at(x, y);
            sat[static_cast<size_t>(y + 1) * (w + 1) + (x + 1)] =
                sat[static_cast<size_t>(y) * (w + 1) + (x + 1)] + row;
        }
    }
    return sat;
}

float box_mean(const std::vector<double>& sat, int h, int w, int x, int y, int r) {
    const int x0 = clampi(x - r, 0, w - 1), x1 = clampi(x + r, 0, w - 1);
    const int y0 = clampi(y - r, 0, h - 1), y1 = clampi(y + r, 0, h - 1);
    const size_t stride = w + 1;
    const double sum = sat[static_cast<size_t>(y1 + 1) * stride + (x1 + 1)] -
                       sat[static_cast<size_t>(y0) * stride + (x1 + 1)] -
                       sat[static_cast<size_t>(y1 + 1) * stride + (x0)] +
                       sat[static_cast<size_t>(y0) * stride + (x0)];
    const int area = (x1 - x0 + 1) * (y1 - y0 + 1);
    return static_cast<float>(sum / area);
}

}  // namespace

FeatureMap extract_features(const ImageGrid& image, const FeatureParams& params) {
    if (params.census_window < 3 || params.census_window % 2 == 0)
        fail_invalid("census window must be odd and >= 3, got " +
                     std::to_string(params.census_window));
    const ImageGrid luma = to_luma(image);
    const int h = luma.height(), w = luma.width();
    const int cw = params.census_window;
    const int half = cw / 2;
    const int n_census = cw * cw - 1;
    const int n_ctx = static_cast<int>(params.context_radii.size());

    FeatureMap fm;
    fm.census_channels = n_census;
    fm.context_channels = n_ctx;
    fm.grid = ImageGrid(h, w, n_census + 2 + n_ctx);
    const std::vector<double> sat = integral_image(luma);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            auto px = fm.grid.pixel(x, y);
            const float center = luma.at(x, y);
            int ch = 0;
            for (int dy = -half; dy <= half; ++dy) {
                for (int dx = -half; dx <= half; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const float nb = luma.at(clampi(x + dx, 0, w - 1), clampi(y + dy, 0, h - 1));
                    px[ch++] = nb >= center ? 1.f : -1.f;
                }
            }
            const float gx = 0.5f * (luma.at(clampi(x + 1, 0, w - 1), y) -
                                     luma.at(clampi(x - 1, 0, w - 1), y));
            const float gy = 0.5f * (luma.at(x, clampi(y + 1, 0, h - 1)) -
                                     luma.at(x, clampi(y - 1, 0, h - 1)));
            px[ch++] = gx;
            px[ch++] = gy;
            for (int r : params.context_radii) px[ch++] = box_mean(sat, h, w, x, y, r);
        }
    }
    return fm;
}

float matching_cost(const FeatureMap& left, const FeatureMap& right, int x, int y, int d,
                    const CostParams& params) {
    if (x - d < 0 || x - d >= right.width()) return params.max_cost;
    const auto a = left.grid.pixel(x, y);
    const auto b = right.grid.pixel(x - d, y);
    const int nc = left.census_channels;
    int mismatches = 0;
    for (int c = 0; c < nc; ++c)
        if (a[c] != b[c]) ++mismatches;
    const float hamming = static_cast<float>(mismatches) / static_cast<float>(nc);
    const int g = left.gradient_offset();
    const float grad_diff = std::abs(a[g] - b[g]) + std::abs(a[g + 1] - b[g + 1]);
    const float cost = params.census_w * hamming + params.grad_w * grad_diff;
    return std::min(cost, params.max_cost);
}

}  // namespace sdgf
