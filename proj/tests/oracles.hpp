// Naive reference implementations used as oracles. Everything here is written
// as direct triple loops in double precision, independent of the production
// code paths it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "core/features.hpp"
#include "core/raster.hpp"

namespace sdgf::oracle {

inline double clampd(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

// independent bilinear sampler with clamp-to-edge
inline double naive_bilinear(const std::vector<double>& plane, int h, int w, double x, double y) {
    x = clampd(x, 0.0, w - 1.0);
    y = clampd(y, 0.0, h - 1.0);
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fx = x - x0, fy = y - y0;
    const double top = plane[y0 * w + x0] * (1 - fx) + plane[y0 * w + x1] * fx;
    const double bot = plane[y1 * w + x0] * (1 - fx) + plane[y1 * w + x1] * fx;
    return top * (1 - fy) + bot * fy;
}

struct NaivePropagation {
    std::vector<double> weights;  // h*w*P^2
    std::vector<double> dp;       // h*w
    std::vector<double> cp;       // h*w
};

// Direct evaluation of the propagation contract: per pixel, softmax over the
// P^2 window of norm-scaled feature dot products, then the weighted sums of
// bilinearly sampled disparity and mask.
inline NaivePropagation naive_propagation(const FeatureMap& features,
                                          const std::vector<float>& offsets,  // h*w*P^2*2
                                          const std::vector<float>& disparity,
                                          const std::vector<float>& mask, int P, int dilation,
                                          double temperature) {
    const int h = features.height(), w = features.width();
    const int n = P * P;
    const int nch = features.grid.channels();
    const int half = P / 2;

    // per-channel planes in double precision
    std::vector<std::vector<double>> planes(nch, std::vector<double>(h * w));
    for (int c = 0; c < nch; ++c)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) planes[c][y * w + x] = features.grid.at(x, y, c);
    std::vector<double> disp(disparity.begin(), disparity.end());
    std::vector<double> msk(mask.begin(), mask.end());

    NaivePropagation out;
    out.weights.assign(static_cast<size_t>(h) * w * n, 0.0);
    out.dp.assign(static_cast<size_t>(h) * w, 0.0);
    out.cp.assign(static_cast<size_t>(h) * w, 0.0);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::vector<double> logits(n);
            std::vector<double> sx(n), sy(n);
            double cnorm = 0;
            for (int c = 0; c < nch; ++c) cnorm += planes[c][y * w + x] * planes[c][y * w + x];
            cnorm = std::sqrt(cnorm);
            int i = 0;
            for (int v = -half; v <= half; ++v)
                for (int u = -half; u <= half; ++u, ++i) {
                    const size_t ob = ((static_cast<size_t>(y) * w + x) * n + i) * 2;
                    sx[i] = x + dilation * (u + static_cast<double>(offsets[ob]));
                    sy[i] = y + dilation * (v + static_cast<double>(offsets[ob + 1]));
                    double dot = 0, norm = 0;
                    for (int c = 0; c < nch; ++c) {
                        const double s = naive_bilinear(planes[c], h, w, sx[i], sy[i]);
                        dot += planes[c][y * w + x] * s;
                        norm += s * s;
                    }
                    logits[i] = dot / (std::max(cnorm * std::sqrt(norm), 1e-12) * temperature);
                }
            const double m = *std::max_element(logits.begin(), logits.end());
            double sum = 0;
            for (int k = 0; k < n; ++k) sum += std::exp(logits[k] - m);
            for (int k = 0; k < n; ++k) {
                const double a = std::exp(logits[k] - m) / sum;
                out.weights[(static_cast<size_t>(y) * w + x) * n + k] = a;
                out.dp[y * w + x] += a * naive_bilinear(disp, h, w, sx[k], sy[k]);
                out.cp[y * w + x] += a * naive_bilinear(msk, h, w, sx[k], sy[k]);
            }
        }
    }
    return out;
}

}  // namespace sdgf::oracle
