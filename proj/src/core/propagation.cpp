#include "core/propagation.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/image_io.hpp"
#include "core/parallel.hpp"

namespace sdgf {

namespace {

constexpr float kEdgeGradSat = 0.25f;   // gradient magnitude that fully collapses a step
constexpr double kNormEps = 1e-12;
constexpr float kConfidenceEps = 1e-6f;

void check_window(int window) {
    if (window < 3 || window % 2 == 0)
        fail_invalid("propagation window must be odd and >= 3, got " + std::to_string(window));
}

}  // namespace

void OffsetField::validate() const {
    if (height < 1 || width < 1) fail_invalid("offset field: empty");
    check_window(window);
    for (float v : data) {
        if (!std::isfinite(v) || v < -1.f || v > 1.f)
            fail_invalid("offset field: component " + std::to_string(v) + " outside [-1,1]");
    }
}

OffsetField zero_offset_field(int height, int width, int window) {
    check_window(window);
    OffsetField f;
    f.height = height;
    f.width = width;
    f.window = window;
    f.data.assign(static_cast<size_t>(height) * width * window * window * 2, 0.f);
    return f;
}

OffsetField edge_aware_offset_field(const FeatureMap& features, int window, int dilation) {
    check_window(window);
    if (dilation < 1) fail_invalid("dilation must be >= 1");
    const int h = features.height(), w = features.width();
    const int gc = features.gradient_offset();
    OffsetField f = zero_offset_field(h, w, window);
    const int half = window / 2;
    const int steps = 2 * dilation;  // gradient probes along the segment

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            float* off = f.data.data() + f.base(x, y);
            int i = 0;
            for (int v = -half; v <= half; ++v) {
                for (int u = -half; u <= half; ++u, ++i) {
                    if (u == 0 && v == 0) continue;
                    float gmax = 0.f;
                    for (int s = 1; s <= steps; ++s) {
                        const float t = static_cast<float>(s) / steps;
                        const float sx = x + t * dilation * u;
                        const float sy = y + t * dilation * v;
                        const float gx = bilinear_sample(features.grid, sx, sy, gc);
                        const float gy = bilinear_sample(features.grid, sx, sy, gc + 1);
                        gmax = std::max(gmax, std::hypot(gx, gy));
                    }
                    const float shrink = std::min(1.f, gmax / kEdgeGradSat);
                    off[2 * i] = std::clamp(-shrink * u, -1.f, 1.f);
                    off[2 * i + 1] = std::clamp(-shrink * v, -1.f, 1.f);
                }
            }
        }
    }
    return f;
}

OffsetField load_offset_field(const std::string& path, int height, int width, int window) {
    check_window(window);
    const ImageGrid stack = read_pfm(path);
    const int planes = window * window * 2;
    if (stack.height() != height || stack.width() != width || stack.channels() != planes)
        fail_io("offset field '" + path + "': expected " + std::to_string(height) + "x" +
                std::to_string(width) + " with " + std::to_string(planes) + " planes, got " +
                std::to_string(stack.height()) + "x" + std::to_string(stack.width()) + " with " +
                std::to_string(stack.channels()));
    OffsetField f;
    f.height = height;
    f.width = width;
    f.window = window;
    f.data.resize(static_cast<size_t>(height) * width * planes);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            float* off = f.data.data() + f.base(x, y);
            for (int p = 0; p < planes; ++p) off[p] = stack.at(x, y, p);
        }
    try {
        f.validate();
    } catch (const Error& e) {
        fail_io("offset field '" + path + "': " + e.what());
    }
    return f;
}

void save_offset_field(const std::string& path, const OffsetField& field) {
    const int planes = field.window * field.window * 2;
    ImageGrid stack(field.height, field.width, planes);
    for (int y = 0; y < field.height; ++y)
        for (int x = 0; x < field.width; ++x) {
            const float* off = field.data.data() + field.base(x, y);
            for (int p = 0; p < planes; ++p) stack.at(x, y, p) = off[p];
        }
    write_pfm(path, stack);
}

void deform_window(int x, int y, int window, int dilation, const OffsetField* offsets,
                   std::span<float> xs, std::span<float> ys) {
    check_window(window);
    if (dilation < 1) fail_invalid("dilation must be >= 1");
    const int half = window / 2;
    const float* off = offsets ? offsets->data.data() + offsets->base(x, y) : nullptr;
    int i = 0;
    for (int v = -half; v <= half; ++v) {
        for (int u = -half; u <= half; ++u, ++i) {
            const float ox = off ? off[2 * i] : 0.f;
            const float oy = off ? off[2 * i + 1] : 0.f;
            xs[i] = static_cast<float>(x) + dilation * (static_cast<float>(u) + ox);
            ys[i] = static_cast<float>(y) + dilation * (static_cast<float>(v) + oy);
        }
    }
}

PropagationWeights propagation_weights(const FeatureMap& features, const OffsetField& offsets,
                                       int dilation, double temperature, int threads) {
    const int h = features.height(), w = features.width();
    if (offsets.height != h || offsets.width != w)
        fail_invalid("offset field resolution does not match features");
    if (!(temperature > 0.0)) fail_invalid("softmax temperature must be positive");
    const int P = offsets.window;
    const int n = P * P;
    const int nch = features.grid.channels();

    PropagationWeights out;
    out.height = h;
    out.width = w;
    out.window = P;
    out.data.assign(static_cast<size_t>(h) * w * n, 0.f);

    parallel_rows(h, threads, [&](int y) {
        std::vector<float> xs(n), ys(n), sample(nch);
        std::vector<double> logits(n);
        for (int x = 0; x < w; ++x) {
            deform_window(x, y, P, dilation, &offsets, xs, ys);
            const auto center = features.grid.pixel(x, y);
            double center_norm = 0.0;
            for (int c = 0; c < nch; ++c) center_norm += static_cast<double>(center[c]) * center[c];
            center_norm = std::sqrt(center_norm);
            for (int i = 0; i < n; ++i) {
                bilinear_sample(features.grid, xs[i], ys[i], sample);
                double dot = 0.0, norm = 0.0;
                for (int c = 0; c < nch; ++c) {
                    dot += static_cast<double>(center[c]) * sample[c];
                    norm += static_cast<double>(sample[c]) * sample[c];
                }
                norm = std::sqrt(norm);
                logits[i] = dot / (std::max(center_norm * norm, kNormEps) * temperature);
            }
            const double max_logit = *std::max_element(logits.begin(), logits.end());
            double sum = 0.0;
            float* wrow = out.data.data() + out.base(x, y);
            for (int i = 0; i < n; ++i) {
                const double e = std::exp(logits[i] - max_logit);
                wrow[i] = static_cast<float>(e);
                sum += e;
            }
            const float inv = static_cast<float>(1.0 / sum);
            for (int i = 0; i < n; ++i) wrow[i] *= inv;
        }
    });
    return out;
}

void propagate_masked(const std::vector<float>& values, const std::vector<float>& mask,
                      int height, int width, const PropagationWeights& weights,
                      const OffsetField& offsets, int dilation,
                      std::vector<float>& value_out, std::vector<float>& mass_out, int threads) {
    if (weights.height != height || weights.width != width ||
        offsets.height != height || offsets.width != width)
        fail_invalid("propagate: hint, weight and offset resolutions must match");
    if (weights.window != offsets.window)
        fail_invalid("propagate: weight and offset window sizes must match");
    const int P = weights.window;
    const int n = P * P;
    value_out.assign(static_cast<size_t>(height) * width, 0.f);
    mass_out.assign(static_cast<size_t>(height) * width, 0.f);

    parallel_rows(height, threads, [&](int y) {
        std::vector<float> xs(n), ys(n);
        for (int x = 0; x < width; ++x) {
            deform_window(x, y, P, dilation, &offsets, xs, ys);
            const float* wrow = weights.data.data() + weights.base(x, y);
            double val = 0.0, mass = 0.0;
            for (int i = 0; i < n; ++i) {
                val += static_cast<double>(wrow[i]) *
                       bilinear_sample_plane(values.data(), height, width, xs[i], ys[i]);
                mass += static_cast<double>(wrow[i]) *
                        bilinear_sample_plane(mask.data(), height, width, xs[i], ys[i]);
            }
            const size_t o = static_cast<size_t>(y) * width + x;
            value_out[o] = static_cast<float>(val);
            mass_out[o] = static_cast<float>(mass);
        }
    });
}

SemiDenseHint propagate(const SparseHintMap& hints, const PropagationWeights& weights,
                        const OffsetField& offsets, int dilation, bool normalize, int threads) {
    std::vector<float> mask_f(hints.valid.size());
    for (size_t i = 0; i < hints.valid.size(); ++i) mask_f[i] = static_cast<float>(hints.valid[i]);

    SemiDenseHint out;
    out.height = hints.height;
    out.width = hints.width;
    propagate_masked(hints.disparity, mask_f, hints.height, hints.width, weights, offsets,
                     dilation, out.disparity_p, out.confidence_p, threads);

    for (float& c : out.confidence_p) c = std::clamp(c, 0.f, 1.f);
    for (float& d : out.disparity_p) d = std::max(d, 0.f);
    if (normalize) {
        for (size_t i = 0; i < out.disparity_p.size(); ++i)
            if (out.confidence_p[i] > kConfidenceEps) out.disparity_p[i] /= out.confidence_p[i];
    }
    return out;
}

SemiDenseHint confidence_normalized(const SemiDenseHint& hint) {
    SemiDenseHint out = hint;
    for (size_t i = 0; i < out.disparity_p.size(); ++i)
        if (out.confidence_p[i] > kConfidenceEps) out.disparity_p[i] /= out.confidence_p[i];
    return out;
}

}  // namespace sdgf
