#include "core/cost_volume.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/parallel.hpp"

namespace sdgf {

CostVolume::CostVolume(int h, int w, int d) : height(h), width(w), d_max(d) {
    if (h < 1 || w < 1) fail_invalid("cost volume dimensions must be >= 1");
    if (d < 2) fail_invalid("cost volume needs d_max >= 2");
    cost.assign(static_cast<size_t>(h) * w * d, 0.f);
}

void ModulationParams::validate() const {
    if (!(k > 0.f)) fail_invalid("cg.k must be positive");
    if (!(omega > 0.f)) fail_invalid("cg.omega must be positive");
    if (!(rho >= 0.f && rho <= 1.f)) fail_invalid("cg.rho must be in [0,1]");
}

CostVolume build_cost_volume(const FeatureMap& left, const FeatureMap& right, int d_max,
                             const SemiDenseHint* hint, const VolumeParams& vparams,
                             const CostParams& cparams, int threads) {
    const int h = left.height(), w = left.width();
    if (right.height() != h || right.width() != w)
        fail_invalid("cost volume: feature maps must share resolution");
    if (hint && (hint->height != h || hint->width != w))
        fail_invalid("cost volume: hint resolution must match features");
    CostVolume cv(h, w, d_max);
    const bool use_hint = hint != nullptr && vparams.hint_weight > 0.f;

    parallel_rows(h, threads, [&](int y) {
        for (int x = 0; x < w; ++x) {
            float* costs = cv.slice(x, y);
            const float conf = use_hint ? hint->confidence_p[hint->index(x, y)] : 0.f;
            const float dp = use_hint ? hint->disparity_p[hint->index(x, y)] : 0.f;
            for (int d = 0; d < d_max; ++d) {
                float c = matching_cost(left, right, x, y, d, cparams);
                if (use_hint && conf > 0.f) {
                    const float dev = std::min(std::abs(static_cast<float>(d) - dp), vparams.tau);
                    c += vparams.hint_weight * conf * dev / vparams.tau;
                }
                costs[d] = c;
            }
        }
    });
    return cv;
}

double modulation_weight(float confidence, double d, double disparity_p,
                         const ModulationParams& params) {
    if (!(confidence > params.rho)) return 1.0;
    const double dev = d - disparity_p;
    const double g = std::exp(-(dev * dev) /
                              (2.0 * static_cast<double>(params.omega) * params.omega));
    return static_cast<double>(params.k) * confidence * g;
}

void gaussian_modulate(CostVolume& cv, const SemiDenseHint& hint, const ModulationParams& params,
                       float cost_ceiling, int threads) {
    params.validate();
    if (hint.height != cv.height || hint.width != cv.width)
        fail_invalid("modulation: hint resolution must match cost volume");

    parallel_rows(cv.height, threads, [&](int y) {
        for (int x = 0; x < cv.width; ++x) {
            const float conf = hint.confidence_p[hint.index(x, y)];
            if (!(conf > params.rho)) continue;  // M = 0: bitwise identity
            const float dp = hint.disparity_p[hint.index(x, y)];
            float* costs = cv.slice(x, y);
            for (int d = 0; d < cv.d_max; ++d) {
                const float f =
                    static_cast<float>(modulation_weight(conf, static_cast<double>(d), dp, params));
                const float s = cost_ceiling - costs[d];
                costs[d] = params.k * cost_ceiling - f * s;
            }
        }
    });
}

void softargmin_disparity(const CostVolume& cv, float temperature,
                          std::vector<float>& disparity, std::vector<float>& uncertainty,
                          int threads) {
    if (!(temperature > 0.f)) fail_invalid("softargmin temperature must be positive");
    disparity.assign(static_cast<size_t>(cv.height) * cv.width, 0.f);
    uncertainty.assign(static_cast<size_t>(cv.height) * cv.width, 0.f);

    parallel_rows(cv.height, threads, [&](int y) {
        std::vector<double> p(cv.d_max);
        for (int x = 0; x < cv.width; ++x) {
            const float* costs = cv.slice(x, y);
            float cmin = costs[0];
            for (int d = 1; d < cv.d_max; ++d) cmin = std::min(cmin, costs[d]);
            double sum = 0.0;
            for (int d = 0; d < cv.d_max; ++d) {
                p[d] = std::exp(-static_cast<double>(costs[d] - cmin) / temperature);
                sum += p[d];
            }
            double mean = 0.0;
            for (int d = 0; d < cv.d_max; ++d) mean += d * p[d];
            mean /= sum;
            double var = 0.0;
            for (int d = 0; d < cv.d_max; ++d) {
                const double dev = d - mean;
                var += dev * dev * p[d];
            }
            var /= sum;
            const size_t o = static_cast<size_t>(y) * cv.width + x;
            disparity[o] = static_cast<float>(mean);
            uncertainty[o] = static_cast<float>(std::sqrt(std::max(var, 0.0)));
        }
    });
}

}  // namespace sdgf
