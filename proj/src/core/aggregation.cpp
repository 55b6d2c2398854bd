#include "core/aggregation.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/parallel.hpp"

namespace sdgf {

namespace {

constexpr float kEdgeScale = 10.f;  // contrast sensitivity of the p2 reduction

struct PathDir {
    int dx, dy;
};

// Fixed path order keeps the accumulation bit-deterministic.
constexpr PathDir kPaths8[8] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1},
                                {-1, -1}, {1, -1}, {-1, 1}, {1, 1}};

// Walks one scanline of one path, adding L values into acc (double precision,
// so the zero-penalty identity and path order stay exact). Scanlines of a
// single path never share pixels, so they can run in parallel.
void walk_line(const CostVolume& cv, const ImageGrid& luma, const AggregationParams& params,
               int x0, int y0, int dx, int dy, std::vector<double>& acc) {
    const int dmax = cv.d_max;
    std::vector<float> prev(dmax), cur(dmax);
    float prev_min = 0.f;
    float prev_intensity = 0.f;
    bool first = true;
    int x = x0, y = y0;
    while (x >= 0 && x < cv.width && y >= 0 && y < cv.height) {
        const float* c = cv.slice(x, y);
        double* a = acc.data() + cv.index(x, y, 0);
        float cur_min = 0.f;
        if (first) {
            for (int d = 0; d < dmax; ++d) {
                cur[d] = c[d];
                a[d] += cur[d];
                cur_min = d == 0 ? cur[d] : std::min(cur_min, cur[d]);
            }
            first = false;
        } else {
            const float intensity = luma.at(x, y);
            const float p2 =
                std::max(params.p1,
                         params.p2 / (1.f + kEdgeScale * std::abs(intensity - prev_intensity)));
            for (int d = 0; d < dmax; ++d) {
                float best = prev[d];
                if (d > 0) best = std::min(best, prev[d - 1] + params.p1);
                if (d + 1 < dmax) best = std::min(best, prev[d + 1] + params.p1);
                best = std::min(best, prev_min + p2);
                // subtract first: keeps the zero-penalty recurrence an exact no-op
                cur[d] = c[d] + (best - prev_min);
                a[d] += cur[d];
                cur_min = d == 0 ? cur[d] : std::min(cur_min, cur[d]);
            }
        }
        prev_min = cur_min;
        prev_intensity = luma.at(x, y);
        std::swap(prev, cur);
        x += dx;
        y += dy;
    }
}

}  // namespace

void AggregationParams::validate() const {
    if (p1 < 0.f || p2 < p1) fail_invalid("sgm penalties require 0 <= p1 <= p2");
    if (paths != 4 && paths != 8) fail_invalid("sgm path count must be 4 or 8");
    if (lambda_u < 0.f) fail_invalid("agg.lambda_u must be >= 0");
    if (r_min < 1) fail_invalid("agg.r_min must be >= 1");
}

CostVolume sgm_aggregate(const CostVolume& cv, const ImageGrid& luma,
                         const AggregationParams& params, int paths, int threads) {
    params.validate();
    if (paths != 4 && paths != 8) fail_invalid("sgm path count must be 4 or 8");
    if (luma.height() != cv.height || luma.width() != cv.width)
        fail_invalid("sgm: guide image must match volume resolution");

    std::vector<double> acc(cv.cost.size(), 0.0);
    for (int p = 0; p < paths; ++p) {
        const PathDir dir = kPaths8[p];
        // collect the scanline start pixels: those whose predecessor is outside
        std::vector<std::pair<int, int>> starts;
        for (int y = 0; y < cv.height; ++y)
            for (int x = 0; x < cv.width; ++x) {
                const int px = x - dir.dx, py = y - dir.dy;
                if (px < 0 || px >= cv.width || py < 0 || py >= cv.height)
                    starts.emplace_back(x, y);
            }
        parallel_for_blocks(static_cast<int>(starts.size()), threads, 4, [&](int begin, int end) {
            for (int i = begin; i < end; ++i)
                walk_line(cv, luma, params, starts[i].first, starts[i].second, dir.dx, dir.dy, acc);
        });
    }
    CostVolume out(cv.height, cv.width, cv.d_max);
    const double inv = 1.0 / static_cast<double>(paths);
    for (size_t i = 0; i < acc.size(); ++i) out.cost[i] = static_cast<float>(acc[i] * inv);
    return out;
}

SearchRange range_from_uncertainty(const std::vector<float>& disparity,
                                   const std::vector<float>& uncertainty, int height, int width,
                                   float lambda_u, int r_min, int d_max) {
    if (disparity.size() != uncertainty.size() ||
        disparity.size() != static_cast<size_t>(height) * width)
        fail_invalid("range_from_uncertainty: map shapes must match");
    SearchRange r;
    r.height = height;
    r.width = width;
    r.d_max = d_max;
    r.lo.resize(disparity.size());
    r.hi.resize(disparity.size());
    const int min_width = std::min(r_min, d_max - 1);
    for (size_t i = 0; i < disparity.size(); ++i) {
        const float half = lambda_u * uncertainty[i] + static_cast<float>(r_min);
        int lo = static_cast<int>(std::lround(2.0 * (disparity[i] - half)));
        int hi = static_cast<int>(std::lround(2.0 * (disparity[i] + half)));
        lo = std::clamp(lo, 0, d_max - 1);
        hi = std::clamp(hi, 0, d_max - 1);
        if (hi - lo < min_width) {
            lo = std::max(0, hi - min_width);
            hi = std::min(d_max - 1, lo + min_width);
        }
        r.lo[i] = lo;
        r.hi[i] = hi;
    }
    return r;
}

namespace {

// Box-mean reduction of a semi-dense hint by 2^level; disparities halve per level.
SemiDenseHint reduce_hint(const SemiDenseHint& hint, int level) {
    if (level == 0) return hint;
    SemiDenseHint cur = hint;
    for (int l = 0; l < level; ++l) {
        const int h = (cur.height + 1) / 2, w = (cur.width + 1) / 2;
        SemiDenseHint next;
        next.height = h;
        next.width = w;
        next.disparity_p.assign(static_cast<size_t>(h) * w, 0.f);
        next.confidence_p.assign(static_cast<size_t>(h) * w, 0.f);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                float dsum = 0.f, csum = 0.f;
                int n = 0;
                for (int yy = 2 * y; yy < std::min(2 * y + 2, cur.height); ++yy)
                    for (int xx = 2 * x; xx < std::min(2 * x + 2, cur.width); ++xx) {
                        dsum += cur.disparity_p[cur.index(xx, yy)];
                        csum += cur.confidence_p[cur.index(xx, yy)];
                        ++n;
                    }
                next.disparity_p[next.index(x, y)] = 0.5f * dsum / n;
                next.confidence_p[next.index(x, y)] = csum / n;
            }
        cur = std::move(next);
    }
    return cur;
}

}  // namespace

CoarseToFineResult coarse_to_fine(const std::vector<FeatureMap>& left_pyr,
                                  const std::vector<FeatureMap>& right_pyr,
                                  const std::vector<ImageGrid>& luma_pyr,
                                  const SemiDenseHint& hint_quarter,
                                  const CoarseToFineConfig& cfg,
                                  std::vector<CostVolume>* volume_dump) {
    const int levels = cfg.levels;
    if (levels < 1) fail_invalid("coarse_to_fine: needs at least one level");
    if (static_cast<int>(left_pyr.size()) < levels ||
        static_cast<int>(right_pyr.size()) < levels ||
        static_cast<int>(luma_pyr.size()) < levels)
        fail_invalid("coarse_to_fine: pyramid shorter than configured level count");
    if (hint_quarter.height != left_pyr[0].height() || hint_quarter.width != left_pyr[0].width())
        fail_invalid("coarse_to_fine: hint must be at quarter resolution");

    CoarseToFineResult res;
    SearchRange range;      // produced at level i+1, consumed at level i
    bool have_range = false;

    for (int i = levels - 1; i >= 0; --i) {
        const FeatureMap& lf = left_pyr[i];
        const FeatureMap& rf = right_pyr[i];
        const int h = lf.height(), w = lf.width();
        const int scale = 4 << i;  // level scale relative to full resolution
        const int d_max = std::max(2, (cfg.volume.d_max + scale - 1) / scale);

        const SemiDenseHint hint = reduce_hint(hint_quarter, i);
        const bool hint_on = cfg.volume.hint_weight > 0.f;
        CostVolume cv = build_cost_volume(lf, rf, d_max, hint_on ? &hint : nullptr, cfg.volume,
                                          cfg.cost, cfg.threads);
        const float ceiling = volume_cost_ceiling(cfg.volume, cfg.cost, hint_on);

        if (cfg.cg_enabled) {
            ModulationParams level_cg = cfg.cg;
            level_cg.omega = std::max(cfg.cg.omega / static_cast<float>(1 << i), 0.5f);
            gaussian_modulate(cv, hint, level_cg, ceiling, cfg.threads);
        }

        if (have_range) {
            // mask disparities outside the parent's window to the worst cost
            const float wall = cfg.cg.k * ceiling;
            for (int y = 0; y < h; ++y) {
                const int py = std::min(y / 2, range.height - 1);
                for (int x = 0; x < w; ++x) {
                    const int px = std::min(x / 2, range.width - 1);
                    const size_t ri = range.index(px, py);
                    float* costs = cv.slice(x, y);
                    for (int d = 0; d < range.lo[ri]; ++d) costs[d] = wall;
                    for (int d = range.hi[ri] + 1; d < d_max; ++d) costs[d] = wall;
                }
            }
        }

        const int level_paths = (i == levels - 1) ? cfg.agg.paths : std::min(cfg.agg.paths, 4);
        CostVolume agg = sgm_aggregate(cv, luma_pyr[i], cfg.agg, level_paths, cfg.threads);
        if (volume_dump) volume_dump->push_back(agg);

        std::vector<float> disp, unc;
        softargmin_disparity(agg, cfg.softargmin_t, disp, unc, cfg.threads);

        if (i > 0) {
            const int finer_scale = 4 << (i - 1);
            const int finer_dmax = std::max(2, (cfg.volume.d_max + finer_scale - 1) / finer_scale);
            range = range_from_uncertainty(disp, unc, h, w, cfg.agg.lambda_u, cfg.agg.r_min,
                                           finer_dmax);
            have_range = true;
        } else {
            res.height = h;
            res.width = w;
            res.disparity = std::move(disp);
            res.uncertainty = std::move(unc);
        }
    }
    return res;
}

std::vector<float> upsample_x4_bilinear(const std::vector<float>& quarter, int qheight,
                                        int qwidth, int height, int width, int threads) {
    if ((qheight != (height + 3) / 4) || (qwidth != (width + 3) / 4))
        fail_invalid("upsample: quarter map does not match target dimensions");
    std::vector<float> out(static_cast<size_t>(height) * width, 0.f);
    parallel_rows(height, threads, [&](int Y) {
        for (int X = 0; X < width; ++X) {
            // quarter-pixel centers sit at full-resolution (4qx+1.5, 4qy+1.5)
            const float u = (static_cast<float>(X) - 1.5f) / 4.f;
            const float v = (static_cast<float>(Y) - 1.5f) / 4.f;
            out[static_cast<size_t>(Y) * width + X] =
                bilinear_sample_plane(quarter.data(), qheight, qwidth, u, v);
        }
    });
    return out;
}

std::vector<float> upsample_disparity(const std::vector<float>& d_quarter, int qheight,
                                      int qwidth, const ImageGrid& guide_luma, float sigma_range,
                                      int threads) {
    const int H = guide_luma.height(), W = guide_luma.width();
    if ((qheight != (H + 3) / 4) || (qwidth != (W + 3) / 4))
        fail_invalid("upsample_disparity: quarter map does not match guide dimensions");
    const bool use_range = sigma_range > 0.f;
    if (!use_range) {
        std::vector<float> out = upsample_x4_bilinear(d_quarter, qheight, qwidth, H, W, threads);
        for (float& v : out) v *= 4.f;
        return out;
    }
    std::vector<float> out(static_cast<size_t>(H) * W, 0.f);
    const float inv2s2 = 1.f / (2.f * sigma_range * sigma_range);

    parallel_rows(H, threads, [&](int Y) {
        for (int X = 0; X < W; ++X) {
            const float u = (static_cast<float>(X) - 1.5f) / 4.f;
            const float v = (static_cast<float>(Y) - 1.5f) / 4.f;
            const float cu = std::clamp(u, 0.f, static_cast<float>(qwidth - 1));
            const float cv_ = std::clamp(v, 0.f, static_cast<float>(qheight - 1));
            const int x0 = static_cast<int>(std::floor(cu));
            const int y0 = static_cast<int>(std::floor(cv_));
            const float fx = cu - x0, fy = cv_ - y0;
            const float ref = guide_luma.at(X, Y);
            float wsum = 0.f, dsum = 0.f;
            for (int dy = 0; dy <= 1; ++dy) {
                const int qy = std::min(y0 + dy, qheight - 1);
                const float wy = dy == 0 ? 1.f - fy : fy;
                for (int dx = 0; dx <= 1; ++dx) {
                    const int qx = std::min(x0 + dx, qwidth - 1);
                    const float wx = dx == 0 ? 1.f - fx : fx;
                    const float gq = bilinear_sample(guide_luma, 4.f * qx + 1.5f, 4.f * qy + 1.5f, 0);
                    const float diff = ref - gq;
                    const float wr = std::exp(-diff * diff * inv2s2);
                    const float wgt = wx * wy * wr;
                    wsum += wgt;
                    dsum += wgt * d_quarter[static_cast<size_t>(qy) * qwidth + qx];
                }
            }
            out[static_cast<size_t>(Y) * W + X] = wsum > 0.f ? 4.f * dsum / wsum : 0.f;
        }
    });
    return out;
}

}  // namespace sdgf
