#include "core/metrics.hpp"

#include <cmath>
#include <sstream>

#include "core/error.hpp"
#include "core/numeric.hpp"

namespace sdgf {

std::string DepthBucket::label() const {
    std::ostringstream os;
    os << lo_m << "-" << hi_m << "m";
    return os.str();
}

std::vector<MetricReport> depth_metrics(const DepthMap& pred, const DepthMap& gt,
                                        const std::vector<DepthBucket>& buckets,
                                        const DepthMetricsOptions& options) {
    if (pred.height != gt.height || pred.width != gt.width)
        fail_invalid("depth_metrics: prediction and ground truth shapes differ");
    std::vector<MetricReport> reports;
    for (const DepthBucket& b : buckets) {
        if (!(b.hi_m > b.lo_m)) fail_invalid("depth bucket '" + b.label() + "' is empty");
        PairwiseAccumulator sq, ab, isq, iab;
        for (size_t i = 0; i < gt.depth.size(); ++i) {
            if (!gt.valid[i]) continue;
            const double g = gt.depth[i];
            if (g < b.lo_m || g >= b.hi_m) continue;
            const double p = pred.valid[i] ? pred.depth[i] : options.penalty_depth_m;
            const double e_mm = (p - g) * 1000.0;
            const double ie_per_km = (1.0 / p - 1.0 / g) * 1000.0;
            sq.add(e_mm * e_mm);
            ab.add(std::abs(e_mm));
            isq.add(ie_per_km * ie_per_km);
            iab.add(std::abs(ie_per_km));
        }
        if (sq.count() == 0) continue;  // no overlap: bucket omitted
        MetricReport r;
        r.bucket = b;
        r.valid_count = sq.count();
        const double n = static_cast<double>(sq.count());
        r.rmse_mm = std::sqrt(sq.sum() / n);
        r.mae_mm = ab.sum() / n;
        r.irmse_per_km = std::sqrt(isq.sum() / n);
        r.imae_per_km = iab.sum() / n;
        reports.push_back(r);
    }
    return reports;
}

DisparityMetrics disparity_metrics(const std::vector<float>& pred, const std::vector<float>& gt,
                                   const std::vector<uint8_t>& gt_valid) {
    if (pred.size() != gt.size() || gt.size() != gt_valid.size())
        fail_invalid("disparity_metrics: shapes differ");
    PairwiseAccumulator abs_err;
    size_t outliers = 0;
    for (size_t i = 0; i < gt.size(); ++i) {
        if (!gt_valid[i]) continue;
        const double err = std::abs(static_cast<double>(pred[i]) - gt[i]);
        abs_err.add(err);
        if (err > 3.0 && err > 0.05 * gt[i]) ++outliers;
    }
    if (abs_err.count() == 0) fail_invalid("disparity_metrics: no valid ground-truth pixels");
    DisparityMetrics m;
    m.valid_count = abs_err.count();
    m.epe_px = abs_err.sum() / static_cast<double>(abs_err.count());
    m.d1_pct = 100.0 * static_cast<double>(outliers) / static_cast<double>(abs_err.count());
    return m;
}

std::vector<DepthBucket> parse_buckets(const std::string& spec) {
    std::vector<DepthBucket> buckets;
    std::istringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const size_t dash = item.find('-', 1);  // skip a possible leading sign
        if (dash == std::string::npos)
            fail_config("bucket '" + item + "' must look like LO-HI (meters)");
        DepthBucket b;
        try {
            b.lo_m = std::stod(item.substr(0, dash));
            b.hi_m = std::stod(item.substr(dash + 1));
        } catch (const std::exception&) {
            fail_config("bucket '" + item + "' has non-numeric bounds");
        }
        if (!(b.hi_m > b.lo_m) || b.lo_m < 0.0)
            fail_config("bucket '" + item + "' must satisfy 0 <= lo < hi");
        buckets.push_back(b);
    }
    if (buckets.empty()) fail_config("no depth buckets given");
    return buckets;
}

}  // namespace sdgf
