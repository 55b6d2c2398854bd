#include "core/depth_conversion.hpp"

#include <algorithm>
#include <cmath>

#include "core/aggregation.hpp"
#include "core/error.hpp"
#include "core/image_io.hpp"

namespace sdgf {

void ResidualMaps::validate() const {
    for (float v : delta1)
        if (!std::isfinite(v) || std::abs(v) > kDelta1Clamp)
            fail_invalid("delta1 outside [-0.2, 0.2]");
    for (float v : delta2)
        if (!std::isfinite(v) || std::abs(v) > kDelta2Clamp)
            fail_invalid("delta2 outside [-0.6, 0.6]");
}

DepthMap triangulate(const std::vector<float>& disparity, int height, int width,
                     const CameraRig& rig, const ResidualMaps& residuals) {
    rig.validate();
    if (disparity.size() != static_cast<size_t>(height) * width)
        fail_invalid("triangulate: disparity size mismatch");
    if (residuals.height != height || residuals.width != width)
        fail_invalid("triangulate: residual maps must match disparity shape");
    const double bf = rig.bf();
    DepthMap out(height, width);
    for (size_t i = 0; i < disparity.size(); ++i) {
        const double d = static_cast<double>(disparity[i]) + residuals.delta1[i];
        if (d <= kDisparityEps) continue;  // singular, stays invalid
        const double g = bf / d + residuals.delta2[i];
        if (g <= 0.0) continue;
        out.depth[i] = static_cast<float>(g);
        out.valid[i] = 1;
    }
    return out;
}

ErrorMap warp_error_map(const ImageGrid& left, const ImageGrid& right,
                        const std::vector<float>& disparity) {
    if (!left.same_shape(right)) fail_invalid("warp_error_map: image shapes must match");
    if (disparity.size() != static_cast<size_t>(left.height()) * left.width())
        fail_invalid("warp_error_map: disparity size mismatch");
    ErrorMap out;
    out.error = ImageGrid(left.height(), left.width(), left.channels());
    out.valid.assign(disparity.size(), 0);
    std::vector<float> sample(left.channels());
    for (int y = 0; y < left.height(); ++y)
        for (int x = 0; x < left.width(); ++x) {
            const size_t i = static_cast<size_t>(y) * left.width() + x;
            const float sx = static_cast<float>(x) - disparity[i];
            if (sx < 0.f || sx > static_cast<float>(left.width() - 1)) continue;
            bilinear_sample(right, sx, static_cast<float>(y), sample);
            for (int c = 0; c < left.channels(); ++c)
                out.error.at(x, y, c) = left.at(x, y, c) - sample[c];
            out.valid[i] = 1;
        }
    return out;
}

ResidualMaps lidar_anchored_residuals(const std::vector<float>& disparity, int height, int width,
                                      const CameraRig& rig, const DepthMap& lidar,
                                      const ImageGrid& left_image,
                                      const LidarResidualConfig& config) {
    rig.validate();
    if (lidar.height != height || lidar.width != width)
        fail_invalid("lidar residuals: hint map must match disparity shape");
    ResidualMaps out(height, width);

    // depth residual at each hint pixel where the predicted depth is usable
    std::vector<float> r(static_cast<size_t>(height) * width, 0.f);
    std::vector<float> mask(r.size(), 0.f);
    const double bf = rig.bf();
    size_t n_anchors = 0;
    for (size_t i = 0; i < r.size(); ++i) {
        if (!lidar.valid[i]) continue;
        if (disparity[i] <= kDisparityEps) continue;
        r[i] = static_cast<float>(lidar.depth[i] - bf / disparity[i]);
        mask[i] = 1.f;
        ++n_anchors;
    }
    if (n_anchors == 0) return out;  // no hints, zero residuals

    // pool to quarter resolution (plain block mean, residuals keep their units)
    std::vector<float> rq, mq_u8f;
    std::vector<uint8_t> mq;
    int qh, qw;
    {
        std::vector<uint8_t> m8(mask.size());
        for (size_t i = 0; i < mask.size(); ++i) m8[i] = mask[i] > 0.f ? 1 : 0;
        downsample_masked(r, m8, height, width, 4, rq, mq, qh, qw);
    }
    mq_u8f.resize(mq.size());
    for (size_t i = 0; i < mq.size(); ++i) mq_u8f[i] = static_cast<float>(mq[i]);

    // propagate with the hint machinery: zero offsets, confidence-normalized
    const ImageGrid quarter = build_pyramid(left_image, 3).back();
    FeatureMap feats = extract_features(quarter, config.features);
    if (feats.height() != qh || feats.width() != qw)
        fail_compute("lidar residuals: quarter pyramid does not match pooled hints");
    const OffsetField offsets = zero_offset_field(qh, qw, config.window);
    const PropagationWeights weights =
        propagation_weights(feats, offsets, 2, config.temperature, config.threads);
    std::vector<float> value_q, massq;
    propagate_masked(rq, mq_u8f, qh, qw, weights, offsets, 2, value_q, massq, config.threads);

    // normalized residual where enough weight landed on anchors; upsample x4
    std::vector<float> delta_q(value_q.size(), 0.f);
    for (size_t i = 0; i < value_q.size(); ++i)
        if (massq[i] > config.rho) delta_q[i] = value_q[i] / massq[i];
    const std::vector<float> delta_full =
        upsample_x4_bilinear(delta_q, qh, qw, height, width, config.threads);
    for (size_t i = 0; i < out.delta2.size(); ++i)
        out.delta2[i] = std::clamp(delta_full[i], -kDelta2Clamp, kDelta2Clamp);
    return out;
}

ResidualMaps external_residuals(const std::string& delta1_path, const std::string& delta2_path,
                                int height, int width, size_t* clamped_count) {
    const ImageGrid d1 = read_pfm(delta1_path);
    const ImageGrid d2 = read_pfm(delta2_path);
    for (const auto* g : {&d1, &d2})
        if (g->channels() != 1)
            fail_io("residual map must be single-channel PFM");
    if (d1.height() != height || d1.width() != width || d2.height() != height ||
        d2.width() != width)
        fail_io("residual maps do not match the image shape " + std::to_string(width) + "x" +
                std::to_string(height));
    ResidualMaps out(height, width);
    size_t clamped = 0;
    for (size_t i = 0; i < out.delta1.size(); ++i) {
        const float v1 = d1.data()[i];
        const float v2 = d2.data()[i];
        if (!std::isfinite(v1) || !std::isfinite(v2)) fail_io("residual map has non-finite values");
        out.delta1[i] = std::clamp(v1, -kDelta1Clamp, kDelta1Clamp);
        out.delta2[i] = std::clamp(v2, -kDelta2Clamp, kDelta2Clamp);
        if (out.delta1[i] != v1 || out.delta2[i] != v2) ++clamped;
    }
    if (clamped_count) *clamped_count = clamped;
    return out;
}

void save_residuals(const std::string& delta1_path, const std::string& delta2_path,
                    const ResidualMaps& residuals) {
    ImageGrid d1(residuals.height, residuals.width, 1);
    ImageGrid d2(residuals.height, residuals.width, 1);
    std::copy(residuals.delta1.begin(), residuals.delta1.end(), d1.data().begin());
    std::copy(residuals.delta2.begin(), residuals.delta2.end(), d2.data().begin());
    write_pfm(delta1_path, d1);
    write_pfm(delta2_path, d2);
}

}  // namespace sdgf
