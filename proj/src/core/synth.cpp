#include "core/synth.hpp"

#include <algorithm>
#include <cmath>

#include "core/depth_conversion.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

namespace sdgf {

namespace {

constexpr int kOctaves[4] = {4, 8, 16, 32};  // texture wavelengths in pixels

inline float fade(float t) { return t * t * (3.f - 2.f * t); }

// Seeded band-limited value noise, continuous over the surface plane.
float texture_value(uint64_t seed, int surface, float x, float y) {
    float v = 0.f;
    for (int o = 0; o < 4; ++o) {
        const float inv = 1.f / static_cast<float>(kOctaves[o]);
        const float fx = x * inv, fy = y * inv;
        const auto ix = static_cast<int64_t>(std::floor(fx));
        const auto iy = static_cast<int64_t>(std::floor(fy));
        const float tx = fade(fx - static_cast<float>(ix));
        const float ty = fade(fy - static_cast<float>(iy));
        const uint64_t s = seed ^ (static_cast<uint64_t>(surface) << 32) ^
                           (static_cast<uint64_t>(o) << 40);
        const float v00 = static_cast<float>(to_unit(hash2(s, ix, iy)));
        const float v10 = static_cast<float>(to_unit(hash2(s, ix + 1, iy)));
        const float v01 = static_cast<float>(to_unit(hash2(s, ix, iy + 1)));
        const float v11 = static_cast<float>(to_unit(hash2(s, ix + 1, iy + 1)));
        const float top = v00 + (v10 - v00) * tx;
        const float bot = v01 + (v11 - v01) * tx;
        v += top + (bot - top) * ty;
    }
    return 0.25f * v;
}

struct BoxRect {
    int x0, x1, y0, y1;  // [x0, x1) x [y0, y1)
    bool contains(float x, float y) const {
        return x >= static_cast<float>(x0) && x < static_cast<float>(x1) &&
               y >= static_cast<float>(y0) && y < static_cast<float>(y1);
    }
};

}  // namespace

void SceneSpec::validate() const {
    rig.validate();
    if (height < 16 || width < 16) fail_invalid("scene must be at least 16x16");
    if (!(hint_density > 0.0 && hint_density <= 1.0))
        fail_invalid("hint density must be in (0,1]");
    if (hint_noise_px < 0.0) fail_invalid("hint noise must be >= 0");
    auto check_depth = [](double z) {
        if (!(z > 1.0 && z < 200.0)) fail_invalid("scene depths must lie in (1,200) meters");
    };
    double d_max = 0.0;
    const double bf = rig.bf();
    switch (layout) {
        case SceneLayout::fronto_plane:
            check_depth(z_m);
            d_max = bf / z_m;
            break;
        case SceneLayout::slanted_plane: {
            check_depth(z0_m);
            if (std::abs(slope) >= 0.5) fail_invalid("slanted plane slope must satisfy |s| < 0.5");
            const double d0 = bf / z0_m;
            const double half = std::abs(slope) * width / 2.0;
            if (d0 - half <= 0.0) fail_invalid("slanted plane reaches non-positive disparity");
            check_depth(bf / (d0 - half));
            check_depth(bf / (d0 + half));
            d_max = d0 + half;
            break;
        }
        case SceneLayout::two_box:
            check_depth(z_near_m);
            check_depth(z_far_m);
            if (!(z_near_m < z_far_m)) fail_invalid("two_box requires z_near < z_far");
            d_max = bf / z_near_m;
            break;
    }
    if (d_max >= width / 2.0)
        fail_invalid("max scene disparity " + std::to_string(d_max) +
                     " must stay below half the image width");
}

Scene render_scene(const SceneSpec& spec) {
    spec.validate();
    const int H = spec.height, W = spec.width;
    const double bf = spec.rig.bf();

    Scene scene;
    scene.left = ImageGrid(H, W, 1);
    scene.right = ImageGrid(H, W, 1);
    scene.gt_disparity.assign(static_cast<size_t>(H) * W, 0.f);
    scene.gt_depth = DepthMap(H, W);
    scene.non_occluded.assign(static_cast<size_t>(H) * W, 0);

    const BoxRect box{W / 3, 2 * W / 3, H / 3, 2 * H / 3};
    const double d_near = bf / spec.z_near_m;
    const double d_far = bf / spec.z_far_m;
    // slanted plane: d(x) = a + b x, a 3D plane in disparity space
    const double slant_b = spec.slope;
    const double slant_a = bf / spec.z0_m - spec.slope * (W / 2.0);

    auto left_disparity = [&](int x, int y) -> double {
        switch (spec.layout) {
            case SceneLayout::fronto_plane:
                return bf / spec.z_m;
            case SceneLayout::slanted_plane:
                return slant_a + slant_b * x;
            case SceneLayout::two_box:
                return box.contains(static_cast<float>(x), static_cast<float>(y)) ? d_near : d_far;
        }
        return 0.0;
    };
    auto left_surface = [&](int x, int y) -> int {
        return spec.layout == SceneLayout::two_box &&
                       box.contains(static_cast<float>(x), static_cast<float>(y))
                   ? 1
                   : 0;
    };

    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            const size_t i = static_cast<size_t>(y) * W + x;
            const double d = left_disparity(x, y);
            scene.gt_disparity[i] = static_cast<float>(d);
            scene.gt_depth.depth[i] = static_cast<float>(bf / d);
            scene.gt_depth.valid[i] = 1;

            // a pixel is non-occluded iff its right correspondence exists
            const double xr = x - d;
            bool visible = xr >= 0.0 && xr <= W - 1.0;
            if (visible && spec.layout == SceneLayout::two_box && left_surface(x, y) == 0) {
                // background point hidden wherever the near box covers its right pixel
                const double xl_near = xr + d_near;
                if (box.contains(static_cast<float>(xl_near), static_cast<float>(y)))
                    visible = false;
            }
            scene.non_occluded[i] = visible ? 1 : 0;
        }
    }

    // right image: inverse warp of the surface textures, nearest surface wins
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            float value = 0.f;
            switch (spec.layout) {
                case SceneLayout::fronto_plane:
                    value = texture_value(spec.texture_seed, 0,
                                          static_cast<float>(x + bf / spec.z_m),
                                          static_cast<float>(y));
                    break;
                case SceneLayout::slanted_plane: {
                    const double xl = (x + slant_a) / (1.0 - slant_b);
                    value = texture_value(spec.texture_seed, 0, static_cast<float>(xl),
                                          static_cast<float>(y));
                    break;
                }
                case SceneLayout::two_box: {
                    const double xl_near = x + d_near;
                    if (box.contains(static_cast<float>(xl_near), static_cast<float>(y)))
                        value = texture_value(spec.texture_seed, 1,
                                              static_cast<float>(xl_near), static_cast<float>(y));
                    else
                        value = texture_value(spec.texture_seed, 0,
                                              static_cast<float>(x + d_far),
                                              static_cast<float>(y));
                    break;
                }
            }
            scene.right.at(x, y) = value;
        }
    }

    // left image: where a correspondence exists the left pixel is the exact
    // bilinear warp of the right image, so photometric consistency under the
    // ground-truth disparity holds by construction even at fractional
    // disparities. Occluded pixels fall back to direct texture evaluation.
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            const size_t i = static_cast<size_t>(y) * W + x;
            if (scene.non_occluded[i]) {
                const double xr = x - static_cast<double>(scene.gt_disparity[i]);
                scene.left.at(x, y) = bilinear_sample(scene.right, static_cast<float>(xr),
                                                      static_cast<float>(y), 0);
            } else {
                scene.left.at(x, y) = texture_value(spec.texture_seed, left_surface(x, y),
                                                    static_cast<float>(x), static_cast<float>(y));
            }
        }
    }

    scene.hints = sample_hints(scene.gt_disparity, H, W, spec.hint_density, spec.hint_noise_px,
                               spec.texture_seed ^ 0x5eedULL);
    return scene;
}

SparseHintMap sample_hints(const std::vector<float>& gt_disparity, int height, int width,
                           double density, double noise_px, uint64_t seed) {
    if (!(density > 0.0 && density <= 1.0)) fail_invalid("hint density must be in (0,1]");
    if (noise_px < 0.0) fail_invalid("hint noise must be >= 0");
    if (gt_disparity.size() != static_cast<size_t>(height) * width)
        fail_invalid("sample_hints: disparity size mismatch");
    SparseHintMap hints(height, width);
    Rng rng(seed);
    for (size_t i = 0; i < gt_disparity.size(); ++i) {
        if (!rng.bernoulli(density)) continue;
        double d = gt_disparity[i];
        if (noise_px > 0.0) d += rng.normal(0.0, noise_px);
        hints.disparity[i] = static_cast<float>(std::max(d, 0.0));
        hints.valid[i] = 1;
    }
    return hints;
}

DepthMap hints_to_depth(const SparseHintMap& hints, const CameraRig& rig) {
    rig.validate();
    DepthMap out(hints.height, hints.width);
    const double bf = rig.bf();
    for (size_t i = 0; i < hints.valid.size(); ++i) {
        if (!hints.valid[i] || hints.disparity[i] <= kDisparityEps) continue;
        out.depth[i] = static_cast<float>(bf / hints.disparity[i]);
        out.valid[i] = 1;
    }
    return out;
}

}  // namespace sdgf
