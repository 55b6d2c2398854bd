#include "doctest.h"

#include <cmath>

#include "core/depth_conversion.hpp"
#include "core/error.hpp"
#include "core/synth.hpp"

using namespace sdgf;

TEST_CASE("fronto plane at Z=5.4 with b=0.54, f=721 gives disparity 72.1 everywhere") {
    SceneSpec spec;
    spec.layout = SceneLayout::fronto_plane;
    spec.z_m = 5.4;
    spec.height = 64;
    spec.width = 160;
    const Scene scene = render_scene(spec);
    for (float d : scene.gt_disparity) CHECK(d == doctest::Approx(72.1).epsilon(1e-6));
}

TEST_CASE("density 1 with zero noise reproduces the ground truth with a full mask") {
    SceneSpec spec;
    spec.height = 32;
    spec.width = 64;
    spec.z_m = 15.0;  // keeps max disparity below width/2
    spec.hint_density = 1.0;
    spec.hint_noise_px = 0.0;
    const Scene scene = render_scene(spec);
    for (size_t i = 0; i < scene.hints.valid.size(); ++i) {
        CHECK(scene.hints.valid[i] == 1);
        CHECK(scene.hints.disparity[i] == doctest::Approx(scene.gt_disparity[i]).epsilon(1e-6));
    }
}

TEST_CASE("gt depth times gt disparity equals b*f identically") {
    for (SceneLayout layout :
         {SceneLayout::fronto_plane, SceneLayout::slanted_plane, SceneLayout::two_box}) {
        SceneSpec spec;
        spec.layout = layout;
        spec.height = 48;
        spec.width = 96;
        spec.z_near_m = 10.0;
        spec.z_far_m = 30.0;
        const Scene scene = render_scene(spec);
        for (size_t i = 0; i < scene.gt_disparity.size(); ++i)
            CHECK(static_cast<double>(scene.gt_depth.depth[i]) * scene.gt_disparity[i] ==
                  doctest::Approx(spec.rig.bf()).epsilon(1e-5));
    }
}

TEST_CASE("warping right by the ground truth reproduces left on non-occluded pixels") {
    for (SceneLayout layout :
         {SceneLayout::fronto_plane, SceneLayout::slanted_plane, SceneLayout::two_box}) {
        SceneSpec spec;
        spec.layout = layout;
        spec.height = 64;
        spec.width = 128;
        spec.z_m = 7.3;  // deliberately fractional disparity
        const Scene scene = render_scene(spec);
        const ErrorMap err = warp_error_map(scene.left, scene.right, scene.gt_disparity);
        for (size_t i = 0; i < err.valid.size(); ++i) {
            if (!scene.non_occluded[i]) continue;
            REQUIRE(err.valid[i] == 1);
            CHECK(std::abs(err.error.data()[i]) < 1e-3f);
        }
    }
}

TEST_CASE("two_box produces an occlusion band as wide as the disparity jump") {
    SceneSpec spec;
    spec.layout = SceneLayout::two_box;
    spec.height = 96;
    spec.width = 512;
    spec.z_near_m = 8.0;
    spec.z_far_m = 30.0;
    const Scene scene = render_scene(spec);
    const double d_near = spec.rig.bf() / spec.z_near_m;
    const double d_far = spec.rig.bf() / spec.z_far_m;
    const double jump = d_near - d_far;

    const int y = 48;  // inside the box rows
    int band = 0;
    for (int x = 30; x < 512; ++x)  // skip the left-FOV band
        if (!scene.non_occluded[static_cast<size_t>(y) * 512 + x]) ++band;
    CHECK(std::abs(band - jump) <= 1.0);

    // rows outside the box have no occlusion beyond the FOV strip
    const int y_out = 8;
    for (int x = 30; x < 512; ++x)
        CHECK(scene.non_occluded[static_cast<size_t>(y_out) * 512 + x] == 1);
}

TEST_CASE("rendering is bit-deterministic in the spec") {
    SceneSpec spec;
    spec.layout = SceneLayout::two_box;
    spec.height = 40;
    spec.width = 80;
    spec.z_near_m = 12.0;  // max disparity under width/2
    spec.texture_seed = 123;
    spec.hint_noise_px = 0.5;
    const Scene a = render_scene(spec);
    const Scene b = render_scene(spec);
    CHECK(a.left.data() == b.left.data());
    CHECK(a.right.data() == b.right.data());
    CHECK(a.gt_disparity == b.gt_disparity);
    CHECK(a.hints.disparity == b.hints.disparity);
    CHECK(a.hints.valid == b.hints.valid);

    SceneSpec other = spec;
    other.texture_seed = 124;
    const Scene c = render_scene(other);
    CHECK(a.left.data() != c.left.data());
}

TEST_CASE("hint count stays within 3 sigma of the binomial expectation") {
    std::vector<float> gt(100000, 20.f);
    const double density = 0.05;
    const SparseHintMap hints = sample_hints(gt, 250, 400, density, 0.0, 99);
    const double expected = 100000 * density;
    const double sigma = std::sqrt(100000 * density * (1 - density));
    CHECK(std::abs(static_cast<double>(hints.valid_count()) - expected) < 3 * sigma);
}

TEST_CASE("noisy hints are clamped at zero and validate cleanly") {
    std::vector<float> gt(4096, 0.5f);
    const SparseHintMap hints = sample_hints(gt, 64, 64, 0.5, 5.0, 7);
    hints.validate("noisy hints");
    for (size_t i = 0; i < hints.valid.size(); ++i)
        if (hints.valid[i]) CHECK(hints.disparity[i] >= 0.f);
}

TEST_CASE("hints_to_depth inverts through the rig and drops singular hints") {
    SparseHintMap hints(1, 3);
    hints.set(0, 0, 38.934f);
    hints.set(1, 0, 0.05f);  // below the disparity epsilon
    const CameraRig rig{0.54, 721.0};
    const DepthMap depth = hints_to_depth(hints, rig);
    CHECK(depth.valid[0] == 1);
    CHECK(depth.depth[0] == doctest::Approx(10.0).epsilon(1e-4));
    CHECK(depth.valid[1] == 0);
    CHECK(depth.valid[2] == 0);
}

TEST_CASE("scene validation rejects out-of-contract specs") {
    SceneSpec spec;
    spec.height = 64;
    spec.width = 64;
    spec.z_m = 5.0;  // disparity 77.9 >= width/2
    CHECK_THROWS_AS(render_scene(spec), Error);

    SceneSpec deep;
    deep.z_m = 300.0;  // outside (1, 200)
    CHECK_THROWS_AS(render_scene(deep), Error);

    SceneSpec inverted;
    inverted.layout = SceneLayout::two_box;
    inverted.z_near_m = 30.0;
    inverted.z_far_m = 8.0;
    CHECK_THROWS_AS(render_scene(inverted), Error);
}
