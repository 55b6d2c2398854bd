#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "core/depth_conversion.hpp"
#include "core/error.hpp"
#include "core/image_io.hpp"
#include "core/rng.hpp"

using namespace sdgf;

namespace {

const CameraRig kRig{0.54, 721.0};

std::string temp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "sdgf_ddc_tests";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

ImageGrid noise_image(int h, int w, uint64_t seed) {
    ImageGrid g(h, w, 1);
    Rng rng(seed);
    for (float& v : g.data()) v = static_cast<float>(rng.uniform());
    return g;
}

}  // namespace

TEST_CASE("triangulation hand value: 72.1 px at b=0.54, f=721 gives 5.4 m") {
    const std::vector<float> disparity = {72.1f};
    const DepthMap out = triangulate(disparity, 1, 1, kRig, ResidualMaps(1, 1));
    REQUIRE(out.valid[0] == 1);
    CHECK(out.depth[0] == doctest::Approx(5.4).epsilon(1e-6));
}

TEST_CASE("G * D_s = b f on valid pixels with zero residuals") {
    Rng rng(3);
    const int n = 64;
    std::vector<float> disparity(n);
    for (float& d : disparity) d = static_cast<float>(rng.uniform(1.0, 100.0));
    const DepthMap out = triangulate(disparity, 1, n, kRig, ResidualMaps(1, n));
    for (int i = 0; i < n; ++i) {
        REQUIRE(out.valid[i] == 1);
        CHECK(static_cast<double>(out.depth[i]) * disparity[i] ==
              doctest::Approx(kRig.bf()).epsilon(1e-6));
    }
}

TEST_CASE("singular and non-positive depths are invalidated") {
    ResidualMaps res(1, 3);
    res.delta2[2] = -0.6f;
    const std::vector<float> disparity = {0.f, 0.05f, 4000.f};  // bf/4000 = 0.097 m < 0.6
    const DepthMap out = triangulate(disparity, 1, 3, kRig, res);
    CHECK(out.valid[0] == 0);  // D_s = 0
    CHECK(out.valid[1] == 0);  // below the disparity epsilon
    CHECK(out.valid[2] == 0);  // delta2 drags G below zero
}

TEST_CASE("doubling disparity halves depth exactly") {
    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        const float d = static_cast<float>(rng.uniform(0.5, 95.0));
        const std::vector<float> one = {d};
        const std::vector<float> two = {2.f * d};
        const DepthMap g1 = triangulate(one, 1, 1, kRig, ResidualMaps(1, 1));
        const DepthMap g2 = triangulate(two, 1, 1, kRig, ResidualMaps(1, 1));
        CHECK(static_cast<double>(g1.depth[0]) ==
              doctest::Approx(2.0 * g2.depth[0]).epsilon(1e-6));
    }
}

TEST_CASE("triangulation error grows quadratically with distance") {
    const double e_d = 0.25;
    auto depth_error = [&](double z) {
        const double d = kRig.bf() / z;
        const std::vector<float> biased = {static_cast<float>(d + e_d)};
        const DepthMap out = triangulate(biased, 1, 1, kRig, ResidualMaps(1, 1));
        return std::abs(z - static_cast<double>(out.depth[0]));
    };
    for (double z : {10.0, 20.0}) {
        const double ratio = depth_error(2 * z) / depth_error(z);
        CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
    }
}

TEST_CASE("warp error map is zero for identical images at zero disparity") {
    const ImageGrid img = noise_image(8, 8, 11);
    const std::vector<float> disparity(64, 0.f);
    const ErrorMap out = warp_error_map(img, img, disparity);
    for (size_t i = 0; i < out.valid.size(); ++i) {
        CHECK(out.valid[i] == 1);
        CHECK(out.error.data()[i] == 0.f);
    }
}

TEST_CASE("warp marks disparities beyond the image border invalid") {
    const ImageGrid img = noise_image(4, 6, 13);
    std::vector<float> disparity(24, 1.f);
    const ErrorMap out = warp_error_map(img, img, disparity);
    for (int y = 0; y < 4; ++y) {
        CHECK(out.valid[y * 6 + 0] == 0);  // x - d < 0
        for (int x = 1; x < 6; ++x) CHECK(out.valid[y * 6 + x] == 1);
    }
}

TEST_CASE("external residuals load, clamp and report") {
    const int H = 4, W = 5;
    ImageGrid d1(H, W, 1, 0.f);
    ImageGrid d2(H, W, 1, 0.f);
    d2.at(2, 1) = 0.9f;  // beyond the 0.6 clamp
    const std::string p1 = temp_file("d1.pfm"), p2 = temp_file("d2.pfm");
    write_pfm(p1, d1);
    write_pfm(p2, d2);

    size_t clamped = 0;
    const ResidualMaps res = external_residuals(p1, p2, H, W, &clamped);
    res.validate();
    CHECK(clamped >= 1);
    CHECK(res.delta2[res.index(2, 1)] == doctest::Approx(0.6f));
    CHECK(res.delta2[res.index(0, 0)] == 0.f);

    CHECK_THROWS_AS(external_residuals(p1, p2, H, W + 1, nullptr), Error);
}

TEST_CASE("residual save/load round-trips exactly") {
    Rng rng(17);
    ResidualMaps res(3, 7);
    for (size_t i = 0; i < res.delta1.size(); ++i) {
        res.delta1[i] = static_cast<float>(rng.uniform(-0.2, 0.2));
        res.delta2[i] = static_cast<float>(rng.uniform(-0.6, 0.6));
    }
    const std::string p1 = temp_file("rt1.pfm"), p2 = temp_file("rt2.pfm");
    save_residuals(p1, p2, res);
    const ResidualMaps back = external_residuals(p1, p2, 3, 7, nullptr);
    CHECK(back.delta1 == res.delta1);
    CHECK(back.delta2 == res.delta2);
}

TEST_CASE("lidar residuals vanish when the disparity is unbiased") {
    const int H = 64, W = 64;
    const double gt_d = kRig.bf() / 10.0;
    const std::vector<float> disparity(static_cast<size_t>(H) * W, static_cast<float>(gt_d));
    DepthMap lidar(H, W);
    Rng rng(23);
    for (size_t i = 0; i < lidar.depth.size(); ++i)
        if (rng.bernoulli(0.05)) {
            lidar.depth[i] = static_cast<float>(kRig.bf() / gt_d);
            lidar.valid[i] = 1;
        }
    const ImageGrid left = noise_image(H, W, 29);
    const ResidualMaps res = lidar_anchored_residuals(disparity, H, W, kRig, lidar, left, {});
    res.validate();
    for (float v : res.delta1) CHECK(v == 0.f);
    for (float v : res.delta2) CHECK(std::abs(v) < 1e-5f);
}

TEST_CASE("lidar residuals recover a uniform disparity bias") {
    const int H = 96, W = 128;
    const double z = 10.0;
    const double gt_d = kRig.bf() / z;
    const double bias = 0.5;
    std::vector<float> disparity(static_cast<size_t>(H) * W, static_cast<float>(gt_d + bias));
    DepthMap lidar(H, W);
    Rng rng(31);
    size_t hint_count = 0;
    for (size_t i = 0; i < lidar.depth.size(); ++i)
        if (rng.bernoulli(0.05)) {
            lidar.depth[i] = static_cast<float>(z);
            lidar.valid[i] = 1;
            ++hint_count;
        }
    REQUIRE(hint_count > 100);
    const ImageGrid left = noise_image(H, W, 37);
    const ResidualMaps res = lidar_anchored_residuals(disparity, H, W, kRig, lidar, left, {});

    const double exact_r = z - kRig.bf() / (gt_d + bias);  // 0.1268 m
    size_t corrected = 0;
    for (float v : res.delta2)
        if (std::abs(v - exact_r) < 0.15 * exact_r) ++corrected;
    CHECK(static_cast<double>(corrected) / res.delta2.size() > 0.9);

    // depth RMSE at hint pixels never worsens
    double with = 0, without = 0;
    for (size_t i = 0; i < lidar.valid.size(); ++i) {
        if (!lidar.valid[i]) continue;
        const double base = kRig.bf() / disparity[i];
        with += std::pow(base + res.delta2[i] - z, 2.0);
        without += std::pow(base - z, 2.0);
    }
    CHECK(with <= without + 1e-12);
}

TEST_CASE("lidar residuals gate to zero away from the hinted region") {
    const int H = 64, W = 128;
    const double gt_d = 20.0;
    std::vector<float> disparity(static_cast<size_t>(H) * W, static_cast<float>(gt_d + 0.5));
    DepthMap lidar(H, W);
    Rng rng(41);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W / 2; ++x)  // hints only in the left half
            if (rng.bernoulli(0.1)) {
                lidar.depth[lidar.index(x, y)] = static_cast<float>(kRig.bf() / gt_d);
                lidar.valid[lidar.index(x, y)] = 1;
            }
    const ImageGrid left = noise_image(H, W, 43);
    const ResidualMaps res = lidar_anchored_residuals(disparity, H, W, kRig, lidar, left, {});
    bool corrected_somewhere = false;
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W / 4; ++x)
            corrected_somewhere = corrected_somewhere || res.delta2[res.index(x, y)] != 0.f;
        for (int x = W - 12; x < W; ++x) CHECK(res.delta2[res.index(x, y)] == 0.f);
    }
    CHECK(corrected_somewhere);
}

TEST_CASE("empty hint set yields zero residuals") {
    const int H = 32, W = 32;
    const std::vector<float> disparity(static_cast<size_t>(H) * W, 20.f);
    const DepthMap lidar(H, W);
    const ImageGrid left = noise_image(H, W, 47);
    const ResidualMaps res = lidar_anchored_residuals(disparity, H, W, kRig, lidar, left, {});
    for (float v : res.delta2) CHECK(v == 0.f);
}
