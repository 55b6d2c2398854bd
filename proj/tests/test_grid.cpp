#include "doctest.h"

#include <cmath>

#include "core/error.hpp"
#include "core/raster.hpp"
#include "core/rng.hpp"

using namespace sdgf;

namespace {

ImageGrid random_grid(int h, int w, int c, uint64_t seed) {
    ImageGrid g(h, w, c);
    Rng rng(seed);
    for (float& v : g.data()) v = static_cast<float>(rng.uniform());
    return g;
}

}  // namespace

TEST_CASE("bilinear sampling is exact at integer pixels") {
    const ImageGrid g = random_grid(7, 9, 2, 11);
    for (int y = 0; y < g.height(); ++y)
        for (int x = 0; x < g.width(); ++x)
            for (int c = 0; c < 2; ++c)
                CHECK(bilinear_sample(g, static_cast<float>(x), static_cast<float>(y), c) ==
                      g.at(x, y, c));
}

TEST_CASE("bilinear midpoint of 2 and 4 is 3") {
    ImageGrid g(1, 2, 1);
    g.at(0, 0) = 2.f;
    g.at(1, 0) = 4.f;
    CHECK(bilinear_sample(g, 0.5f, 0.f, 0) == doctest::Approx(3.f));
}

TEST_CASE("bilinear clamps outside coordinates to the border") {
    const ImageGrid g = random_grid(5, 5, 1, 7);
    CHECK(bilinear_sample(g, -5.f, -5.f, 0) == doctest::Approx(g.at(0, 0)));
    CHECK(bilinear_sample(g, 100.f, 100.f, 0) == doctest::Approx(g.at(4, 4)));
}

TEST_CASE("bilinear stays within the min/max of its support") {
    const ImageGrid g = random_grid(16, 16, 1, 23);
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        const float x = static_cast<float>(rng.uniform(-2.0, 17.0));
        const float y = static_cast<float>(rng.uniform(-2.0, 17.0));
        const float v = bilinear_sample(g, x, y, 0);
        float lo = 1e9f, hi = -1e9f;
        for (float& s : const_cast<ImageGrid&>(g).data()) {
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        CHECK(v >= lo - 1e-6f);
        CHECK(v <= hi + 1e-6f);
    }
}

TEST_CASE("downsample_hints averages valid hints and rescales disparity") {
    SparseHintMap hints(4, 8);
    SUBCASE("single valid hint of 40 px") {
        hints.set(1, 2, 40.f);
        const SparseHintMap low = downsample_hints(hints, 4);
        CHECK(low.height == 1);
        CHECK(low.width == 2);
        CHECK(low.valid[0] == 1);
        CHECK(low.disparity[0] == doctest::Approx(10.f));
        CHECK(low.valid[1] == 0);
        CHECK(low.disparity[1] == 0.f);
    }
    SUBCASE("two hints 40 and 44 px average to 10.5 at quarter scale") {
        hints.set(0, 0, 40.f);
        hints.set(3, 3, 44.f);
        const SparseHintMap low = downsample_hints(hints, 4);
        CHECK(low.disparity[0] == doctest::Approx(10.5f));
    }
}

TEST_CASE("downsample_hints preserves validity block-wise") {
    Rng rng(77);
    SparseHintMap hints(13, 17);  // odd sizes exercise partial blocks
    for (int y = 0; y < hints.height; ++y)
        for (int x = 0; x < hints.width; ++x)
            if (rng.bernoulli(0.2)) hints.set(x, y, static_cast<float>(rng.uniform(0.0, 50.0)));
    const int factor = 4;
    const SparseHintMap low = downsample_hints(hints, factor);
    for (int oy = 0; oy < low.height; ++oy)
        for (int ox = 0; ox < low.width; ++ox) {
            bool any = false;
            for (int y = oy * factor; y < std::min((oy + 1) * factor, hints.height); ++y)
                for (int x = ox * factor; x < std::min((ox + 1) * factor, hints.width); ++x)
                    any = any || hints.valid[hints.index(x, y)];
            CHECK(static_cast<bool>(low.valid[low.index(ox, oy)]) == any);
        }
}

TEST_CASE("pyramid level 1 is the original") {
    const ImageGrid g = random_grid(6, 6, 1, 3);
    const auto pyr = build_pyramid(g, 1);
    REQUIRE(pyr.size() == 1);
    CHECK(pyr[0].data() == g.data());
}

TEST_CASE("pyramid of a constant grid stays constant") {
    ImageGrid g(16, 16, 1, 0.75f);
    const auto pyr = build_pyramid(g, 4);
    for (const auto& level : pyr)
        for (float v : level.data()) CHECK(v == doctest::Approx(0.75f));
}

TEST_CASE("4x4 checkerboard averages to a 2x2 grid of 0.5") {
    ImageGrid g(4, 4, 1);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) g.at(x, y) = static_cast<float>((x + y) % 2);
    const auto pyr = build_pyramid(g, 2);
    REQUIRE(pyr[1].height() == 2);
    REQUIRE(pyr[1].width() == 2);
    for (float v : pyr[1].data()) CHECK(v == doctest::Approx(0.5f));
}

TEST_CASE("pyramid preserves the mean for power-of-two dimensions") {
    const ImageGrid g = random_grid(32, 64, 1, 99);
    const auto pyr = build_pyramid(g, 4);
    auto mean = [](const ImageGrid& grid) {
        double s = 0;
        for (float v : grid.data()) s += v;
        return s / static_cast<double>(grid.data().size());
    };
    const double m0 = mean(pyr[0]);
    for (size_t k = 1; k < pyr.size(); ++k) CHECK(mean(pyr[k]) == doctest::Approx(m0).epsilon(1e-6));
}

TEST_CASE("pyramid rejects a non-positive level count") {
    const ImageGrid g = random_grid(4, 4, 1, 1);
    CHECK_THROWS_AS(build_pyramid(g, 0), Error);
}

TEST_CASE("grid and map validation catches contract violations") {
    CHECK_THROWS_AS(ImageGrid(0, 4, 1), Error);

    SparseHintMap hints(2, 2);
    hints.disparity[0] = 1.f;  // invalid pixel storing nonzero disparity
    CHECK_THROWS_AS(hints.validate("hints"), Error);

    DepthMap depth(2, 2);
    depth.valid[0] = 1;
    depth.depth[0] = 0.f;  // valid pixel with non-positive depth
    CHECK_THROWS_AS(depth.validate("depth"), Error);

    CameraRig rig{0.0, 700.0};
    CHECK_THROWS_AS(rig.validate(), Error);
}
