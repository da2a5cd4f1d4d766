#include <random>

#include "doctest.h"
#include "dado/fusion.hpp"
#include "oracles.hpp"

using namespace dado;
using namespace dado::fusion;

namespace {

Raster blob_square(int w, int h, Box b, float v) {
    Raster r(w, h, 0.0f);
    for (int y = b.ymin; y < b.ymax; ++y)
        for (int x = b.xmin; x < b.xmax; ++x) r.at(x, y) = v;
    return r;
}

}  // namespace

TEST_CASE("cross_correlation") {
    CHECK(cross_correlation(Raster(3, 3, 1.0f), Raster(3, 3, 1.0f)) == 1.0);
    CHECK(cross_correlation(Raster(4, 2, 0.5f), Raster(4, 2, 0.5f)) == 0.25);
    CHECK_THROWS_AS(cross_correlation(Raster(3, 3), Raster(3, 2)), ContractError);
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 30; ++trial) {
        const Raster a = oracle::random_raster(rng, 31, 17);
        const Raster d = oracle::random_raster(rng, 31, 17);
        CHECK(cross_correlation(a, d) == doctest::Approx(oracle::mean_product(a, d)).epsilon(1e-12));
    }
}

TEST_CASE("compute_weights gate and formulas") {
    attention::AttentionMap att{Raster(2, 2, 1.0f), 0.0};
    SUBCASE("CC above the threshold pins both weights") {
        const auto w = compute_weights(att, Raster(2, 2, 0.6f), 0.5);
        CHECK(w.cc == doctest::Approx(0.6));
        CHECK(w.gated);
        CHECK(w.w_a == 0.5);
        CHECK(w.w_d == 0.5);
    }
    SUBCASE("below the threshold: zero sparsity") {
        const auto w = compute_weights(att, Raster(2, 2, 0.3f), 0.5);
        CHECK_FALSE(w.gated);
        CHECK(w.w_a == 1.0);
        CHECK(w.w_d == 1.0);  // constant depth is perfectly consistent
    }
    SUBCASE("below the threshold: unit sparsity") {
        att.sparsity = 1.0;
        CHECK(compute_weights(att, Raster(2, 2, 0.3f), 0.5).w_a == 0.5);
    }
}

TEST_CASE("combine") {
    const FusionWeights half{0.0, 0.5, 0.5, true};
    CHECK(combine(Raster(3, 2, 1.0f), Raster(3, 2, 1.0f), half) == Raster(3, 2, 0.25f));
    for (auto mode : {CombineMode::product, CombineMode::sum})
        CHECK(combine(Raster(3, 2, 0.7f), Raster(3, 2, 0.0f), half, mode) == Raster(3, 2, 0.0f));
    CHECK_THROWS_AS(combine(Raster(2, 2), Raster(2, 3), half), ContractError);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> wd(0.05, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const Raster a = oracle::random_raster(rng, 13, 9);
        Raster m = oracle::random_binary(rng, 13, 9, 0.5);
        for (float& v : m.values()) v = v != 0.0f ? 1.0f : 0.0f;
        const FusionWeights w{0.0, wd(rng), wd(rng), false};
        const Raster out = combine(a, m, w);
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double expect = m[i] != 0.0f ? w.w_a * w.w_d * a[i] : 0.0;
            CHECK(out[i] == doctest::Approx(expect).epsilon(1e-6));
        }
        const Raster sum = combine(a, m, w, CombineMode::sum);
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double expect = m[i] != 0.0f ? std::min(1.0, w.w_a * a[i] + w.w_d) : 0.0;
            CHECK(sum[i] == doctest::Approx(expect).epsilon(1e-6));
        }
    }
}

TEST_CASE("adaptive_threshold and binarize") {
    CHECK(adaptive_threshold(Raster(4, 4, 0.0f)) == 0.0);
    CHECK(adaptive_threshold(Raster(2, 2, {0.0f, 0.0f, 1.0f, 1.0f})) == 0.5);
    CHECK(binarize(Raster(3, 1, 0.0f), 0.0) == Raster(3, 1, 0.0f));
    CHECK(binarize(Raster(2, 1, {0.2f, 0.6f}), 0.5) == Raster(2, 1, {0.0f, 255.0f}));
    CHECK(binarize(Raster(1, 1, 0.5f), 0.5) == Raster(1, 1, 0.0f));  // ties suppressed

    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        const Raster r = oracle::random_raster(rng, 20, 20);
        CHECK(adaptive_threshold(r) == doctest::Approx(oracle::mean_plus_std_half(r)).epsilon(1e-12));
    }

    // support-restricted statistics ignore pixels off the layer
    const Raster raw(4, 1, {0.0f, 0.0f, 1.0f, 1.0f});
    const Raster support(4, 1, {0.0f, 0.0f, 1.0f, 1.0f});
    CHECK(adaptive_threshold(raw, support) == 0.5);
}

TEST_CASE("binarization ignores a power-of-two rescale") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const Raster m = oracle::random_raster(rng, 16, 16);
        Raster scaled = m;
        for (float& v : scaled.values()) v *= 8.0f;
        CHECK(binarize(scaled, adaptive_threshold(scaled)) == binarize(m, adaptive_threshold(m)));
    }
}

TEST_CASE("fuse_image") {
    SUBCASE("constant map binarizes to nothing") {
        depth::LayerSet set;
        set.layers.push_back({0.0, 1.0, Raster(5, 5, 1.0f), 0});
        // a constant attention map arrives here already normalized to zeros
        const Raster flat = attention::normalize_unit(Raster(5, 5, 0.4f));
        const auto out = fuse_image({flat, 1.0}, set, {0.0, 0.5, 0.5, true});
        REQUIRE(out.size() == 1);
        CHECK(out[0].layer_index == 1);
        CHECK(out[0].binary == Raster(5, 5, 0.0f));
    }
    SUBCASE("empty layer") {
        depth::LayerSet set;
        set.layers.push_back({0.0, 1.0, Raster(5, 5, 0.0f), 0});
        const auto out = fuse_image({Raster(5, 5, 0.9f), 0.2}, set, {});
        CHECK(out[0].binary == Raster(5, 5, 0.0f));
    }
    SUBCASE("each blob survives only in its own layer") {
        const int w = 40, h = 20;
        const Box near_box{2, 2, 12, 12}, far_box{25, 5, 35, 15};
        Raster att = blob_square(w, h, near_box, 0.9f);
        for (int y = far_box.ymin; y < far_box.ymax; ++y)
            for (int x = far_box.xmin; x < far_box.xmax; ++x) att.at(x, y) = 0.8f;
        depth::LayerSet set;
        Raster near_mask(w, h, 0.0f), far_mask(w, h, 0.0f);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) (x < w / 2 ? near_mask : far_mask).at(x, y) = 1.0f;
        set.layers.push_back({0.5, 1.0, near_mask, 40});
        set.layers.push_back({0.0, 0.5, far_mask, 10});
        const auto out = fuse_image({att, 0.3}, set, {0.0, 0.7, 0.9, false});
        REQUIRE(out.size() == 2);
        for (std::size_t i = 0; i < att.size(); ++i) {
            // containment: lit pixels lie on the layer and on a blob
            if (out[0].binary[i] != 0.0f) CHECK((near_mask[i] != 0.0f && att[i] > 0.0f));
            if (out[1].binary[i] != 0.0f) CHECK((far_mask[i] != 0.0f && att[i] > 0.0f));
        }
        CHECK(out[0].binary.at(5, 5) == 255.0f);
        CHECK(out[1].binary.at(30, 10) == 255.0f);
        CHECK(out[0].binary.at(30, 10) == 0.0f);
        CHECK(out[1].binary.at(5, 5) == 0.0f);
    }
}

TEST_CASE("product-mode masks do not depend on the weights") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> wd(0.01, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const Raster att = oracle::random_raster(rng, 24, 18);
        depth::LayerSet set;
        Raster m = oracle::random_binary(rng, 24, 18, 0.6);
        for (float& v : m.values()) v = v != 0.0f ? 1.0f : 0.0f;
        set.layers.push_back({0.0, 1.0, m, 0});
        const auto a = fuse_image({att, 0.5}, set, {0.0, wd(rng), wd(rng), false});
        const auto b = fuse_image({att, 0.5}, set, {0.0, wd(rng), wd(rng), false});
        CHECK(a[0].binary == b[0].binary);
    }
}
