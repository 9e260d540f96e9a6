#include <doctest.h>

#include "pmv/analysis.hpp"
#include "pmv/error.hpp"
#include "pmv/pmg.hpp"
#include "support.hpp"

using namespace pmv;

namespace {

std::vector<Image> square_sources(int n, int size, std::uint64_t seed) {
    std::vector<Image> out;
    for (int i = 0; i < n; ++i) out.push_back(testing::random_image(size, size, 3, seed + i));
    return out;
}

}  // namespace

TEST_CASE("identity clips repeat the source and have zero difference") {
    const Image src = testing::random_image(32, 32, 3, 1);
    const Clip clip = generate_clip(src, IdentityParams{}, 16);
    REQUIRE(clip.length() == 16);
    for (const Image& f : clip.frames) CHECK(f == src);
    CHECK(frame_difference(clip) == 0.0);
}

TEST_CASE("recursive clips apply the step function to the previous frame") {
    const Image src = testing::random_image(24, 24, 3, 2);
    AffineParams a;
    a.angle_deg = 7.0;
    a.translate_x = 0.01;
    const Clip clip = generate_clip(src, a, 3);
    CHECK(clip.frames[0] == src);
    CHECK(clip.frames[1] == warp_affine(src, a));
    CHECK(clip.frames[2] == warp_affine(warp_affine(src, a), a));

    ColorJitterParams j;
    j.brightness = 0.05;
    j.hue = 0.02;
    const Clip jc = generate_clip(src, j, 5);
    for (int i = 0; i + 1 < 5; ++i) CHECK(jc.frames[i + 1] == color_jitter(jc.frames[i], j));
}

TEST_CASE("fade clips reach black and fade-in reverses fade-out") {
    const Image src = testing::random_image(16, 16, 3, 3);
    const Clip out = generate_clip(src, FadeParams{Direction::out}, 16);
    const Clip in = generate_clip(src, FadeParams{Direction::in}, 16);
    for (float v : out.frames.back().pixels) CHECK(v == 0.0f);
    for (int i = 0; i < 16; ++i) CHECK(in.frames[i] == out.frames[15 - i]);
    CHECK(in.frames.back() == src);

    const Clip grey = generate_clip(Image(16, 16, 3, 0.6f), FadeParams{Direction::out}, 16);
    CHECK(frame_difference(grey) == doctest::Approx(0.6 / 15).epsilon(1e-5));
}

TEST_CASE("zoom-out window fractions follow the linear schedule") {
    const ZoomParams z{Direction::out, 0.3, 0.8};
    const RectF first = window_rect(z, 0, 16, 224);
    const RectF last = window_rect(z, 15, 16, 224);
    CHECK(first.w == doctest::Approx(0.3 * 224));
    CHECK(last.w == doctest::Approx(0.8 * 224));
    CHECK(first.x == doctest::Approx((224 - 0.3 * 224) / 2));
    CHECK(window_rect(z, 5, 16, 224).w == doctest::Approx((0.3 + 0.5 * 5 / 15) * 224));

    const Image src = testing::random_image(64, 64, 3, 4);
    const Clip clip = generate_clip(src, z, 6);
    for (int i = 0; i < 6; ++i) CHECK(clip.frames[i] == crop_resize(src, window_rect(z, i, 6, 64), 64));
}

TEST_CASE("sliding window frames are crops of the trajectory") {
    const Image src = testing::random_image(64, 64, 3, 5);
    SlidingWindowParams s;
    s.window = {32, 4, 10, 1, -1};
    const Clip clip = generate_clip(src, s, 8);
    for (int i = 0; i < 8; ++i) {
        const RectF r = window_rect(s, i, 8, 64);
        CHECK(r.x == 4 + i);
        CHECK(r.y == 10 - i);
        CHECK(clip.frames[i] == crop_resize(src, r, 64));
    }
    s.window.step_y = -2;
    CHECK_THROWS_AS(generate_clip(src, s, 8), Error);
}

TEST_CASE("cutmix moves a fixed cut of the partner over the source") {
    const Image src(16, 16, 1, 0.0f);
    Image partner(16, 16, 1);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) partner.at(x, y) = static_cast<float>(x + 16 * y) / 255.0f;
    CutMixParams c;
    c.window = {4, 2, 3, 2, 1};
    const Clip clip = generate_clip(src, c, 4, &partner);
    for (int i = 0; i < 4; ++i) {
        const int bx = 2 + 2 * i, by = 3 + i;
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 16; ++x) {
                const bool in = x >= bx && x < bx + 4 && y >= by && y < by + 4;
                REQUIRE(clip.frames[i].at(x, y) == (in ? partner.at(x - bx + 2, y - by + 3) : 0.0f));
            }
    }
    // a single source pastes onto itself
    const Clip self = generate_clip(partner, c, 4);
    CHECK(self.frames[0] == partner);
    CHECK(!(self.frames[1] == partner));
}

TEST_CASE("weights pick the only positive kind") {
    const auto sources = square_sources(3, 32, 10);
    TransformSet set;
    set.kinds = {TransformKind::zoom_in_out, TransformKind::affine};
    set.weights = {0.0, 1.0};
    for (std::uint64_t s = 0; s < 50; ++s)
        CHECK(sample_clip(sources, set, 4, ParamRanges{}, s).recipe.kind == TransformKind::affine);

    TransformSet bad = set;
    bad.weights = {0.5, 0.6};
    CHECK_THROWS_AS(validate(bad), Error);
    CHECK_THROWS_AS(validate(TransformSet{}), Error);
}

TEST_CASE("uniform sets draw kinds evenly") {
    const TransformSet set = TransformSet::defaults();
    int zoom = 0;
    for (std::uint64_t s = 0; s < 2000; ++s)
        zoom += plan_clip(4, 224, set, 16, ParamRanges{}, s).kind == TransformKind::zoom_in_out;
    CHECK(zoom > 900);
    CHECK(zoom < 1100);
}

TEST_CASE("sampling is deterministic and replayable") {
    const auto sources = square_sources(4, 32, 20);
    const TransformSet set = TransformSet::uniform({TransformKind::sliding_window, TransformKind::zoom_in_out,
                                                    TransformKind::fade_in_out, TransformKind::affine,
                                                    TransformKind::perspective, TransformKind::color_jitter,
                                                    TransformKind::cutmix, TransformKind::identity});
    const ParamRanges ranges;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const SampledClip a = sample_clip(sources, set, 6, ranges, seed);
        const SampledClip b = sample_clip(sources, set, 6, ranges, seed);
        REQUIRE(a.clip == b.clip);
        REQUIRE(a.recipe == b.recipe);
        REQUIRE(replay(a.recipe, sources, ranges) == a.clip);
        REQUIRE(replan(a.recipe, 32, ranges) == a.recipe);
        REQUIRE(within_ranges(a.recipe.params, ranges, 32, 6));
    }
}

TEST_CASE("a tampered seed changes the replay") {
    const auto sources = square_sources(3, 32, 30);
    const SampledClip a = sample_clip(sources, TransformSet::defaults(), 6, ParamRanges{}, 99);
    ClipRecipe t = a.recipe;
    t.seed = 100;
    CHECK(!(replay(t, sources, ParamRanges{}) == a.clip));
    CHECK_THROWS_AS(replay(a.recipe, std::span<const Image>(sources).first(2), ParamRanges{}), Error);
}

TEST_CASE("render reads only the sources it needs") {
    const auto sources = square_sources(5, 32, 40);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ClipRecipe r = plan_clip(5, 32, TransformSet::uniform({TransformKind::cutmix, TransformKind::affine}), 4,
                                       ParamRanges{}, seed);
        std::vector<Image> sparse(5);
        sparse[r.source_index] = sources[r.source_index];
        if (r.partner_index) {
            CHECK(*r.partner_index != r.source_index);
            sparse[*r.partner_index] = sources[*r.partner_index];
        }
        CHECK(render(r, sparse) == render(r, sources));
    }
}

TEST_CASE("a suffix of a clip regenerates from its first frame") {
    const Image src = testing::random_image(24, 24, 3, 50);
    AffineParams a;
    a.angle_deg = -4.0;
    a.shear_deg = 0.5;
    const Clip full = generate_clip(src, a, 10);
    const Clip tail = generate_clip(full.frames[4], a, 6);
    for (int i = 0; i < 6; ++i) CHECK(tail.frames[i] == full.frames[4 + i]);
}

TEST_CASE("mismatched sources are rejected") {
    std::vector<Image> mixed = {Image(32, 32, 3), Image(16, 16, 3)};
    CHECK_THROWS_AS(sample_clip(mixed, TransformSet::defaults(), 4, ParamRanges{}, 1), Error);
    std::vector<Image> rect = {Image(32, 16, 3)};
    CHECK_THROWS_AS(sample_clip(rect, TransformSet::defaults(), 4, ParamRanges{}, 1), Error);
    CHECK_THROWS_AS(sample_clip(std::vector<Image>{}, TransformSet::defaults(), 4, ParamRanges{}, 1), Error);
    CHECK_THROWS_AS(generate_clip(Image(8, 8, 3), IdentityParams{}, 1), Error);
}
