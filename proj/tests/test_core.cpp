#include <doctest.h>

#include <set>
#include <unordered_set>

#include "pmv/error.hpp"
#include "pmv/image.hpp"
#include "pmv/quantize.hpp"
#include "pmv/rng.hpp"

using namespace pmv;

TEST_CASE("derive_clip_seed matches pinned vectors") {
    // Computed once with an independent Python splitmix64 and frozen.
    CHECK(derive_clip_seed(0, 0) == 0xe220a8397b1dcdafULL);
    CHECK(derive_clip_seed(0, 1) == 0x6e789e6aa1b965f4ULL);
    CHECK(derive_clip_seed(7, 0) == 0x63cbe1e459320dd7ULL);
    CHECK(derive_clip_seed(7, 99) == 0x25c5404647ee7635ULL);
    CHECK(derive_clip_seed(12345, 3) == 0x53bfad7a1b66795bULL);
}

TEST_CASE("derive_clip_seed is pure and separates neighbouring indices") {
    CHECK(derive_clip_seed(42, 17) == derive_clip_seed(42, 17));
    Rng rng(2024);
    for (int i = 0; i < 1000000; ++i) {
        const std::uint64_t s = rng.next();
        if (derive_clip_seed(s, 0) == derive_clip_seed(s, 1)) FAIL("collision for seed " << s);
    }
}

TEST_CASE("derive_clip_seed has no collisions over a million indices") {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(1 << 21);
    for (std::uint64_t i = 0; i < 1000000; ++i) seen.insert(derive_clip_seed(7, i));
    CHECK(seen.size() == 1000000);
}

TEST_CASE("Rng sequences are reproducible and in range") {
    Rng a(99), b(99);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next() == b.next());
    Rng r(5);
    std::set<std::int64_t> values;
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const auto k = r.uniform_int(-3, 3);
        REQUIRE(k >= -3);
        REQUIRE(k <= 3);
        values.insert(k);
        const double be = r.beta(1.0, 1.0);
        REQUIRE(be >= 0.0);
        REQUIRE(be <= 1.0);
    }
    CHECK(values.size() == 7);
    CHECK_THROWS_AS(r.uniform_int(2, 1), Error);
}

TEST_CASE("Rng moments are plausible") {
    Rng r(11);
    const int n = 200000;
    double sn = 0, sn2 = 0, sb = 0, sg = 0;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        sn += z;
        sn2 += z * z;
        sb += r.beta(2.0, 5.0);
        sg += r.gamma(0.5);
    }
    CHECK(sn / n == doctest::Approx(0.0).epsilon(0.02));
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(sb / n == doctest::Approx(2.0 / 7.0).epsilon(0.02));
    CHECK(sg / n == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("Image validation") {
    Image ok(4, 3, 3, 0.5f);
    CHECK_NOTHROW(validate(ok));
    Image bad = ok;
    bad.pixels[0] = 1.5f;
    CHECK_THROWS_AS(validate(bad), Error);
    CHECK_THROWS_AS(Image(2, 2, 2), Error);
    Clip one;
    one.frames.push_back(ok);
    CHECK_THROWS_AS(validate(one), Error);
    Clip mixed;
    mixed.frames = {ok, Image(3, 4, 3)};
    CHECK_THROWS_AS(validate(mixed), Error);
}

TEST_CASE("quantization round trip stays within half a level") {
    for (int q = 0; q <= 255; ++q) CHECK(quantize_u8(dequantize_u8(static_cast<std::uint8_t>(q))) == q);
    Rng r(3);
    for (int i = 0; i < 10000; ++i) {
        const auto x = static_cast<float>(r.uniform01());
        CHECK(std::abs(dequantize_u8(quantize_u8(x)) - x) <= 0.5f / 255.0f + 1e-7f);
    }
    CHECK(quantize_u8(-0.2f) == 0);
    CHECK(quantize_u8(1.3f) == 255);
}

TEST_CASE("errors carry their code") {
    try {
        throw Error(ErrorCode::geometry, "bad grid");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::geometry);
        CHECK(e.message() == "bad grid");
        CHECK(std::string(e.what()).find("bad grid") != std::string::npos);
    }
}
