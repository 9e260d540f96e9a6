#include <doctest.h>

#include "pmv/error.hpp"
#include "pmv/formats.hpp"
#include "pmv/quantize.hpp"
#include "support.hpp"

using namespace pmv;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("clip header bytes are pinned") {
    const Clip clip = testing::constant_clip(2, 3, 5, 3, 1.0f);
    const auto bytes = encode_clip(clip, ClipDType::u8);
    const std::vector<std::uint8_t> head(bytes.begin(), bytes.begin() + kClipHeaderBytes);
    const std::vector<std::uint8_t> expect = {'P', 'M', 'V', '1', 1, 0, 3, 0, 2, 0, 5, 0, 0, 0, 3, 0, 0, 0};
    CHECK(head == expect);
    CHECK(bytes.size() == kClipHeaderBytes + 2 * 3 * 5 * 3);
    CHECK(bytes.back() == 255);
}

TEST_CASE("clip round trips") {
    const Clip clip = testing::random_clip(3, 7, 5, 3, 1);
    CHECK(decode_clip(encode_clip(clip, ClipDType::f32)) == clip);
    const Clip q = decode_clip(encode_clip(clip, ClipDType::u8));
    CHECK(q == stored_representation(clip, ClipDType::u8));
    for (int t = 0; t < 3; ++t) CHECK(testing::max_abs_diff(q.frames[t], clip.frames[t]) <= 0.5 / 255 + 1e-7);
    // quantized values are a fixed point
    CHECK(encode_clip(q, ClipDType::u8) == encode_clip(clip, ClipDType::u8));
    const Clip grey = testing::random_clip(2, 4, 4, 1, 2);
    CHECK(decode_clip(encode_clip(grey, ClipDType::f32)) == grey);
    for (int i = 0; i < 256; ++i) CHECK(quantize_u8(dequantize_u8(static_cast<std::uint8_t>(i))) == i);
}

TEST_CASE("mask round trip and pinned header") {
    TubeMask m{8, 2, 3, 0.5, {1, 0, 0, 1, 1, 0}};
    const auto bytes = encode_mask(m);
    REQUIRE(bytes.size() == kMaskHeaderBytes + 6);
    const std::vector<std::uint8_t> head(bytes.begin(), bytes.begin() + 11);
    CHECK(head == std::vector<std::uint8_t>{'P', 'M', 'M', '1', 1, 8, 0, 2, 0, 3, 0});
    CHECK(decode_mask(bytes) == m);
}

TEST_CASE("masked sample round trip") {
    const PatchGrid g = make_patch_grid(4, 32, 32, 3, 2, 16);
    Rng rng(3);
    const TubeMask mask = sample_tube_mask(g, 0.5, rng);
    const MaskedSample s = apply_mask(patchify(testing::random_clip(4, 32, 32, 3, 4), g), mask, g, true);
    const MaskedSampleFile f = decode_masked_sample(encode_masked_sample(s, true));
    CHECK(f.normalized);
    CHECK(f.sample.visible == s.visible);
    CHECK(f.sample.targets == s.targets);
    CHECK(f.sample.visible_index == s.visible_index);
    CHECK(f.sample.masked_index == s.masked_index);
    CHECK(f.sample.mask.spatial == mask.spatial);
    CHECK(f.sample.mask.ratio == 0.5);
}

TEST_CASE("corrupt files are rejected") {
    const auto good = encode_clip(testing::random_clip(2, 4, 4, 3, 5), ClipDType::f32);
    auto bad = good;
    bad[0] = 'X';
    CHECK(code_of([&] { decode_clip(bad); }) == ErrorCode::corrupt_file);
    bad = good;
    bad[4] = 2;
    CHECK(code_of([&] { decode_clip(bad); }) == ErrorCode::corrupt_file);
    bad = good;
    bad[5] = 7;
    CHECK(code_of([&] { decode_clip(bad); }) == ErrorCode::corrupt_file);
    bad = good;
    bad.pop_back();
    CHECK(code_of([&] { decode_clip(bad); }) == ErrorCode::corrupt_file);
    CHECK(code_of([&] { decode_clip(std::span<const std::uint8_t>(good).first(10)); }) == ErrorCode::corrupt_file);
    bad = good;
    // first sample set to 2.0f
    bad[kClipHeaderBytes + 0] = 0;
    bad[kClipHeaderBytes + 1] = 0;
    bad[kClipHeaderBytes + 2] = 0;
    bad[kClipHeaderBytes + 3] = 0x40;
    CHECK(code_of([&] { decode_clip(bad); }) == ErrorCode::corrupt_file);

    auto mask = encode_mask(TubeMask{1, 1, 2, 0.5, {1, 0}});
    mask.back() = 3;
    CHECK(code_of([&] { decode_mask(mask); }) == ErrorCode::corrupt_file);
    mask.push_back(0);
    CHECK(code_of([&] { decode_mask(mask); }) == ErrorCode::corrupt_file);
    CHECK(code_of([&] { decode_masked_sample(good); }) == ErrorCode::corrupt_file);
}

TEST_CASE("file helpers") {
    testing::TempDir dir("formats");
    const std::vector<std::uint8_t> data = {1, 2, 3, 250};
    write_file(dir.path / "x.bin", data);
    CHECK(read_file(dir.path / "x.bin") == data);
    CHECK(code_of([&] { read_file(dir.path / "missing.bin"); }) == ErrorCode::io);
}
