#include "pmv/formats.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "pmv/error.hpp"
#include "pmv/quantize.hpp"

namespace pmv {

namespace {

class ByteWriter {
public:
    explicit ByteWriter(std::size_t reserve) { bytes_.reserve(reserve); }
    void raw(const char* s, std::size_t n) { bytes_.insert(bytes_.end(), s, s + n); }
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u16(std::uint32_t v) {
        if (v > 0xFFFF) throw Error(ErrorCode::invalid_argument, "value does not fit u16");
        for (int i = 0; i < 2; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u32(std::uint64_t v) {
        if (v > 0xFFFFFFFFULL) throw Error(ErrorCode::invalid_argument, "value does not fit u32");
        for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
    void expect_magic(const char* magic) {
        need(4);
        if (std::memcmp(bytes_.data() + pos_, magic, 4) != 0)
            throw Error(ErrorCode::corrupt_file, std::string("bad magic, expected ") + magic);
        pos_ += 4;
    }
    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }
    std::uint32_t u16() {
        need(2);
        std::uint32_t v = bytes_[pos_] | (bytes_[pos_ + 1] << 8);
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    std::size_t remaining() const { return bytes_.size() - pos_; }
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw Error(ErrorCode::corrupt_file, "truncated file");
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_clip(const Clip& clip, ClipDType dtype) {
    validate(clip);
    const std::size_t per_frame = clip.frames.front().size();
    const std::size_t values = per_frame * clip.frames.size();
    ByteWriter w(kClipHeaderBytes + values * (dtype == ClipDType::u8 ? 1 : 4));
    w.raw("PMV1", 4);
    w.u8(1);
    w.u8(static_cast<std::uint8_t>(dtype));
    w.u16(clip.channels());
    w.u16(clip.length());
    w.u32(clip.height());
    w.u32(clip.width());
    for (const Image& f : clip.frames)
        for (float v : f.pixels) {
            if (dtype == ClipDType::u8) w.u8(quantize_u8(v));
            else w.f32(v);
        }
    return w.take();
}

ClipHeader decode_clip_header(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    r.expect_magic("PMV1");
    ClipHeader h;
    h.version = r.u8();
    if (h.version != 1) throw Error(ErrorCode::corrupt_file, "unsupported clip version " + std::to_string(h.version));
    const std::uint8_t dt = r.u8();
    if (dt > 1) throw Error(ErrorCode::corrupt_file, "unknown dtype " + std::to_string(dt));
    h.dtype = static_cast<ClipDType>(dt);
    h.channels = static_cast<int>(r.u16());
    h.frames = static_cast<int>(r.u16());
    const std::uint32_t hh = r.u32(), ww = r.u32();
    if (hh == 0 || ww == 0 || hh > (1u << 20) || ww > (1u << 20) || (h.channels != 1 && h.channels != 3) ||
        h.frames < 1)
        throw Error(ErrorCode::corrupt_file, "implausible clip header");
    h.height = static_cast<int>(hh);
    h.width = static_cast<int>(ww);
    return h;
}

Clip decode_clip(std::span<const std::uint8_t> bytes) {
    const ClipHeader h = decode_clip_header(bytes);
    const std::size_t per_frame = static_cast<std::size_t>(h.width) * h.height * h.channels;
    const std::size_t elem = h.dtype == ClipDType::u8 ? 1 : 4;
    if (bytes.size() != kClipHeaderBytes + per_frame * h.frames * elem)
        throw Error(ErrorCode::corrupt_file, "clip payload size mismatch");
    Clip clip;
    clip.frames.assign(h.frames, Image(h.width, h.height, h.channels));
    const std::uint8_t* p = bytes.data() + kClipHeaderBytes;
    for (Image& f : clip.frames) {
        if (h.dtype == ClipDType::u8) {
            for (float& v : f.pixels) v = dequantize_u8(*p++);
        } else {
            ByteReader r(std::span<const std::uint8_t>(p, per_frame * 4));
            for (float& v : f.pixels) {
                v = r.f32();
                if (!(v >= 0.0f && v <= 1.0f)) throw Error(ErrorCode::corrupt_file, "sample outside [0,1]");
            }
            p += per_frame * 4;
        }
    }
    return clip;
}

Clip stored_representation(const Clip& clip, ClipDType dtype) {
    if (dtype == ClipDType::f32) return clip;
    Clip out = clip;
    for (Image& f : out.frames)
        for (float& v : f.pixels) v = dequantize_u8(quantize_u8(v));
    return out;
}

std::vector<std::uint8_t> encode_mask(const TubeMask& mask) {
    ByteWriter w(kMaskHeaderBytes + mask.spatial.size());
    w.raw("PMM1", 4);
    w.u8(1);
    w.u16(mask.t_tokens);
    w.u16(mask.h_tokens);
    w.u16(mask.w_tokens);
    w.f32(static_cast<float>(mask.ratio));
    for (std::uint8_t b : mask.spatial) w.u8(b ? 1 : 0);
    return w.take();
}

TubeMask decode_mask(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    r.expect_magic("PMM1");
    if (r.u8() != 1) throw Error(ErrorCode::corrupt_file, "unsupported mask version");
    TubeMask m;
    m.t_tokens = static_cast<int>(r.u16());
    m.h_tokens = static_cast<int>(r.u16());
    m.w_tokens = static_cast<int>(r.u16());
    m.ratio = r.f32();
    const std::size_t cells = static_cast<std::size_t>(m.h_tokens) * m.w_tokens;
    if (r.remaining() != cells) throw Error(ErrorCode::corrupt_file, "mask payload size mismatch");
    m.spatial.resize(cells);
    for (auto& b : m.spatial) {
        b = r.u8();
        if (b > 1) throw Error(ErrorCode::corrupt_file, "mask cell must be 0 or 1");
    }
    return m;
}

std::vector<std::uint8_t> encode_masked_sample(const MaskedSample& s, bool normalized) {
    const std::size_t dim = s.visible.rows ? s.visible.cols : s.targets.cols;
    ByteWriter w(32 + 4 * (s.visible_index.size() + s.masked_index.size()) + 4 * (s.visible.data.size() + s.targets.data.size()));
    w.raw("PMS1", 4);
    w.u8(1);
    w.u8(normalized ? 1 : 0);
    w.u16(s.mask.t_tokens);
    w.u16(s.mask.h_tokens);
    w.u16(s.mask.w_tokens);
    w.u32(s.visible_index.size());
    w.u32(s.masked_index.size());
    w.u32(dim);
    for (auto i : s.visible_index) w.u32(i);
    for (auto i : s.masked_index) w.u32(i);
    for (float v : s.visible.data) w.f32(v);
    for (float v : s.targets.data) w.f32(v);
    return w.take();
}

MaskedSampleFile decode_masked_sample(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    r.expect_magic("PMS1");
    if (r.u8() != 1) throw Error(ErrorCode::corrupt_file, "unsupported sample version");
    MaskedSampleFile f;
    f.normalized = r.u8() != 0;
    MaskedSample& s = f.sample;
    s.mask.t_tokens = static_cast<int>(r.u16());
    s.mask.h_tokens = static_cast<int>(r.u16());
    s.mask.w_tokens = static_cast<int>(r.u16());
    const std::size_t nv = r.u32(), nm = r.u32(), dim = r.u32();
    if (r.remaining() != 4 * (nv + nm) + 4 * dim * (nv + nm))
        throw Error(ErrorCode::corrupt_file, "sample payload size mismatch");
    s.visible_index.resize(nv);
    s.masked_index.resize(nm);
    for (auto& i : s.visible_index) i = r.u32();
    for (auto& i : s.masked_index) i = r.u32();
    s.visible = TokenMatrix(nv, dim);
    s.targets = TokenMatrix(nm, dim);
    for (float& v : s.visible.data) v = r.f32();
    for (float& v : s.targets.data) v = r.f32();
    const std::size_t cells = static_cast<std::size_t>(s.mask.h_tokens) * s.mask.w_tokens;
    s.mask.spatial.assign(cells, 0);
    for (auto i : s.masked_index) s.mask.spatial[i % std::max<std::size_t>(cells, 1)] = 1;
    if (cells) s.mask.ratio = static_cast<double>(s.mask.masked_cells()) / static_cast<double>(cells);
    return f;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    std::vector<std::uint8_t> bytes(size);
    if (size && !in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size)))
        throw Error(ErrorCode::io, "cannot read " + path.string());
    return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

}  // namespace pmv
