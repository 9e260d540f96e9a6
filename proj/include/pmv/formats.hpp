#pragma once

// On-disk formats. All integers and floats are little-endian.
//
// Clip file (.pmv), 18-byte header then the samples:
//   "PMV1" | u8 version=1 | u8 dtype (0=u8, 1=f32) | u16 channels | u16 T |
//   u32 H | u32 W | T*H*W*channels values, frame-major, row-major, channel-last.
//   u8 samples hold round(x*255); readers return x = q/255.
//
// Mask file (.pmm), 15-byte header then h'*w' bytes (1 = masked), row-major:
//   "PMM1" | u8 version=1 | u16 t' | u16 h' | u16 w' | f32 ratio
//
// Masked sample file (.pms):
//   "PMS1" | u8 version=1 | u8 normalized | u16 t' | u16 h' | u16 w' |
//   u32 n_visible | u32 n_masked | u32 token_dim |
//   u32 visible_index[n_visible] | u32 masked_index[n_masked] |
//   f32 visible[n_visible*token_dim] | f32 targets[n_masked*token_dim]

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pmv/image.hpp"
#include "pmv/masking.hpp"

namespace pmv {

enum class ClipDType : std::uint8_t { u8 = 0, f32 = 1 };

inline constexpr std::size_t kClipHeaderBytes = 18;
inline constexpr std::size_t kMaskHeaderBytes = 15;

struct ClipHeader {
    std::uint8_t version = 1;
    ClipDType dtype = ClipDType::u8;
    int channels = 0;
    int frames = 0;
    int height = 0;
    int width = 0;
};

std::vector<std::uint8_t> encode_clip(const Clip& clip, ClipDType dtype);
ClipHeader decode_clip_header(std::span<const std::uint8_t> bytes);
Clip decode_clip(std::span<const std::uint8_t> bytes);

// The clip as a reader of its encoding sees it (u8 quantization applied).
Clip stored_representation(const Clip& clip, ClipDType dtype);

std::vector<std::uint8_t> encode_mask(const TubeMask& mask);
TubeMask decode_mask(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_masked_sample(const MaskedSample& sample, bool normalized);

struct MaskedSampleFile {
    bool normalized = true;
    MaskedSample sample;
};
MaskedSampleFile decode_masked_sample(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace pmv
