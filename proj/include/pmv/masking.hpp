#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pmv/image.hpp"
#include "pmv/rng.hpp"

namespace pmv {

// Cube-embedding geometry: tokens are tubelet x patch x patch x channels cubes.
struct PatchGrid {
    int frames = 16;
    int height = 224;
    int width = 224;
    int channels = 3;
    int tubelet = 2;
    int patch = 16;

    int t_tokens() const noexcept { return frames / tubelet; }
    int h_tokens() const noexcept { return height / patch; }
    int w_tokens() const noexcept { return width / patch; }
    int spatial_cells() const noexcept { return h_tokens() * w_tokens(); }
    int token_count() const noexcept { return t_tokens() * spatial_cells(); }
    int token_dim() const noexcept { return tubelet * patch * patch * channels; }
    bool operator==(const PatchGrid&) const = default;
};

PatchGrid make_patch_grid(int frames, int height, int width, int channels, int tubelet = 2, int patch = 16);

// Spatial mask replicated over every temporal token index.
struct TubeMask {
    int t_tokens = 0;
    int h_tokens = 0;
    int w_tokens = 0;
    double ratio = 0.0;
    std::vector<std::uint8_t> spatial;  // h' * w', 1 = masked

    int masked_cells() const noexcept;
    int masked_tokens() const noexcept { return masked_cells() * t_tokens; }
    bool masked(int t, int h, int w) const noexcept;
    bool masked(std::size_t token) const noexcept;
    bool operator==(const TubeMask&) const = default;
};

// round-half-up(ratio * cells)
int masked_cell_count(int cells, double ratio);

TubeMask sample_tube_mask(const PatchGrid& grid, double ratio, Rng& rng);

struct TokenMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<float> data;

    TokenMatrix() = default;
    TokenMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0f) {}
    std::span<float> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const float> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
    bool operator==(const TokenMatrix&) const = default;
};

// Tokens in (t', h', w') order; each flattened in (frame, row, col, channel) order.
TokenMatrix patchify(const Clip& clip, const PatchGrid& grid);
Clip unpatchify(const TokenMatrix& tokens, const PatchGrid& grid);

inline constexpr double kTargetEpsilon = 1e-6;

// Per-token (x - mean) / (std + eps) with the population std, or a copy.
TokenMatrix make_targets(const TokenMatrix& tokens, bool normalize);

struct MaskedSample {
    TokenMatrix visible;
    TokenMatrix targets;
    std::vector<std::uint32_t> visible_index;
    std::vector<std::uint32_t> masked_index;
    TubeMask mask;
};

MaskedSample apply_mask(const TokenMatrix& tokens, const TubeMask& mask, const PatchGrid& grid,
                        bool normalize = true);

}  // namespace pmv
