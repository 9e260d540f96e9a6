#include "pmv/masking.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "pmv/error.hpp"

namespace pmv {

PatchGrid make_patch_grid(int frames, int height, int width, int channels, int tubelet, int patch) {
    if (frames < 1 || height < 1 || width < 1 || channels < 1 || tubelet < 1 || patch < 1)
        throw Error(ErrorCode::geometry, "grid dimensions must be positive");
    if (frames % tubelet != 0 || height % patch != 0 || width % patch != 0)
        throw Error(ErrorCode::geometry, "(" + std::to_string(frames) + "," + std::to_string(height) + "," +
                                             std::to_string(width) + ") not divisible by tubelet " +
                                             std::to_string(tubelet) + " / patch " + std::to_string(patch));
    return PatchGrid{frames, height, width, channels, tubelet, patch};
}

int TubeMask::masked_cells() const noexcept {
    return static_cast<int>(std::count(spatial.begin(), spatial.end(), std::uint8_t{1}));
}

bool TubeMask::masked(int, int h, int w) const noexcept {
    return spatial[static_cast<std::size_t>(h) * w_tokens + w] != 0;
}

bool TubeMask::masked(std::size_t token) const noexcept {
    return spatial[token % spatial.size()] != 0;
}

int masked_cell_count(int cells, double ratio) {
    return static_cast<int>(std::floor(ratio * cells + 0.5));
}

TubeMask sample_tube_mask(const PatchGrid& grid, double ratio, Rng& rng) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw Error(ErrorCode::degenerate_ratio, "mask ratio must be in (0,1)");
    const int cells = grid.spatial_cells();
    const int k = masked_cell_count(cells, ratio);
    if (k <= 0 || k >= cells)
        throw Error(ErrorCode::degenerate_ratio, "ratio " + std::to_string(ratio) + " masks " + std::to_string(k) +
                                                     " of " + std::to_string(cells) + " cells");
    TubeMask mask{grid.t_tokens(), grid.h_tokens(), grid.w_tokens(), ratio,
                  std::vector<std::uint8_t>(static_cast<std::size_t>(cells), 0)};
    std::vector<int> order(cells);
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < k; ++i) {
        const auto j = static_cast<int>(rng.uniform_int(i, cells - 1));
        std::swap(order[i], order[j]);
        mask.spatial[order[i]] = 1;
    }
    return mask;
}

namespace {

void check_clip(const Clip& clip, const PatchGrid& g) {
    if (clip.length() != g.frames || clip.width() != g.width || clip.height() != g.height ||
        clip.channels() != g.channels)
        throw Error(ErrorCode::shape_mismatch, "clip does not match the patch grid");
}

// Calls visit(offset_in_token, frame, pixel_offset_in_frame, run) for each row run, in token layout order.
template <typename F>
void for_each_token_value(const PatchGrid& g, std::size_t token, F&& visit) {
    const int hw = g.spatial_cells();
    const int tt = static_cast<int>(token) / hw;
    const int hh = (static_cast<int>(token) % hw) / g.w_tokens();
    const int ww = static_cast<int>(token) % g.w_tokens();
    const std::size_t run = static_cast<std::size_t>(g.patch) * g.channels;
    std::size_t k = 0;
    for (int dt = 0; dt < g.tubelet; ++dt)
        for (int r = 0; r < g.patch; ++r) {
            const std::size_t off =
                (static_cast<std::size_t>(hh * g.patch + r) * g.width + ww * g.patch) * g.channels;
            visit(k, tt * g.tubelet + dt, off, run);
            k += run;
        }
}

}  // namespace

TokenMatrix patchify(const Clip& clip, const PatchGrid& grid) {
    check_clip(clip, grid);
    TokenMatrix tokens(grid.token_count(), grid.token_dim());
    const auto n = static_cast<std::ptrdiff_t>(tokens.rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < n; ++t) {
        float* dst = tokens.data.data() + t * tokens.cols;
        for_each_token_value(grid, t, [&](std::size_t k, int frame, std::size_t off, std::size_t run) {
            std::copy_n(clip.frames[frame].pixels.data() + off, run, dst + k);
        });
    }
    return tokens;
}

Clip unpatchify(const TokenMatrix& tokens, const PatchGrid& grid) {
    if (tokens.rows != static_cast<std::size_t>(grid.token_count()) ||
        tokens.cols != static_cast<std::size_t>(grid.token_dim()))
        throw Error(ErrorCode::shape_mismatch, "token matrix does not match the patch grid");
    Clip clip;
    clip.frames.assign(grid.frames, Image(grid.width, grid.height, grid.channels));
    for (std::size_t t = 0; t < tokens.rows; ++t) {
        const float* src = tokens.data.data() + t * tokens.cols;
        for_each_token_value(grid, t, [&](std::size_t k, int frame, std::size_t off, std::size_t run) {
            std::copy_n(src + k, run, clip.frames[frame].pixels.data() + off);
        });
    }
    return clip;
}

TokenMatrix make_targets(const TokenMatrix& tokens, bool normalize) {
    if (tokens.rows == 0 || tokens.cols == 0) throw Error(ErrorCode::invalid_argument, "no tokens");
    TokenMatrix out = tokens;
    if (!normalize) return out;
    const auto n = static_cast<std::ptrdiff_t>(tokens.rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < n; ++t) {
        auto row = out.row(t);
        double sum = 0.0;
        for (float v : row) sum += v;
        const double mean = sum / row.size();
        double sq = 0.0;
        for (float v : row) sq += (v - mean) * (v - mean);
        const double denom = std::sqrt(sq / row.size()) + kTargetEpsilon;
        for (float& v : row) v = static_cast<float>((v - mean) / denom);
    }
    return out;
}

MaskedSample apply_mask(const TokenMatrix& tokens, const TubeMask& mask, const PatchGrid& grid, bool normalize) {
    if (tokens.rows != static_cast<std::size_t>(grid.token_count()) ||
        tokens.cols != static_cast<std::size_t>(grid.token_dim()))
        throw Error(ErrorCode::shape_mismatch, "token count does not match the grid");
    if (mask.t_tokens != grid.t_tokens() || mask.h_tokens != grid.h_tokens() || mask.w_tokens != grid.w_tokens() ||
        mask.spatial.size() != static_cast<std::size_t>(grid.spatial_cells()))
        throw Error(ErrorCode::shape_mismatch, "mask does not match the grid");
    MaskedSample s;
    s.mask = mask;
    for (std::size_t t = 0; t < tokens.rows; ++t)
        (mask.masked(t) ? s.masked_index : s.visible_index).push_back(static_cast<std::uint32_t>(t));
    auto gather = [&](const std::vector<std::uint32_t>& idx) {
        TokenMatrix m(idx.size(), tokens.cols);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const auto src = tokens.row(idx[i]);
            std::copy(src.begin(), src.end(), m.row(i).begin());
        }
        return m;
    };
    s.visible = gather(s.visible_index);
    const TokenMatrix masked = gather(s.masked_index);
    s.targets = masked.rows ? make_targets(masked, normalize) : masked;
    return s;
}

}  // namespace pmv
