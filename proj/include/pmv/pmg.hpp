#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pmv/image.hpp"
#include "pmv/transforms.hpp"

namespace pmv {

// Kinds the generator draws from, with selection weights.
struct TransformSet {
    std::vector<TransformKind> kinds;
    std::vector<double> weights;

    static TransformSet uniform(std::vector<TransformKind> kinds);
    // Zoom-in/out and affine, equally weighted.
    static TransformSet defaults();
    bool operator==(const TransformSet&) const = default;
};

void validate(const TransformSet& set);

// Everything needed to regenerate a sampled clip: the seed drives source,
// parameter and partner selection; the remaining fields record the outcome.
struct ClipRecipe {
    std::uint64_t seed = 0;
    std::size_t source_count = 0;
    std::size_t source_index = 0;
    std::optional<std::size_t> partner_index;
    TransformKind kind = TransformKind::identity;
    TransformParams params = IdentityParams{};
    int frames = 0;
    bool operator==(const ClipRecipe&) const = default;
};

struct SampledClip {
    Clip clip;
    ClipRecipe recipe;
};

// One application of f_theta to frame `step` of a `frames`-long clip, giving
// frame step+1. Defined for recursive kinds; fade-in clips are time-reversed
// fade-out clips and are stepped with fade-out.
Image recursive_step(const Image& frame, const TransformParams& params, int step, int frames);

// Window of step i for windowed kinds, in source pixels.
RectF window_rect(const TransformParams& params, int step, int frames, int source_size);

// Builds a `frames`-long clip from `source`. Recursive kinds start from the
// source itself; windowed kinds render each frame from the source and the
// step's window. CutMix cuts the partner's window at the start position once
// and pastes it at every step's position. `partner` is the CutMix partner (the
// source itself if null).
Clip generate_clip(const Image& source, const TransformParams& params, int frames,
                   const Image* partner = nullptr);

// The random choices of sample_clip (source, kind, params, partner) without
// rendering anything.
ClipRecipe plan_clip(std::size_t source_count, int source_size, const TransformSet& set, int frames,
                     const ParamRanges& ranges, std::uint64_t seed);

// Re-derives every choice of `recipe` from its seed, source count, frame count and
// recorded kind.
ClipRecipe replan(const ClipRecipe& recipe, int source_size, const ParamRanges& ranges);

// The clip a planned recipe describes. `sources` must have recipe.source_count
// entries; only the selected source and partner are read.
Clip render(const ClipRecipe& recipe, std::span<const Image> sources);

// Sources must be square and equally sized.
SampledClip sample_clip(std::span<const Image> sources, const TransformSet& set, int frames,
                        const ParamRanges& ranges, std::uint64_t seed);

// Regenerates the clip of `recipe` bit-exactly from its seed and kind. The source
// list must match the one the recipe was sampled with.
Clip replay(const ClipRecipe& recipe, std::span<const Image> sources, const ParamRanges& ranges);

}  // namespace pmv
