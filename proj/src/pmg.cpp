#include "pmv/pmg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pmv/error.hpp"

namespace pmv {

TransformSet TransformSet::uniform(std::vector<TransformKind> kinds) {
    TransformSet set;
    set.weights.assign(kinds.size(), kinds.empty() ? 0.0 : 1.0 / static_cast<double>(kinds.size()));
    set.kinds = std::move(kinds);
    return set;
}

TransformSet TransformSet::defaults() {
    return uniform({TransformKind::zoom_in_out, TransformKind::affine});
}

void validate(const TransformSet& set) {
    if (set.kinds.empty()) throw Error(ErrorCode::invalid_config, "transform set is empty");
    if (set.weights.size() != set.kinds.size())
        throw Error(ErrorCode::invalid_config, "one weight per transform kind required");
    double sum = 0.0;
    for (double w : set.weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::invalid_config, "negative transform weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorCode::invalid_config, "transform weights must sum to 1");
}

Image recursive_step(const Image& frame, const TransformParams& params, int step, int frames) {
    switch (kind_of(params)) {
        case TransformKind::identity:
            return frame;
        case TransformKind::affine:
            return warp_affine(frame, std::get<AffineParams>(params));
        case TransformKind::perspective:
            return warp_perspective(frame, std::get<PerspectiveParams>(params).corner_offsets);
        case TransformKind::color_jitter:
            return color_jitter(frame, std::get<ColorJitterParams>(params));
        case TransformKind::fade_in_out:
            return fade_advance(frame, step, frames);
        default:
            throw Error(ErrorCode::invalid_argument,
                        std::string(to_string(kind_of(params))) + " is not a recursive transform");
    }
}

RectF window_rect(const TransformParams& params, int step, int frames, int source_size) {
    auto from_trajectory = [](const WindowTrajectory& w, int i) {
        return RectF{static_cast<double>(w.x_at(i)), static_cast<double>(w.y_at(i)), static_cast<double>(w.side),
                     static_cast<double>(w.side)};
    };
    switch (kind_of(params)) {
        case TransformKind::sliding_window:
            return from_trajectory(std::get<SlidingWindowParams>(params).window, step);
        case TransformKind::cutmix:
            return from_trajectory(std::get<CutMixParams>(params).window, step);
        case TransformKind::zoom_in_out: {
            const auto& z = std::get<ZoomParams>(params);
            const double frac = z.start_fraction + (z.end_fraction - z.start_fraction) * step / (frames - 1);
            const double side = frac * source_size;
            const double origin = (source_size - side) / 2.0;
            return {origin, origin, side, side};
        }
        default:
            throw Error(ErrorCode::invalid_argument, "not a windowed transform");
    }
}

namespace {

void check_window(RectF r, int size) {
    if (r.x < 0.0 || r.y < 0.0 || r.w < 1.0 || r.x + r.w > size || r.y + r.h > size)
        throw Error(ErrorCode::invalid_trajectory, "window leaves the source");
}

}  // namespace

Clip generate_clip(const Image& source, const TransformParams& params, int frames, const Image* partner) {
    if (frames < 2) throw Error(ErrorCode::invalid_argument, "clips need at least 2 frames");
    validate(source);
    const TransformKind kind = kind_of(params);
    Clip clip;
    clip.frames.reserve(frames);

    if (!is_windowed(kind)) {
        clip.frames.push_back(source);
        for (int i = 0; i + 1 < frames; ++i) clip.frames.push_back(recursive_step(clip.frames.back(), params, i, frames));
        if (kind == TransformKind::fade_in_out && std::get<FadeParams>(params).direction == Direction::in)
            std::reverse(clip.frames.begin(), clip.frames.end());
        return clip;
    }

    if (source.width != source.height) throw Error(ErrorCode::invalid_source, "windowed kinds need a square source");
    const int size = source.width;
    for (int i = 0; i < frames; ++i) check_window(window_rect(params, i, frames, size), size);

    if (kind == TransformKind::cutmix) {
        const Image& other = partner ? *partner : source;
        const WindowTrajectory& w = std::get<CutMixParams>(params).window;
        for (int i = 0; i < frames; ++i) clip.frames.push_back(paste_box(source, other, w.start_x, w.start_y, w.x_at(i), w.y_at(i), w.side));
        return clip;
    }
    for (int i = 0; i < frames; ++i) clip.frames.push_back(crop_resize(source, window_rect(params, i, frames, size), size));
    return clip;
}

namespace {

int common_square_size(std::span<const Image> sources) {
    if (sources.empty()) throw Error(ErrorCode::source_empty, "no source images");
    const Image& first = sources.front();
    if (first.width != first.height) throw Error(ErrorCode::invalid_source, "sources must be square");
    for (const Image& s : sources)
        if (!s.same_shape(first)) throw Error(ErrorCode::invalid_source, "sources must share one shape");
    return first.width;
}

std::size_t draw_partner(Rng& rng, std::size_t source, std::size_t count) {
    if (count < 2) return source;
    auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(count) - 2));
    return j >= source ? j + 1 : j;
}

TransformKind draw_kind(Rng& rng, const TransformSet& set) {
    double total = 0.0;
    for (double w : set.weights) total += w;
    const double u = rng.uniform01() * total;
    double acc = 0.0;
    for (std::size_t k = 0; k < set.kinds.size(); ++k) {
        acc += set.weights[k];
        if (u < acc) return set.kinds[k];
    }
    // u landed on the rounding tail: last kind with positive weight
    for (std::size_t k = set.kinds.size(); k-- > 0;)
        if (set.weights[k] > 0.0) return set.kinds[k];
    return set.kinds.back();
}

}  // namespace

ClipRecipe plan_clip(std::size_t source_count, int source_size, const TransformSet& set, int frames,
                     const ParamRanges& ranges, std::uint64_t seed) {
    validate(set);
    if (source_count == 0) throw Error(ErrorCode::source_empty, "no source images");
    Rng rng(seed);
    ClipRecipe r;
    r.seed = seed;
    r.source_count = source_count;
    r.frames = frames;
    r.source_index = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(source_count) - 1));
    r.kind = draw_kind(rng, set);
    r.params = sample_params(r.kind, ranges, source_size, frames, rng);
    if (r.kind == TransformKind::cutmix) {
        const std::size_t p = draw_partner(rng, r.source_index, source_count);
        std::get<CutMixParams>(r.params).partner = static_cast<int>(p);
        r.partner_index = p;
    }
    return r;
}

ClipRecipe replan(const ClipRecipe& recipe, int source_size, const ParamRanges& ranges) {
    if (recipe.source_count == 0) throw Error(ErrorCode::source_empty, "no source images");
    Rng rng(recipe.seed);
    ClipRecipe r;
    r.seed = recipe.seed;
    r.source_count = recipe.source_count;
    r.frames = recipe.frames;
    r.kind = recipe.kind;
    r.source_index =
        static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(recipe.source_count) - 1));
    rng.uniform01();  // kind draw; the recorded kind is authoritative
    r.params = sample_params(recipe.kind, ranges, source_size, recipe.frames, rng);
    if (recipe.kind == TransformKind::cutmix) {
        const std::size_t p = draw_partner(rng, r.source_index, recipe.source_count);
        std::get<CutMixParams>(r.params).partner = static_cast<int>(p);
        r.partner_index = p;
    }
    return r;
}

Clip render(const ClipRecipe& recipe, std::span<const Image> sources) {
    if (recipe.source_count != sources.size() || recipe.source_index >= sources.size() ||
        (recipe.partner_index && *recipe.partner_index >= sources.size()))
        throw Error(ErrorCode::missing_source, "recipe references " + std::to_string(recipe.source_count) +
                                                   " sources, " + std::to_string(sources.size()) + " supplied");
    const Image* partner = recipe.partner_index ? &sources[*recipe.partner_index] : nullptr;
    return generate_clip(sources[recipe.source_index], recipe.params, recipe.frames, partner);
}

SampledClip sample_clip(std::span<const Image> sources, const TransformSet& set, int frames,
                        const ParamRanges& ranges, std::uint64_t seed) {
    const int size = common_square_size(sources);
    SampledClip out;
    out.recipe = plan_clip(sources.size(), size, set, frames, ranges, seed);
    out.clip = render(out.recipe, sources);
    return out;
}

Clip replay(const ClipRecipe& recipe, std::span<const Image> sources, const ParamRanges& ranges) {
    if (recipe.source_count != sources.size())
        throw Error(ErrorCode::missing_source, "recipe references " + std::to_string(recipe.source_count) +
                                                   " sources, " + std::to_string(sources.size()) + " supplied");
    const int size = common_square_size(sources);
    return render(replan(recipe, size, ranges), sources);
}

}  // namespace pmv
