#include "pmv/transforms.hpp"

#include <cmath>
#include <string>

#include "pmv/error.hpp"

namespace pmv {

namespace {

constexpr std::string_view kKindNames[kTransformKindCount] = {
    "identity", "sliding", "zoom", "fade", "affine", "perspective", "jitter", "cutmix"};

bool valid_range(const Range& r) { return std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi; }

WindowTrajectory sample_trajectory(const ParamRanges& ranges, int source_size, int frames, Rng& rng) {
    const int side = ranges.window_side(source_size);
    if (side < 1 || side > source_size)
        throw Error(ErrorCode::invalid_source, "source of " + std::to_string(source_size) +
                                                   " px cannot hold a " + std::to_string(side) +
                                                   " px window");
    const int max_pos = source_size - side;
    const int max_step = ranges.max_step(source_size);
    const int gaps = frames - 1;
    WindowTrajectory w;
    w.side = side;
    w.start_x = static_cast<int>(rng.uniform_int(0, max_pos));
    w.start_y = static_cast<int>(rng.uniform_int(0, max_pos));
    // Feasible steps keep start + i*step inside [0, max_pos] for i <= gaps.
    auto step_for = [&](int start) {
        const int lo = std::max(-max_step, -(start / gaps));
        const int hi = std::min(max_step, (max_pos - start) / gaps);
        return static_cast<int>(rng.uniform_int(lo, hi));
    };
    w.step_x = step_for(w.start_x);
    w.step_y = step_for(w.start_y);
    return w;
}

bool trajectory_inside(const WindowTrajectory& w, int source_size, int frames) {
    if (w.side < 1 || w.side > source_size) return false;
    for (int i : {0, frames - 1}) {
        const int x = w.x_at(i), y = w.y_at(i);
        if (x < 0 || y < 0 || x + w.side > source_size || y + w.side > source_size) return false;
    }
    return true;
}

double signed_magnitude(const Range& r, Rng& rng) {
    const double m = rng.uniform(r.lo, r.hi);
    return rng.bernoulli(0.5) ? -m : m;
}

}  // namespace

std::string_view to_string(TransformKind kind) { return kKindNames[static_cast<int>(kind)]; }

TransformKind parse_transform_kind(std::string_view name) {
    for (int i = 0; i < kTransformKindCount; ++i)
        if (kKindNames[i] == name) return static_cast<TransformKind>(i);
    if (name == "zoom-in-out" || name == "zoom_in_out") return TransformKind::zoom_in_out;
    if (name == "sliding-window" || name == "sliding_window") return TransformKind::sliding_window;
    if (name == "color-jitter" || name == "color_jitter") return TransformKind::color_jitter;
    throw Error(ErrorCode::invalid_argument, "unknown transform '" + std::string(name) + "'");
}

bool is_windowed(TransformKind kind) {
    return kind == TransformKind::sliding_window || kind == TransformKind::zoom_in_out ||
           kind == TransformKind::cutmix;
}

TransformKind kind_of(const TransformParams& params) noexcept {
    return static_cast<TransformKind>(params.index());
}

int ParamRanges::window_side(int source_size) const {
    return std::max(1, static_cast<int>(std::lround(window_fraction * source_size)));
}

int ParamRanges::max_step(int source_size) const {
    return std::max(0, static_cast<int>(std::lround(max_step_fraction * source_size)));
}

void validate(const ParamRanges& r) {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::invalid_config, what); };
    if (!(r.window_fraction > 0.0 && r.window_fraction <= 1.0)) fail("window_fraction must be in (0,1]");
    if (!(r.max_step_fraction >= 0.0 && r.max_step_fraction <= 1.0)) fail("max_step_fraction must be in [0,1]");
    for (const Range* range : {&r.zoom_start, &r.zoom_end, &r.affine_angle, &r.affine_translate,
                               &r.affine_scale, &r.affine_shear, &r.brightness, &r.contrast,
                               &r.saturation, &r.hue})
        if (!valid_range(*range)) fail("range min must not exceed max");
    if (!(r.zoom_start.lo > 0.0 && r.zoom_start.hi <= 1.0 && r.zoom_end.lo > 0.0 && r.zoom_end.hi <= 1.0))
        fail("zoom fractions must be in (0,1]");
    if (!(r.affine_scale.lo > 0.0)) fail("affine scale must be positive");
    if (!(r.perspective_distortion >= 0.0 && r.perspective_distortion < 1.0))
        fail("perspective distortion must be in [0,1)");
    for (const Range* range : {&r.brightness, &r.contrast, &r.saturation, &r.hue})
        if (range->lo < 0.0) fail("jitter ranges are magnitudes and must be nonnegative");
    if (r.contrast.hi > 1.0 || r.saturation.hi > 1.0) fail("contrast/saturation magnitudes must be <= 1");
}

bool within_ranges(const TransformParams& params, const ParamRanges& r, int source_size, int frames) {
    struct Visitor {
        const ParamRanges& r;
        int size;
        int frames;
        bool operator()(const IdentityParams&) const { return true; }
        bool operator()(const SlidingWindowParams& p) const {
            return p.window.side == r.window_side(size) && std::abs(p.window.step_x) <= r.max_step(size) &&
                   std::abs(p.window.step_y) <= r.max_step(size) && trajectory_inside(p.window, size, frames);
        }
        bool operator()(const ZoomParams& p) const {
            const bool out = p.direction == Direction::out;
            const double s = out ? p.start_fraction : p.end_fraction;
            const double e = out ? p.end_fraction : p.start_fraction;
            return r.zoom_start.contains(s) && r.zoom_end.contains(e) && s < e;
        }
        bool operator()(const FadeParams&) const { return true; }
        bool operator()(const AffineParams& p) const {
            return r.affine_angle.contains(p.angle_deg) && r.affine_translate.contains(p.translate_x) &&
                   r.affine_translate.contains(p.translate_y) && r.affine_scale.contains(p.scale) &&
                   r.affine_shear.contains(p.shear_deg);
        }
        bool operator()(const PerspectiveParams& p) const {
            if (p.distortion != r.perspective_distortion) return false;
            const double half = r.perspective_distortion / 2.0;
            // inward signs per corner: TL(+,+) TR(-,+) BR(-,-) BL(+,-)
            constexpr int sx[4] = {1, -1, -1, 1};
            constexpr int sy[4] = {1, 1, -1, -1};
            for (int k = 0; k < 4; ++k) {
                const double ox = p.corner_offsets[k].x * sx[k];
                const double oy = p.corner_offsets[k].y * sy[k];
                if (!(ox >= 0.0 && ox <= half && oy >= 0.0 && oy <= half)) return false;
            }
            return true;
        }
        bool operator()(const ColorJitterParams& p) const {
            return r.brightness.contains(std::abs(p.brightness)) && r.contrast.contains(std::abs(p.contrast)) &&
                   r.saturation.contains(std::abs(p.saturation)) && r.hue.contains(std::abs(p.hue));
        }
        bool operator()(const CutMixParams& p) const {
            return p.window.side == r.window_side(size) && std::abs(p.window.step_x) <= r.max_step(size) &&
                   std::abs(p.window.step_y) <= r.max_step(size) && trajectory_inside(p.window, size, frames);
        }
    };
    return std::visit(Visitor{r, source_size, frames}, params);
}

TransformParams sample_params(TransformKind kind, const ParamRanges& ranges, int source_size, int frames,
                              Rng& rng) {
    if (frames < 2) throw Error(ErrorCode::invalid_argument, "clips need at least 2 frames");
    if (source_size < 1) throw Error(ErrorCode::invalid_source, "empty source");
    switch (kind) {
        case TransformKind::identity:
            return IdentityParams{};
        case TransformKind::sliding_window:
            return SlidingWindowParams{sample_trajectory(ranges, source_size, frames, rng)};
        case TransformKind::zoom_in_out: {
            ZoomParams p;
            p.direction = rng.bernoulli(0.5) ? Direction::in : Direction::out;
            const double small = rng.uniform(ranges.zoom_start.lo, ranges.zoom_start.hi);
            const double large = rng.uniform(ranges.zoom_end.lo, ranges.zoom_end.hi);
            p.start_fraction = p.direction == Direction::out ? small : large;
            p.end_fraction = p.direction == Direction::out ? large : small;
            return p;
        }
        case TransformKind::fade_in_out:
            return FadeParams{rng.bernoulli(0.5) ? Direction::in : Direction::out};
        case TransformKind::affine: {
            AffineParams p;
            p.angle_deg = rng.uniform(ranges.affine_angle.lo, ranges.affine_angle.hi);
            p.translate_x = rng.uniform(ranges.affine_translate.lo, ranges.affine_translate.hi);
            p.translate_y = rng.uniform(ranges.affine_translate.lo, ranges.affine_translate.hi);
            p.scale = rng.uniform(ranges.affine_scale.lo, ranges.affine_scale.hi);
            p.shear_deg = rng.uniform(ranges.affine_shear.lo, ranges.affine_shear.hi);
            return p;
        }
        case TransformKind::perspective: {
            PerspectiveParams p;
            p.distortion = ranges.perspective_distortion;
            const double half = p.distortion / 2.0;
            constexpr int sx[4] = {1, -1, -1, 1};
            constexpr int sy[4] = {1, 1, -1, -1};
            for (int k = 0; k < 4; ++k) {
                p.corner_offsets[k].x = sx[k] * rng.uniform(0.0, half);
                p.corner_offsets[k].y = sy[k] * rng.uniform(0.0, half);
            }
            return p;
        }
        case TransformKind::color_jitter: {
            ColorJitterParams p;
            p.brightness = signed_magnitude(ranges.brightness, rng);
            p.contrast = signed_magnitude(ranges.contrast, rng);
            p.saturation = signed_magnitude(ranges.saturation, rng);
            p.hue = signed_magnitude(ranges.hue, rng);
            return p;
        }
        case TransformKind::cutmix:
            return CutMixParams{sample_trajectory(ranges, source_size, frames, rng), 0};
    }
    throw Error(ErrorCode::invalid_argument, "unknown transform kind");
}

}  // namespace pmv
