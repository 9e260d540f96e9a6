#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <variant>

#include "pmv/image.hpp"
#include "pmv/rng.hpp"
#include "pmv/source_images.hpp"

namespace pmv {

enum class TransformKind : std::uint8_t {
    identity,
    sliding_window,
    zoom_in_out,
    fade_in_out,
    affine,
    perspective,
    color_jitter,
    cutmix,
};

inline constexpr int kTransformKindCount = 8;

// Short names used by the CLI and the manifest: identity, sliding, zoom, fade,
// affine, perspective, jitter, cutmix.
std::string_view to_string(TransformKind kind);
TransformKind parse_transform_kind(std::string_view name);

// Recursive kinds derive frame i+1 from frame i; windowed kinds derive every
// frame from the source and the step's window.
bool is_windowed(TransformKind kind);

enum class Direction : std::uint8_t { in, out };

struct IdentityParams {
    bool operator==(const IdentityParams&) const = default;
};

// Integer window trajectory: window at step i has top-left start + i * step.
struct WindowTrajectory {
    int side = 0;
    int start_x = 0;
    int start_y = 0;
    int step_x = 0;
    int step_y = 0;

    int x_at(int i) const noexcept { return start_x + i * step_x; }
    int y_at(int i) const noexcept { return start_y + i * step_y; }
    bool operator==(const WindowTrajectory&) const = default;
};

struct SlidingWindowParams {
    WindowTrajectory window;
    bool operator==(const SlidingWindowParams&) const = default;
};

// Centered square window whose side fraction moves linearly from start to end.
// Resolved so that zoom-out has start < end and zoom-in start > end.
struct ZoomParams {
    Direction direction = Direction::out;
    double start_fraction = 0.3;
    double end_fraction = 0.8;
    bool operator==(const ZoomParams&) const = default;
};

struct FadeParams {
    Direction direction = Direction::out;
    bool operator==(const FadeParams&) const = default;
};

struct AffineParams {
    double angle_deg = 0.0;
    double translate_x = 0.0;  // fraction of width
    double translate_y = 0.0;  // fraction of height
    double scale = 1.0;
    double shear_deg = 0.0;
    bool operator==(const AffineParams&) const = default;
};

// Corner order: top-left, top-right, bottom-right, bottom-left. Offsets are
// fractions of width/height added to the corner positions.
struct PerspectiveParams {
    double distortion = 0.05;
    std::array<Vec2, 4> corner_offsets{};
    bool operator==(const PerspectiveParams&) const = default;
};

// Signed deltas: brightness is additive, contrast and saturation scale by
// (1 + delta), hue rotates by delta turns.
struct ColorJitterParams {
    double brightness = 0.0;
    double contrast = 0.0;
    double saturation = 0.0;
    double hue = 0.0;
    bool operator==(const ColorJitterParams&) const = default;
};

// The partner's window at the trajectory start, cut once and pasted over the
// source at each step's window position.
struct CutMixParams {
    WindowTrajectory window;
    int partner = 0;  // index of the partner in the source list
    bool operator==(const CutMixParams&) const = default;
};

// Alternative index equals the TransformKind value.
using TransformParams = std::variant<IdentityParams, SlidingWindowParams, ZoomParams, FadeParams,
                                     AffineParams, PerspectiveParams, ColorJitterParams,
                                     CutMixParams>;

TransformKind kind_of(const TransformParams& params) noexcept;

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double v) const noexcept { return v >= lo && v <= hi; }
    bool operator==(const Range&) const = default;
};

struct ParamRanges {
    double window_fraction = 0.5;      // window side / source side (112 of 224)
    double max_step_fraction = 0.02;   // per-step window displacement bound
    Range zoom_start{0.2, 0.45};
    Range zoom_end{0.55, 0.95};
    Range affine_angle{-15.0, 15.0};
    Range affine_translate{-0.01, 0.01};
    Range affine_scale{0.9999, 1.0001};
    Range affine_shear{-1.0, 1.0};
    double perspective_distortion = 0.05;
    Range brightness{0.0, 0.2};
    Range contrast{0.0, 0.3};
    Range saturation{0.0, 0.2};
    Range hue{0.0, 0.1};

    int window_side(int source_size) const;
    int max_step(int source_size) const;
    bool operator==(const ParamRanges&) const = default;
};

void validate(const ParamRanges& ranges);

// True when every sampled value lies inside `ranges` (magnitudes for the signed
// jitter deltas) and windows stay inside a source_size square for `frames` steps.
bool within_ranges(const TransformParams& params, const ParamRanges& ranges, int source_size,
                   int frames);

// Samples θ once per clip. `frames` bounds the window trajectories so that they
// stay inside the source for every step.
TransformParams sample_params(TransformKind kind, const ParamRanges& ranges, int source_size,
                              int frames, Rng& rng);

// ---------------------------------------------------------------------------
// Kernels (OpenMP over rows; serial references live in pmv/reference.hpp)
// ---------------------------------------------------------------------------

struct RectF {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;
};

// Bilinear resize of `rect` to out_size x out_size. Pixel centres map as
// src = rect.x + (u + 0.5) * rect.w / out - 0.5, clamped to the rect's span.
Image crop_resize(const Image& image, RectF rect, int out_size);

// Output-to-source map: sx = m[0]*x + m[1]*y + m[2], sy = m[3]*x + m[4]*y + m[5].
using AffineMap = std::array<double, 6>;
// Forward transform is rotation (counter-clockwise on screen), x-shear and scale
// about the pixel-grid centre, followed by translation.
AffineMap affine_source_map(const AffineParams& params, int width, int height);

Image warp_affine(const Image& image, const AffineParams& params);

using Homography = std::array<double, 9>;  // row-major 3x3

// H with H * src[k] ~ dst[k]; throws degenerate_homography if singular.
Homography solve_homography(const std::array<Vec2, 4>& src, const std::array<Vec2, 4>& dst);
Vec2 apply_homography(const Homography& h, Vec2 p);

std::array<Vec2, 4> image_corners(int width, int height);
std::array<Vec2, 4> perturbed_corners(const std::array<Vec2, 4>& offsets, int width, int height);

// Homography taking output pixels to source positions: image corners map onto
// the perturbed corners. Exactly the identity when all offsets are zero.
Homography perspective_source_map(const std::array<Vec2, 4>& offsets, int width, int height);

Image warp_perspective(const Image& image, const std::array<Vec2, 4>& corner_offsets);

Image color_jitter(const Image& image, const ColorJitterParams& params);

// Closed-form fade: alpha = 1 - step/(total-1) for fade-out, step/(total-1) for
// fade-in.
double fade_alpha(int step, int total_steps, Direction direction);
Image fade_step(const Image& image, int step, int total_steps, Direction direction);

// One fade-out recursion step: frame `step` to frame `step + 1`, scaling by
// alpha(step+1)/alpha(step). The last step yields an all-zero frame.
Image fade_advance(const Image& frame, int step, int total_steps);

// Background with the partner's side x side box at (src_x, src_y) copied to (x, y).
Image paste_box(const Image& background, const Image& partner, int src_x, int src_y, int x, int y, int side);

// RGB <-> HSV on [0,1] values, hue in turns.
std::array<double, 3> rgb_to_hsv(double r, double g, double b);
std::array<double, 3> hsv_to_rgb(double h, double s, double v);

}  // namespace pmv
