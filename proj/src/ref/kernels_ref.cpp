#include <algorithm>
#include <cmath>

#include "../sampling.hpp"
#include "pmv/error.hpp"
#include "pmv/reference.hpp"

namespace pmv::ref {

Image crop_resize(const Image& image, RectF rect, int out_size) {
    // Validation is shared with the parallel kernel.
    if (out_size < 1 || !(rect.w > 0.0 && rect.h > 0.0) || rect.x < 0.0 || rect.y < 0.0 ||
        rect.x + rect.w > image.width + 1e-9 || rect.y + rect.h > image.height + 1e-9)
        throw Error(ErrorCode::invalid_rect, "rect outside image");
    const detail::CropSpan span = detail::crop_span(rect.x, rect.y, rect.w, rect.h, out_size);
    Image out(out_size, out_size, image.channels);
    for (int v = 0; v < out_size; ++v)
        for (int u = 0; u < out_size; ++u) {
            const double sx = detail::crop_source_coord(rect.x, span.scale_x, u);
            const double sy = detail::crop_source_coord(rect.y, span.scale_y, v);
            detail::sample_bilinear_clamped(image, sx, sy, span.lo_x, span.hi_x, span.lo_y, span.hi_y,
                                            &out.at(u, v, 0));
        }
    return out;
}

Image warp_affine(const Image& image, const AffineParams& params) {
    const AffineMap m = affine_source_map(params, image.width, image.height);
    Image out(image.width, image.height, image.channels);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) {
            const double sx = m[0] * x + m[1] * y + m[2];
            const double sy = m[3] * x + m[4] * y + m[5];
            detail::sample_bilinear_zero(image, sx, sy, &out.at(x, y, 0));
        }
    return out;
}

Image warp_perspective(const Image& image, const std::array<Vec2, 4>& corner_offsets) {
    const Homography h = perspective_source_map(corner_offsets, image.width, image.height);
    Image out(image.width, image.height, image.channels);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) {
            const double w = h[6] * x + h[7] * y + h[8];
            if (!(w > 0.0)) continue;
            const double sx = (h[0] * x + h[1] * y + h[2]) / w;
            const double sy = (h[3] * x + h[4] * y + h[5]) / w;
            detail::sample_bilinear_zero(image, sx, sy, &out.at(x, y, 0));
        }
    return out;
}

Image color_jitter(const Image& image, const ColorJitterParams& p) {
    Image out = image;
    const bool rgb = out.channels == 3;
    const std::size_t pixels = static_cast<std::size_t>(out.width) * out.height;
    if (p.brightness != 0.0)
        for (float& v : out.pixels) v = static_cast<float>(std::clamp(v + p.brightness, 0.0, 1.0));
    if (p.contrast != 0.0) {
        double total = 0.0;
        for (int y = 0; y < out.height; ++y) {
            double row = 0.0;
            for (int x = 0; x < out.width; ++x) row += rgb ? detail::luma(&out.at(x, y, 0)) : out.at(x, y, 0);
            total += row;
        }
        const double mean = total / static_cast<double>(pixels);
        for (float& v : out.pixels)
            v = static_cast<float>(std::clamp(mean + (1.0 + p.contrast) * (v - mean), 0.0, 1.0));
    }
    if (rgb && p.saturation != 0.0)
        for (std::size_t i = 0; i < pixels; ++i) {
            float* px = out.pixels.data() + 3 * i;
            const double l = detail::luma(px);
            for (int c = 0; c < 3; ++c)
                px[c] = static_cast<float>(std::clamp(l + (1.0 + p.saturation) * (px[c] - l), 0.0, 1.0));
        }
    if (rgb && p.hue != 0.0)
        for (std::size_t i = 0; i < pixels; ++i) {
            float* px = out.pixels.data() + 3 * i;
            const auto hsv = rgb_to_hsv(px[0], px[1], px[2]);
            const auto c3 = hsv_to_rgb(hsv[0] + p.hue, hsv[1], hsv[2]);
            for (int c = 0; c < 3; ++c) px[c] = static_cast<float>(std::clamp(c3[c], 0.0, 1.0));
        }
    return out;
}

std::vector<double> gap_differences(const Clip& clip) {
    validate(clip);
    std::vector<double> gaps;
    for (int g = 0; g + 1 < clip.length(); ++g) {
        const auto& a = clip.frames[g].pixels;
        const auto& b = clip.frames[g + 1].pixels;
        double total = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(static_cast<double>(b[i]) - a[i]);
        gaps.push_back(total / static_cast<double>(a.size()));
    }
    return gaps;
}

std::vector<double> min_msd_map(const Clip& clip, int patch, int radius) {
    validate(clip);
    if (patch < 1 || clip.width() % patch || clip.height() % patch)
        throw Error(ErrorCode::geometry, "patch does not divide the frame");
    std::vector<double> out;
    const int nc = clip.channels();
    for (int g = 0; g + 1 < clip.length(); ++g) {
        const Image& a = clip.frames[g];
        const Image& b = clip.frames[g + 1];
        for (int py = 0; py < a.height; py += patch)
            for (int px = 0; px < a.width; px += patch) {
                double best = INFINITY;
                for (int dy = -radius; dy <= radius; ++dy)
                    for (int dx = -radius; dx <= radius; ++dx) {
                        if (px + dx < 0 || py + dy < 0 || px + dx + patch > b.width || py + dy + patch > b.height)
                            continue;
                        double sum = 0.0;
                        for (int r = 0; r < patch; ++r)
                            for (int c = 0; c < patch; ++c)
                                for (int ch = 0; ch < nc; ++ch) {
                                    const double d = static_cast<double>(a.at(px + c, py + r, ch)) -
                                                     b.at(px + dx + c, py + dy + r, ch);
                                    sum += d * d;
                                }
                        best = std::min(best, sum / (static_cast<double>(patch) * patch * nc));
                    }
                out.push_back(best);
            }
    }
    return out;
}

double trackability(const Clip& clip, const TrackParams& params) {
    const std::vector<double> m = ref::min_msd_map(clip, params.patch, params.radius);
    std::size_t hits = 0;
    for (double v : m) hits += v <= params.tau ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(m.size());
}

}  // namespace pmv::ref
