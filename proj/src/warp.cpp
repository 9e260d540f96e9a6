#include <cmath>
#include <string>
#include <vector>

#include "pmv/error.hpp"
#include "pmv/transforms.hpp"
#include "sampling.hpp"

namespace pmv {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

void check_rect(const Image& image, RectF rect, int out_size) {
    if (out_size < 1) throw Error(ErrorCode::invalid_rect, "out_size must be >= 1");
    const bool ok = std::isfinite(rect.x) && std::isfinite(rect.y) && rect.w > 0.0 && rect.h > 0.0 &&
                    rect.x >= 0.0 && rect.y >= 0.0 && rect.x + rect.w <= image.width + 1e-9 &&
                    rect.y + rect.h <= image.height + 1e-9;
    if (!ok)
        throw Error(ErrorCode::invalid_rect, "rect (" + std::to_string(rect.x) + "," + std::to_string(rect.y) +
                                                 "," + std::to_string(rect.w) + "," + std::to_string(rect.h) +
                                                 ") outside " + std::to_string(image.width) + "x" +
                                                 std::to_string(image.height));
}

double cross(Vec2 a, Vec2 b, Vec2 c) { return (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x); }

bool strictly_convex(const std::array<Vec2, 4>& q) {
    int pos = 0, neg = 0;
    for (int k = 0; k < 4; ++k) {
        const double z = cross(q[k], q[(k + 1) % 4], q[(k + 2) % 4]);
        if (z > 0.0) ++pos;
        else if (z < 0.0) ++neg;
    }
    return pos == 4 || neg == 4;
}

}  // namespace

Image crop_resize(const Image& image, RectF rect, int out_size) {
    check_rect(image, rect, out_size);
    const detail::CropSpan span = detail::crop_span(rect.x, rect.y, rect.w, rect.h, out_size);
    Image out(out_size, out_size, image.channels);
    const int nc = image.channels;
#pragma omp parallel for schedule(static)
    for (int v = 0; v < out_size; ++v) {
        const double sy = detail::crop_source_coord(rect.y, span.scale_y, v);
        float* row = out.pixels.data() + static_cast<std::size_t>(v) * out.row_stride();
        for (int u = 0; u < out_size; ++u) {
            const double sx = detail::crop_source_coord(rect.x, span.scale_x, u);
            detail::sample_bilinear_clamped(image, sx, sy, span.lo_x, span.hi_x, span.lo_y, span.hi_y,
                                            row + u * nc);
        }
    }
    return out;
}

AffineMap affine_source_map(const AffineParams& p, int width, int height) {
    if (!(p.scale > 0.0)) throw Error(ErrorCode::invalid_argument, "affine scale must be positive");
    const double th = p.angle_deg * kDegToRad;
    const double sh = std::tan(p.shear_deg * kDegToRad);
    const double c = std::cos(th), s = std::sin(th);
    // forward linear part: scale * R(th) * [[1, tan(shear)], [0, 1]]
    const double a00 = p.scale * c;
    const double a01 = p.scale * (c * sh + s);
    const double a10 = p.scale * -s;
    const double a11 = p.scale * (-s * sh + c);
    const double det = a00 * a11 - a01 * a10;
    const double inv = 1.0 / det;
    const double i00 = a11 * inv, i01 = -a01 * inv, i10 = -a10 * inv, i11 = a00 * inv;
    const double cx = (width - 1) / 2.0, cy = (height - 1) / 2.0;
    const double px = cx + p.translate_x * width;
    const double py = cy + p.translate_y * height;
    return {i00, i01, cx - (i00 * px + i01 * py), i10, i11, cy - (i10 * px + i11 * py)};
}

Image warp_affine(const Image& image, const AffineParams& params) {
    const AffineMap m = affine_source_map(params, image.width, image.height);
    Image out(image.width, image.height, image.channels);
    const int nc = image.channels;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < image.height; ++y) {
        float* row = out.pixels.data() + static_cast<std::size_t>(y) * out.row_stride();
        for (int x = 0; x < image.width; ++x) {
            const double sx = m[0] * x + m[1] * y + m[2];
            const double sy = m[3] * x + m[4] * y + m[5];
            detail::sample_bilinear_zero(image, sx, sy, row + x * nc);
        }
    }
    return out;
}

Homography solve_homography(const std::array<Vec2, 4>& src, const std::array<Vec2, 4>& dst) {
    // Unknowns h0..h7 with h8 = 1; partial-pivot Gaussian elimination.
    double a[8][9] = {};
    double scale = 1.0;
    for (int k = 0; k < 4; ++k) {
        const double x = src[k].x, y = src[k].y, u = dst[k].x, v = dst[k].y;
        double* r0 = a[2 * k];
        double* r1 = a[2 * k + 1];
        r0[0] = x; r0[1] = y; r0[2] = 1; r0[6] = -u * x; r0[7] = -u * y; r0[8] = u;
        r1[3] = x; r1[4] = y; r1[5] = 1; r1[6] = -v * x; r1[7] = -v * y; r1[8] = v;
        scale = std::max({scale, std::abs(x), std::abs(y), std::abs(u), std::abs(v)});
    }
    for (int col = 0; col < 8; ++col) {
        int piv = col;
        for (int r = col + 1; r < 8; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-12 * scale * scale)
            throw Error(ErrorCode::degenerate_homography, "corner set does not determine a homography");
        if (piv != col)
            for (int j = 0; j < 9; ++j) std::swap(a[piv][j], a[col][j]);
        for (int r = 0; r < 8; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (int j = col; j < 9; ++j) a[r][j] -= f * a[col][j];
        }
    }
    Homography h{};
    for (int i = 0; i < 8; ++i) h[i] = a[i][8] / a[i][i];
    h[8] = 1.0;
    for (double v : h)
        if (!std::isfinite(v)) throw Error(ErrorCode::degenerate_homography, "non-finite homography");
    return h;
}

Vec2 apply_homography(const Homography& h, Vec2 p) {
    const double w = h[6] * p.x + h[7] * p.y + h[8];
    return {(h[0] * p.x + h[1] * p.y + h[2]) / w, (h[3] * p.x + h[4] * p.y + h[5]) / w};
}

std::array<Vec2, 4> image_corners(int width, int height) {
    const double r = width - 1.0, b = height - 1.0;
    return {Vec2{0.0, 0.0}, Vec2{r, 0.0}, Vec2{r, b}, Vec2{0.0, b}};
}

std::array<Vec2, 4> perturbed_corners(const std::array<Vec2, 4>& offsets, int width, int height) {
    std::array<Vec2, 4> q = image_corners(width, height);
    for (int k = 0; k < 4; ++k) {
        q[k].x += offsets[k].x * width;
        q[k].y += offsets[k].y * height;
    }
    return q;
}

Homography perspective_source_map(const std::array<Vec2, 4>& offsets, int width, int height) {
    bool zero = true;
    for (const Vec2& o : offsets) zero = zero && o.x == 0.0 && o.y == 0.0;
    if (zero) return {1, 0, 0, 0, 1, 0, 0, 0, 1};
    if (width < 2 || height < 2)
        throw Error(ErrorCode::degenerate_homography, "image too small for a four-point homography");
    const auto q = perturbed_corners(offsets, width, height);
    if (!strictly_convex(q)) throw Error(ErrorCode::degenerate_homography, "perturbed corners are not convex");
    return solve_homography(image_corners(width, height), q);
}

Image warp_perspective(const Image& image, const std::array<Vec2, 4>& corner_offsets) {
    const Homography h = perspective_source_map(corner_offsets, image.width, image.height);
    Image out(image.width, image.height, image.channels);
    const int nc = image.channels;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < image.height; ++y) {
        float* row = out.pixels.data() + static_cast<std::size_t>(y) * out.row_stride();
        for (int x = 0; x < image.width; ++x) {
            const double w = h[6] * x + h[7] * y + h[8];
            if (!(w > 0.0)) {
                for (int c = 0; c < nc; ++c) row[x * nc + c] = 0.0f;
                continue;
            }
            const double sx = (h[0] * x + h[1] * y + h[2]) / w;
            const double sy = (h[3] * x + h[4] * y + h[5]) / w;
            detail::sample_bilinear_zero(image, sx, sy, row + x * nc);
        }
    }
    return out;
}

std::array<double, 3> rgb_to_hsv(double r, double g, double b) {
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double d = mx - mn;
    double h = 0.0;
    if (d > 0.0) {
        if (mx == r) h = (g - b) / d;
        else if (mx == g) h = 2.0 + (b - r) / d;
        else h = 4.0 + (r - g) / d;
        h /= 6.0;
        if (h < 0.0) h += 1.0;
    }
    const double s = mx > 0.0 ? d / mx : 0.0;
    return {h, s, mx};
}

std::array<double, 3> hsv_to_rgb(double h, double s, double v) {
    h = h - std::floor(h);
    const double h6 = h * 6.0;
    const int sector = std::min(5, static_cast<int>(h6));
    const double f = h6 - sector;
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    switch (sector) {
        case 0: return {v, t, p};
        case 1: return {q, v, p};
        case 2: return {p, v, t};
        case 3: return {p, q, v};
        case 4: return {t, p, v};
        default: return {v, p, q};
    }
}

Image color_jitter(const Image& image, const ColorJitterParams& p) {
    Image out = image;
    const int nc = out.channels;
    const int h = out.height;
    const std::size_t stride = out.row_stride();
    const int w = out.width;

    if (p.brightness != 0.0) {
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y) {
            float* row = out.pixels.data() + y * stride;
            for (std::size_t i = 0; i < stride; ++i)
                row[i] = static_cast<float>(std::clamp(row[i] + p.brightness, 0.0, 1.0));
        }
    }
    if (p.contrast != 0.0) {
        // Row partials summed in row order: independent of the thread count.
        std::vector<double> partial(h, 0.0);
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y) {
            const float* row = out.pixels.data() + y * stride;
            double acc = 0.0;
            for (int x = 0; x < w; ++x) acc += nc == 3 ? detail::luma(row + 3 * x) : row[x];
            partial[y] = acc;
        }
        double total = 0.0;
        for (double v : partial) total += v;
        const double mean = total / (static_cast<double>(w) * h);
        const double k = 1.0 + p.contrast;
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y) {
            float* row = out.pixels.data() + y * stride;
            for (std::size_t i = 0; i < stride; ++i)
                row[i] = static_cast<float>(std::clamp(mean + k * (row[i] - mean), 0.0, 1.0));
        }
    }
    if (nc == 3 && p.saturation != 0.0) {
        const double k = 1.0 + p.saturation;
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y) {
            float* row = out.pixels.data() + y * stride;
            for (int x = 0; x < w; ++x) {
                float* px = row + 3 * x;
                const double l = detail::luma(px);
                for (int c = 0; c < 3; ++c) px[c] = static_cast<float>(std::clamp(l + k * (px[c] - l), 0.0, 1.0));
            }
        }
    }
    if (nc == 3 && p.hue != 0.0) {
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y) {
            float* row = out.pixels.data() + y * stride;
            for (int x = 0; x < w; ++x) {
                float* px = row + 3 * x;
                const auto hsv = rgb_to_hsv(px[0], px[1], px[2]);
                const auto rgb = hsv_to_rgb(hsv[0] + p.hue, hsv[1], hsv[2]);
                for (int c = 0; c < 3; ++c) px[c] = static_cast<float>(std::clamp(rgb[c], 0.0, 1.0));
            }
        }
    }
    return out;
}

double fade_alpha(int step, int total_steps, Direction direction) {
    if (total_steps < 2 || step < 0 || step >= total_steps)
        throw Error(ErrorCode::invalid_argument, "fade step out of range");
    const double span = total_steps - 1.0;
    return direction == Direction::out ? (span - step) / span : step / span;
}

Image fade_step(const Image& image, int step, int total_steps, Direction direction) {
    const double alpha = fade_alpha(step, total_steps, direction);
    Image out = image;
    for (float& v : out.pixels) v = static_cast<float>(v * alpha);
    return out;
}

Image fade_advance(const Image& frame, int step, int total_steps) {
    if (total_steps < 2 || step < 0 || step >= total_steps - 1)
        throw Error(ErrorCode::invalid_argument, "fade step out of range");
    const double factor = (total_steps - 2.0 - step) / (total_steps - 1.0 - step);
    Image out = frame;
    for (float& v : out.pixels) v = static_cast<float>(v * factor);
    return out;
}

Image paste_box(const Image& background, const Image& partner, int src_x, int src_y, int x, int y, int side) {
    if (!background.same_shape(partner)) throw Error(ErrorCode::shape_mismatch, "cutmix partner shape differs");
    auto inside = [&](int px, int py) {
        return px >= 0 && py >= 0 && px + side <= background.width && py + side <= background.height;
    };
    if (side < 1 || !inside(src_x, src_y) || !inside(x, y))
        throw Error(ErrorCode::invalid_trajectory, "cutmix box leaves the frame");
    Image out = background;
    const std::size_t nc = static_cast<std::size_t>(out.channels);
    for (int r = 0; r < side; ++r)
        std::copy_n(partner.pixels.data() + partner.index(src_x, src_y + r, 0), side * nc,
                    out.pixels.data() + out.index(x, y + r, 0));
    return out;
}

}  // namespace pmv
