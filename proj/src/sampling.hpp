#pragma once

// Resampling primitives shared by the parallel kernels and the serial
// references. Both paths evaluate the same expressions in the same order, so
// their outputs agree bitwise.

#include <algorithm>
#include <cmath>

#include "pmv/image.hpp"

namespace pmv::detail {

// Bilinear read at (sx, sy); neighbours outside the image contribute 0.
inline void sample_bilinear_zero(const Image& img, double sx, double sy, float* out) {
    const int nc = img.channels;
    if (!(sx > -1.0 && sx < img.width && sy > -1.0 && sy < img.height)) {
        for (int c = 0; c < nc; ++c) out[c] = 0.0f;
        return;
    }
    const double flx = std::floor(sx);
    const double fly = std::floor(sy);
    const int x0 = static_cast<int>(flx);
    const int y0 = static_cast<int>(fly);
    const double fx = sx - flx;
    const double fy = sy - fly;
    const bool in_x0 = x0 >= 0;
    const bool in_x1 = x0 + 1 < img.width;
    const bool in_y0 = y0 >= 0;
    const bool in_y1 = y0 + 1 < img.height;
    const float* row0 = in_y0 ? img.pixels.data() + static_cast<std::size_t>(y0) * img.row_stride() : nullptr;
    const float* row1 = in_y1 ? img.pixels.data() + static_cast<std::size_t>(y0 + 1) * img.row_stride() : nullptr;
    for (int c = 0; c < nc; ++c) {
        const double p00 = (row0 && in_x0) ? row0[x0 * nc + c] : 0.0;
        const double p10 = (row0 && in_x1) ? row0[(x0 + 1) * nc + c] : 0.0;
        const double p01 = (row1 && in_x0) ? row1[x0 * nc + c] : 0.0;
        const double p11 = (row1 && in_x1) ? row1[(x0 + 1) * nc + c] : 0.0;
        const double top = (1.0 - fx) * p00 + fx * p10;
        const double bot = (1.0 - fx) * p01 + fx * p11;
        const double v = (1.0 - fy) * top + fy * bot;
        out[c] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
}

// Bilinear read with coordinates clamped to [lo, hi] per axis (edge replicate).
inline void sample_bilinear_clamped(const Image& img, double sx, double sy, double lo_x,
                                    double hi_x, double lo_y, double hi_y, float* out) {
    const int nc = img.channels;
    sx = std::clamp(sx, lo_x, hi_x);
    sy = std::clamp(sy, lo_y, hi_y);
    const double flx = std::floor(sx);
    const double fly = std::floor(sy);
    const int x0 = std::clamp(static_cast<int>(flx), 0, img.width - 1);
    const int y0 = std::clamp(static_cast<int>(fly), 0, img.height - 1);
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = sx - flx;
    const double fy = sy - fly;
    const float* row0 = img.pixels.data() + static_cast<std::size_t>(y0) * img.row_stride();
    const float* row1 = img.pixels.data() + static_cast<std::size_t>(y1) * img.row_stride();
    for (int c = 0; c < nc; ++c) {
        const double top = (1.0 - fx) * row0[x0 * nc + c] + fx * row0[x1 * nc + c];
        const double bot = (1.0 - fx) * row1[x0 * nc + c] + fx * row1[x1 * nc + c];
        const double v = (1.0 - fy) * top + fy * bot;
        out[c] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
}

struct CropSpan {
    double lo_x, hi_x, lo_y, hi_y, scale_x, scale_y;
};

inline CropSpan crop_span(double rx, double ry, double rw, double rh, int out_size) {
    CropSpan s;
    s.lo_x = rx;
    s.hi_x = std::max(rx, rx + rw - 1.0);
    s.lo_y = ry;
    s.hi_y = std::max(ry, ry + rh - 1.0);
    s.scale_x = rw / out_size;
    s.scale_y = rh / out_size;
    return s;
}

inline double crop_source_coord(double origin, double scale, int u) {
    return origin + (u + 0.5) * scale - 0.5;
}

inline double luma(const float* px) {
    return 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
}

}  // namespace pmv::detail
