#include "pmv/video_augment.hpp"

#include <algorithm>
#include <cmath>

#include "pmv/error.hpp"

namespace pmv {

namespace {

void check_pair(const Clip& a, const Clip& b) {
    if (a.frames.empty() || a.length() != b.length())
        throw Error(ErrorCode::shape_mismatch, "clips differ in length");
    for (int t = 0; t < a.length(); ++t)
        if (!a.frames[t].same_shape(b.frames[t])) throw Error(ErrorCode::shape_mismatch, "clip frames differ in shape");
}

}  // namespace

Clip mixup_clips(const Clip& a, const Clip& b, double lambda) {
    check_pair(a, b);
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorCode::invalid_argument, "lambda must be in [0,1]");
    // The smaller weight is always 1 - larger, which is exact for a larger
    // weight in [0.5, 1]; swapping the arguments and passing 1 - lambda then
    // reproduces the same two weights.
    double wa, wb;
    if (lambda < 0.5) {
        wb = 1.0 - lambda;
        wa = 1.0 - wb;
    } else {
        wa = lambda;
        wb = 1.0 - wa;
    }
    Clip out = a;
    for (int t = 0; t < a.length(); ++t) {
        const auto& pa = a.frames[t].pixels;
        const auto& pb = b.frames[t].pixels;
        auto& po = out.frames[t].pixels;
        const auto n = static_cast<std::ptrdiff_t>(po.size());
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const double v = wa * pa[i] + wb * pb[i];
            po[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    }
    return out;
}

double sample_mixup_lambda(double alpha, Rng& rng) {
    if (!(alpha > 0.0)) throw Error(ErrorCode::invalid_argument, "mixup alpha must be positive");
    return rng.beta(alpha, alpha);
}

Clip videomix_clips(const Clip& a, const Clip& b, const VideoMixBox& box) {
    check_pair(a, b);
    if (box.width < 1 || box.height < 1 || box.x < 0 || box.y < 0 || box.x + box.width > a.width() ||
        box.y + box.height > a.height())
        throw Error(ErrorCode::invalid_rect, "videomix box outside the frame");
    Clip out = a;
    const std::size_t nc = static_cast<std::size_t>(a.channels());
    for (int t = 0; t < a.length(); ++t) {
        const Image& src = b.frames[t];
        Image& dst = out.frames[t];
        for (int y = box.y; y < box.y + box.height; ++y) {
            const std::size_t off = dst.index(box.x, y, 0);
            std::copy_n(src.pixels.data() + off, box.width * nc, dst.pixels.data() + off);
        }
    }
    return out;
}

VideoMixBox sample_videomix_box(int width, int height, double alpha, Rng& rng) {
    if (width < 1 || height < 1) throw Error(ErrorCode::invalid_argument, "empty frame");
    const double lambda = sample_mixup_lambda(alpha, rng);
    const double cut = std::sqrt(1.0 - lambda);
    VideoMixBox box;
    box.width = std::clamp(static_cast<int>(std::lround(width * cut)), 1, width);
    box.height = std::clamp(static_cast<int>(std::lround(height * cut)), 1, height);
    box.x = static_cast<int>(rng.uniform_int(0, width - box.width));
    box.y = static_cast<int>(rng.uniform_int(0, height - box.height));
    return box;
}

}  // namespace pmv
