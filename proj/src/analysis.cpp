#include "pmv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pmv/error.hpp"

namespace pmv {

namespace {

void check_track_geometry(const Clip& clip, int patch, int radius) {
    validate(clip);
    if (patch < 1 || clip.width() % patch != 0 || clip.height() % patch != 0)
        throw Error(ErrorCode::geometry, "patch " + std::to_string(patch) + " does not divide the frame");
    if (radius < 0) throw Error(ErrorCode::invalid_argument, "radius must be >= 0");
}

// Squared difference sum of the patch at (px,py) in `a` against (px+dx,py+dy)
// in `b`. Stops once sum / n exceeds `bail` (pass infinity for the exact sum).
double patch_sq_sum(const Image& a, const Image& b, int px, int py, int dx, int dy, int patch, double n, double bail) {
    const std::size_t run = static_cast<std::size_t>(patch) * a.channels;
    double sum = 0.0;
    for (int r = 0; r < patch; ++r) {
        const float* pa = a.pixels.data() + a.index(px, py + r, 0);
        const float* pb = b.pixels.data() + b.index(px + dx, py + dy + r, 0);
        for (std::size_t i = 0; i < run; ++i) {
            const double d = static_cast<double>(pa[i]) - pb[i];
            sum += d * d;
        }
        if (sum / n > bail) return sum;
    }
    return sum;
}

}  // namespace

std::vector<double> gap_differences(const Clip& clip) {
    validate(clip);
    const int h = clip.height();
    const std::size_t stride = clip.frames.front().row_stride();
    const double count = static_cast<double>(stride) * h;
    std::vector<double> gaps(clip.length() - 1);
    std::vector<double> partial(h);
    for (int g = 0; g + 1 < clip.length(); ++g) {
        const float* a = clip.frames[g].pixels.data();
        const float* b = clip.frames[g + 1].pixels.data();
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y) {
            double acc = 0.0;
            for (std::size_t i = y * stride, e = i + stride; i < e; ++i)
                acc += std::abs(static_cast<double>(b[i]) - a[i]);
            partial[y] = acc;
        }
        double total = 0.0;
        for (double v : partial) total += v;
        gaps[g] = total / count;
    }
    return gaps;
}

double frame_difference(const Clip& clip) {
    const std::vector<double> gaps = gap_differences(clip);
    double total = 0.0;
    for (double v : gaps) total += v;
    return total / gaps.size();
}

std::vector<double> min_msd_map(const Clip& clip, int patch, int radius) {
    check_track_geometry(clip, patch, radius);
    const int pw = clip.width() / patch, ph = clip.height() / patch;
    const int per_gap = pw * ph;
    const auto items = static_cast<std::ptrdiff_t>(per_gap) * (clip.length() - 1);
    const double n = static_cast<double>(patch) * patch * clip.channels();
    std::vector<double> out(items);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t item = 0; item < items; ++item) {
        const int g = static_cast<int>(item / per_gap);
        const int px = static_cast<int>(item % per_gap) % pw * patch;
        const int py = static_cast<int>(item % per_gap) / pw * patch;
        const Image& a = clip.frames[g];
        const Image& b = clip.frames[g + 1];
        double best = INFINITY;
        for (int dy = -radius; dy <= radius; ++dy) {
            if (py + dy < 0 || py + dy + patch > b.height) continue;
            for (int dx = -radius; dx <= radius; ++dx) {
                if (px + dx < 0 || px + dx + patch > b.width) continue;
                best = std::min(best, patch_sq_sum(a, b, px, py, dx, dy, patch, n, INFINITY) / n);
            }
        }
        out[item] = best;
    }
    return out;
}

double trackability(const Clip& clip, const TrackParams& params) {
    check_track_geometry(clip, params.patch, params.radius);
    const int patch = params.patch, radius = params.radius;
    const double tau = params.tau;
    const int pw = clip.width() / patch, ph = clip.height() / patch;
    const int per_gap = pw * ph;
    const auto items = static_cast<std::ptrdiff_t>(per_gap) * (clip.length() - 1);
    const double n = static_cast<double>(patch) * patch * clip.channels();
    std::vector<std::uint8_t> tracked(items, 0);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t item = 0; item < items; ++item) {
        const int g = static_cast<int>(item / per_gap);
        const int px = static_cast<int>(item % per_gap) % pw * patch;
        const int py = static_cast<int>(item % per_gap) / pw * patch;
        const Image& a = clip.frames[g];
        const Image& b = clip.frames[g + 1];
        // Any displacement with MSD <= tau decides the item; zero first.
        auto hit = [&](int dx, int dy) { return patch_sq_sum(a, b, px, py, dx, dy, patch, n, tau) / n <= tau; };
        bool found = hit(0, 0);
        for (int dy = -radius; dy <= radius && !found; ++dy) {
            if (py + dy < 0 || py + dy + patch > b.height) continue;
            for (int dx = -radius; dx <= radius && !found; ++dx) {
                if ((dx == 0 && dy == 0) || px + dx < 0 || px + dx + patch > b.width) continue;
                found = hit(dx, dy);
            }
        }
        tracked[item] = found ? 1 : 0;
    }
    const auto count = std::count(tracked.begin(), tracked.end(), std::uint8_t{1});
    return static_cast<double>(count) / static_cast<double>(items);
}

Partition partition_by_difference(std::span<const double> scores) {
    const std::size_t n = scores.size();
    if (n < 4) throw Error(ErrorCode::insufficient_data, "need at least 4 scores, got " + std::to_string(n));
    for (double s : scores)
        if (std::isnan(s)) throw Error(ErrorCode::invalid_argument, "NaN score");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    Partition p;
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t idx = order[r];
        (2 * r < n ? p.bottom : p.top).push_back(idx);
        if (4 * r >= n && 4 * r < 3 * n) p.middle.push_back(idx);
    }
    for (auto* v : {&p.top, &p.middle, &p.bottom}) std::sort(v->begin(), v->end());
    return p;
}

ClipStats compute_stats(const Clip& clip, const TrackParams& params, bool with_trackability) {
    ClipStats s;
    s.gap_diffs = gap_differences(clip);
    double total = 0.0;
    for (double v : s.gap_diffs) total += v;
    s.mean_frame_diff = total / s.gap_diffs.size();
    if (with_trackability) {
        s.trackability = trackability(clip, params);
        s.has_trackability = true;
    }
    return s;
}

}  // namespace pmv
