#pragma once

// Test helpers and independent oracles. The oracles deliberately avoid the
// library's sampling and solving code: bilinear reads are a tent-kernel sum over
// every pixel, and geometric maps are built and inverted with Eigen.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "pmv/analysis.hpp"
#include "pmv/image.hpp"
#include "pmv/transforms.hpp"

namespace testing {

inline pmv::Image random_image(int w, int h, int c, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    pmv::Image img(w, h, c);
    for (float& v : img.pixels) v = u(gen);
    return img;
}

inline pmv::Clip constant_clip(int frames, int w, int h, int c, float value) {
    pmv::Clip clip;
    for (int t = 0; t < frames; ++t) clip.frames.emplace_back(w, h, c, value);
    return clip;
}

inline pmv::Clip random_clip(int frames, int w, int h, int c, std::uint64_t seed) {
    pmv::Clip clip;
    for (int t = 0; t < frames; ++t) clip.frames.push_back(random_image(w, h, c, seed * 1000 + t));
    return clip;
}

inline double max_abs_diff(const pmv::Image& a, const pmv::Image& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i)
        m = std::max(m, std::abs(static_cast<double>(a.pixels[i]) - b.pixels[i]));
    return m;
}

// Bilinear value as a sum of tent weights over the whole image; pixels outside
// contribute nothing.
inline double tent_sample(const pmv::Image& img, double sx, double sy, int c) {
    double v = 0.0;
    for (int y = 0; y < img.height; ++y) {
        const double wy = std::max(0.0, 1.0 - std::abs(sy - y));
        if (wy == 0.0) continue;
        for (int x = 0; x < img.width; ++x) {
            const double wx = std::max(0.0, 1.0 - std::abs(sx - x));
            if (wx != 0.0) v += wx * wy * img.at(x, y, c);
        }
    }
    return std::clamp(v, 0.0, 1.0);
}

// Output-to-source map of the affine warp. Screen y points down, so a rotation
// that is counter-clockwise on screen is a negative angle in Eigen's y-up
// convention.
inline Eigen::Matrix3d affine_inverse_oracle(const pmv::AffineParams& p, int w, int h) {
    const double pi = std::acos(-1.0);
    const Eigen::Matrix2d rot = Eigen::Rotation2Dd(-p.angle_deg * pi / 180.0).toRotationMatrix();
    Eigen::Matrix2d shear;
    shear << 1.0, std::tan(p.shear_deg * pi / 180.0), 0.0, 1.0;
    const Eigen::Vector2d centre((w - 1) / 2.0, (h - 1) / 2.0);
    const Eigen::Vector2d shift(p.translate_x * w, p.translate_y * h);
    Eigen::Affine2d fwd = Eigen::Translation2d(centre + shift) * Eigen::Affine2d(Eigen::Matrix2d(p.scale * rot * shear)) *
                          Eigen::Translation2d(-centre);
    return fwd.inverse().matrix();
}

inline pmv::Image affine_oracle(const pmv::Image& img, const pmv::AffineParams& p) {
    const Eigen::Matrix3d inv = affine_inverse_oracle(p, img.width, img.height);
    pmv::Image out(img.width, img.height, img.channels);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const Eigen::Vector3d s = inv * Eigen::Vector3d(x, y, 1.0);
            for (int c = 0; c < img.channels; ++c)
                out.at(x, y, c) = static_cast<float>(tent_sample(img, s.x(), s.y(), c));
        }
    return out;
}

// Four-point homography from image corners (TL, TR, BR, BL) to the corners
// displaced by offset fractions, solved as a dense 8x8 system.
inline Eigen::Matrix3d homography_oracle(const std::array<pmv::Vec2, 4>& off, int w, int h) {
    const double cx[4] = {0.0, w - 1.0, w - 1.0, 0.0};
    const double cy[4] = {0.0, 0.0, h - 1.0, h - 1.0};
    Eigen::Matrix<double, 8, 8> a = Eigen::Matrix<double, 8, 8>::Zero();
    Eigen::Matrix<double, 8, 1> b;
    for (int k = 0; k < 4; ++k) {
        const double x = cx[k], y = cy[k];
        const double u = cx[k] + off[k].x * w, v = cy[k] + off[k].y * h;
        a.row(2 * k) << x, y, 1, 0, 0, 0, -u * x, -u * y;
        a.row(2 * k + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y;
        b(2 * k) = u;
        b(2 * k + 1) = v;
    }
    const Eigen::Matrix<double, 8, 1> sol = a.fullPivLu().solve(b);
    Eigen::Matrix3d m;
    m << sol(0), sol(1), sol(2), sol(3), sol(4), sol(5), sol(6), sol(7), 1.0;
    return m;
}

inline pmv::Image perspective_oracle(const pmv::Image& img, const std::array<pmv::Vec2, 4>& off) {
    const Eigen::Matrix3d hm = homography_oracle(off, img.width, img.height);
    pmv::Image out(img.width, img.height, img.channels);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const Eigen::Vector3d s = hm * Eigen::Vector3d(x, y, 1.0);
            for (int c = 0; c < img.channels; ++c)
                out.at(x, y, c) = s.z() > 0.0 ? static_cast<float>(tent_sample(img, s.x() / s.z(), s.y() / s.z(), c)) : 0.0f;
        }
    return out;
}

// Index lists by sorting on (score, index) and slicing at n/2, n/4 and 3n/4.
struct PartitionOracle {
    std::vector<std::size_t> top, middle, bottom;
};

inline PartitionOracle partition_oracle(const std::vector<double>& scores) {
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] != scores[b] ? scores[a] < scores[b] : a < b;
    });
    PartitionOracle o;
    const std::size_t half = (n + 1) / 2;  // bottom keeps the median of an odd count
    o.bottom.assign(order.begin(), order.begin() + half);
    o.top.assign(order.begin() + half, order.end());
    const std::size_t q1 = (n + 3) / 4, q3 = (3 * n + 3) / 4;
    o.middle.assign(order.begin() + q1, order.begin() + q3);
    for (auto* v : {&o.top, &o.middle, &o.bottom}) std::sort(v->begin(), v->end());
    return o;
}

// Exhaustive minimum MSD per (gap, patch) with a plain quadruple loop.
inline std::vector<double> brute_min_msd(const pmv::Clip& clip, int patch, int radius) {
    std::vector<double> out;
    const int w = clip.width(), h = clip.height(), nc = clip.channels();
    for (int t = 0; t + 1 < clip.length(); ++t)
        for (int py = 0; py + patch <= h; py += patch)
            for (int px = 0; px + patch <= w; px += patch) {
                double best = INFINITY;
                for (int dy = -radius; dy <= radius; ++dy)
                    for (int dx = -radius; dx <= radius; ++dx) {
                        if (px + dx < 0 || py + dy < 0 || px + dx + patch > w || py + dy + patch > h) continue;
                        double s = 0.0;
                        for (int r = 0; r < patch; ++r)
                            for (int c = 0; c < patch; ++c)
                                for (int ch = 0; ch < nc; ++ch) {
                                    const double d = static_cast<double>(clip.frames[t].at(px + c, py + r, ch)) -
                                                     clip.frames[t + 1].at(px + dx + c, py + dy + r, ch);
                                    s += d * d;
                                }
                        best = std::min(best, s / (patch * patch * nc));
                    }
                out.push_back(best);
            }
    return out;
}

inline double brute_trackability(const pmv::Clip& clip, const pmv::TrackParams& p) {
    const auto m = brute_min_msd(clip, p.patch, p.radius);
    return static_cast<double>(std::count_if(m.begin(), m.end(), [&](double v) { return v <= p.tau; })) / m.size();
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) {
        path = std::filesystem::temp_directory_path() / ("pmv_test_" + name + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

}  // namespace testing
