#include "pmv/source_images.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "pmv/error.hpp"
#include "pmv/raster_io.hpp"
#include "pmv/transforms.hpp"

namespace pmv {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Directory sources

std::vector<std::string> list_image_files(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::io, "not a directory: " + dir.string());
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    std::vector<std::string> decodable;
    for (const auto& name : names) {
        if (probe_raster(dir / name)) decodable.push_back(name);
        else std::cerr << "warning: skipping undecodable file " << (dir / name).string() << "\n";
    }
    return decodable;
}

Image load_square_image(const fs::path& file, int target_size) {
    const Image full = read_raster(file);
    const int side = std::min(full.width, full.height);
    const RectF rect{static_cast<double>((full.width - side) / 2), static_cast<double>((full.height - side) / 2),
                     static_cast<double>(side), static_cast<double>(side)};
    return crop_resize(full, rect, target_size);
}

std::vector<NamedImage> load_image_dir_named(const fs::path& dir, int count, int target_size, std::uint64_t seed) {
    if (count < 1) throw Error(ErrorCode::invalid_argument, "count must be >= 1");
    if (target_size < 1) throw Error(ErrorCode::invalid_argument, "target_size must be >= 1");
    const std::vector<std::string> files = list_image_files(dir);
    if (files.empty()) throw Error(ErrorCode::source_empty, "no decodable images in " + dir.string());

    const auto n = static_cast<std::int64_t>(files.size());
    Rng rng(seed);
    std::vector<std::size_t> order(files.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::size_t> picks;
    picks.reserve(count);
    // Fisher-Yates prefix while files remain, then uniform draws with replacement.
    for (std::int64_t i = 0; i < std::min<std::int64_t>(count, n); ++i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(i, n - 1));
        std::swap(order[static_cast<std::size_t>(i)], order[j]);
        picks.push_back(order[static_cast<std::size_t>(i)]);
    }
    for (std::int64_t i = n; i < count; ++i) picks.push_back(static_cast<std::size_t>(rng.uniform_int(0, n - 1)));

    std::vector<NamedImage> out;
    out.reserve(picks.size());
    for (std::size_t idx : picks) out.push_back({files[idx], load_square_image(dir / files[idx], target_size)});
    return out;
}

std::vector<Image> load_image_dir(const fs::path& dir, int count, int target_size, std::uint64_t seed) {
    std::vector<Image> out;
    for (auto& named : load_image_dir_named(dir, count, target_size, seed)) out.push_back(std::move(named.image));
    return out;
}

// ---------------------------------------------------------------------------
// Iterated function systems

double AffineMap2::spectral_norm() const noexcept {
    const double frob2 = linear[0] * linear[0] + linear[1] * linear[1] + linear[2] * linear[2] + linear[3] * linear[3];
    const double det = linear[0] * linear[3] - linear[1] * linear[2];
    const double disc = std::max(0.0, frob2 * frob2 - 4.0 * det * det);
    return std::sqrt((frob2 + std::sqrt(disc)) / 2.0);
}

void validate(const IfsSystem& system) {
    if (system.maps.empty()) throw Error(ErrorCode::invalid_system, "system has no maps");
    if (system.weights.size() != system.maps.size())
        throw Error(ErrorCode::invalid_system, "one weight per map required");
    double sum = 0.0;
    for (double w : system.weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::invalid_system, "negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorCode::invalid_system, "weights must sum to 1");
    for (const AffineMap2& m : system.maps) {
        if (!(m.spectral_norm() < 1.0)) throw Error(ErrorCode::invalid_system, "map is not a contraction");
        if (!std::isfinite(m.offset.x) || !std::isfinite(m.offset.y))
            throw Error(ErrorCode::invalid_system, "non-finite offset");
    }
}

bool Ball::contains(Vec2 p, double slack) const noexcept {
    return std::hypot(p.x - center.x, p.y - center.y) <= radius * (1.0 + slack) + slack;
}

Ball invariant_ball(const IfsSystem& system) {
    // |A x + b| <= s r + |b| <= r whenever r >= |b| / (1 - s).
    Ball ball;
    for (const AffineMap2& m : system.maps)
        ball.radius = std::max(ball.radius, std::hypot(m.offset.x, m.offset.y) / (1.0 - m.spectral_norm()));
    return ball;
}

std::vector<Vec2> ifs_orbit(const IfsSystem& system, int iterations, std::uint64_t seed) {
    validate(system);
    if (iterations < 1) throw Error(ErrorCode::invalid_argument, "iterations must be positive");
    std::vector<double> cumulative(system.weights.size());
    std::partial_sum(system.weights.begin(), system.weights.end(), cumulative.begin());
    Rng rng(seed);
    std::vector<Vec2> points;
    points.reserve(iterations);
    Vec2 p{0.0, 0.0};
    for (int i = 0; i < iterations + kIfsDiscard; ++i) {
        const double u = rng.uniform01() * cumulative.back();
        std::size_t k = 0;
        while (k + 1 < cumulative.size() && u >= cumulative[k]) ++k;
        p = system.maps[k].apply(p);
        if (i >= kIfsDiscard) points.push_back(p);
    }
    return points;
}

std::array<int, 2> RenderWindow::pixel_of(Vec2 p, int size) const noexcept {
    const double u = (p.x - origin.x) / extent * size;
    const double v = (p.y - origin.y) / extent * size;
    auto to_int = [](double t) {
        if (!(t > -1e9 && t < 1e9)) return -1;
        return static_cast<int>(std::floor(t));
    };
    return {to_int(u), to_int(v)};
}

RenderWindow fit_window(const std::vector<Vec2>& points) {
    if (points.empty()) return {};
    double x0 = points[0].x, x1 = x0, y0 = points[0].y, y1 = y0;
    for (const Vec2& p : points) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    const double side = std::max({x1 - x0, y1 - y0, 1e-9});
    RenderWindow w;
    w.extent = side * 1.04;
    w.origin = {(x0 + x1) / 2.0 - w.extent / 2.0, (y0 + y1) / 2.0 - w.extent / 2.0};
    return w;
}

Image rasterize_density(const std::vector<Vec2>& points, const RenderWindow& window, int size) {
    if (size < 1) throw Error(ErrorCode::invalid_argument, "size must be positive");
    std::vector<std::uint32_t> hits(static_cast<std::size_t>(size) * size, 0);
    std::uint32_t peak = 0;
    for (const Vec2& p : points) {
        const auto [u, v] = window.pixel_of(p, size);
        if (u < 0 || v < 0 || u >= size || v >= size) continue;
        peak = std::max(peak, ++hits[static_cast<std::size_t>(v) * size + u]);
    }
    Image out(size, size, 3);
    if (peak == 0) return out;
    const double norm = std::log1p(static_cast<double>(peak));
    for (std::size_t i = 0; i < hits.size(); ++i) {
        const float v = static_cast<float>(std::log1p(static_cast<double>(hits[i])) / norm);
        out.pixels[3 * i] = out.pixels[3 * i + 1] = out.pixels[3 * i + 2] = std::min(v, 1.0f);
    }
    return out;
}

Image gen_fractal_ifs(const IfsSystem& system, int iterations, int size, std::uint64_t seed) {
    if (iterations < 1000) throw Error(ErrorCode::invalid_argument, "iterations must be >= 1000");
    const std::vector<Vec2> points = ifs_orbit(system, iterations, seed);
    return rasterize_density(points, fit_window(points), size);
}

IfsSystem random_ifs(Rng& rng) {
    IfsSystem sys;
    const int n = static_cast<int>(rng.uniform_int(2, 4));
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
        const double t1 = rng.uniform(0.0, 2.0 * M_PI);
        const double t2 = rng.uniform(0.0, 2.0 * M_PI);
        const double s1 = rng.uniform(0.3, 0.8);
        const double s2 = rng.uniform(0.3, s1) * (rng.bernoulli(0.5) ? -1.0 : 1.0);
        const double c1 = std::cos(t1), n1 = std::sin(t1), c2 = std::cos(t2), n2 = std::sin(t2);
        // R(t1) * diag(s1, s2) * R(t2)
        AffineMap2 m;
        m.linear = {c1 * s1 * c2 - n1 * s2 * n2, -c1 * s1 * n2 - n1 * s2 * c2,
                    n1 * s1 * c2 + c1 * s2 * n2, -n1 * s1 * n2 + c1 * s2 * c2};
        m.offset = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const double w = std::abs(s1 * s2);
        sys.maps.push_back(m);
        sys.weights.push_back(w);
        total += w;
    }
    for (double& w : sys.weights) w /= total;
    return sys;
}

// ---------------------------------------------------------------------------
// Gradient noise

namespace {

constexpr int kGradients = 16;

const std::array<Vec2, kGradients>& gradient_table() {
    static const std::array<Vec2, kGradients> table = [] {
        std::array<Vec2, kGradients> t{};
        for (int i = 0; i < kGradients; ++i)
            t[i] = {std::cos(2.0 * M_PI * i / kGradients), std::sin(2.0 * M_PI * i / kGradients)};
        return t;
    }();
    return table;
}

inline const Vec2& lattice_gradient(std::uint64_t salt, std::int64_t ix, std::int64_t iy) {
    const std::uint64_t h = splitmix64(salt ^ splitmix64(static_cast<std::uint64_t>(ix) * 0x8CB92BA72F3D8DD7ULL ^
                                                         static_cast<std::uint64_t>(iy) * 0xD6E8FEB86659FD93ULL));
    return gradient_table()[h >> 60];
}

inline double fade_curve(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

double gradient_noise(std::uint64_t salt, double x, double y) {
    const double fx0 = std::floor(x), fy0 = std::floor(y);
    const auto ix = static_cast<std::int64_t>(fx0), iy = static_cast<std::int64_t>(fy0);
    const double dx = x - fx0, dy = y - fy0;
    auto dot = [&](std::int64_t cx, std::int64_t cy, double ox, double oy) {
        const Vec2& g = lattice_gradient(salt, ix + cx, iy + cy);
        return g.x * ox + g.y * oy;
    };
    const double n00 = dot(0, 0, dx, dy);
    const double n10 = dot(1, 0, dx - 1.0, dy);
    const double n01 = dot(0, 1, dx, dy - 1.0);
    const double n11 = dot(1, 1, dx - 1.0, dy - 1.0);
    const double u = fade_curve(dx), v = fade_curve(dy);
    const double top = n00 + u * (n10 - n00);
    const double bot = n01 + u * (n11 - n01);
    return top + v * (bot - top);
}

}  // namespace

void validate(const PerlinSpec& spec) {
    if (spec.cell < 2) throw Error(ErrorCode::invalid_argument, "perlin cell must be >= 2");
    if (spec.octaves < 1) throw Error(ErrorCode::invalid_argument, "perlin octaves must be >= 1");
    if (!(spec.persistence > 0.0 && spec.persistence <= 1.0))
        throw Error(ErrorCode::invalid_argument, "perlin persistence must be in (0,1]");
}

double perlin_value(const PerlinSpec& spec, int channel, double x, double y) {
    double sum = 0.0, amp = 1.0, freq = 1.0 / spec.cell;
    for (int o = 0; o < spec.octaves; ++o) {
        const std::uint64_t salt = splitmix64(spec.seed ^ splitmix64(static_cast<std::uint64_t>(channel) * 64 + o));
        sum += amp * gradient_noise(salt, x * freq, y * freq);
        amp *= spec.persistence;
        freq *= 2.0;
    }
    return sum;
}

Image gen_perlin(const PerlinSpec& spec, int size) {
    validate(spec);
    if (size < 1) throw Error(ErrorCode::invalid_argument, "size must be positive");
    Image out(size, size, 3);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = static_cast<float>(perlin_value(spec, c, x, y));
    const auto [lo_it, hi_it] = std::minmax_element(out.pixels.begin(), out.pixels.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) {
        std::fill(out.pixels.begin(), out.pixels.end(), 0.0f);
        return out;
    }
    for (float& v : out.pixels) v = std::clamp(static_cast<float>((v - lo) / (hi - lo)), 0.0f, 1.0f);
    return out;
}

// ---------------------------------------------------------------------------
// Procedural fixtures

Image gen_pattern(PatternKind kind, int size, std::uint64_t seed) {
    if (size < 16) throw Error(ErrorCode::invalid_argument, "pattern size must be >= 16");
    Image out(size, size, 3);
    switch (kind) {
        case PatternKind::checker:
            for (int y = 0; y < size; ++y)
                for (int x = 0; x < size; ++x) {
                    const float v = ((x / kCheckerCell + y / kCheckerCell) % 2 == 0) ? 1.0f : 0.0f;
                    for (int c = 0; c < 3; ++c) out.at(x, y, c) = v;
                }
            break;
        case PatternKind::radial_gradient: {
            const int cx = size / 2, cy = size / 2;
            const double dmax = std::hypot(std::max(cx, size - 1 - cx), std::max(cy, size - 1 - cy));
            for (int y = 0; y < size; ++y)
                for (int x = 0; x < size; ++x) {
                    const float v = static_cast<float>(1.0 - std::hypot(x - cx, y - cy) / dmax);
                    for (int c = 0; c < 3; ++c) out.at(x, y, c) = std::clamp(v, 0.0f, 1.0f);
                }
            break;
        }
        case PatternKind::random_blobs: {
            Rng rng(seed);
            struct Blob {
                double x, y, inv2s2;
                double rgb[3];
            };
            std::array<double, 3> bg{};
            for (double& b : bg) b = rng.uniform(0.0, 0.3);
            std::vector<Blob> blobs(12);
            for (Blob& b : blobs) {
                b.x = rng.uniform(0.0, size);
                b.y = rng.uniform(0.0, size);
                const double sigma = rng.uniform(size / 20.0, size / 5.0);
                b.inv2s2 = 1.0 / (2.0 * sigma * sigma);
                for (double& c : b.rgb) c = rng.uniform(-0.6, 0.9);
            }
#pragma omp parallel for schedule(static)
            for (int y = 0; y < size; ++y)
                for (int x = 0; x < size; ++x) {
                    double acc[3] = {bg[0], bg[1], bg[2]};
                    for (const Blob& b : blobs) {
                        const double d2 = (x - b.x) * (x - b.x) + (y - b.y) * (y - b.y);
                        const double g = std::exp(-d2 * b.inv2s2);
                        for (int c = 0; c < 3; ++c) acc[c] += g * b.rgb[c];
                    }
                    for (int c = 0; c < 3; ++c) out.at(x, y, c) = static_cast<float>(std::clamp(acc[c], 0.0, 1.0));
                }
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Named generators

namespace {
constexpr std::string_view kGeneratorNames[] = {"perlin", "fractal", "blobs", "checker", "radial"};
}

std::string_view to_string(Generator g) { return kGeneratorNames[static_cast<int>(g)]; }

Generator parse_generator(std::string_view name) {
    for (int i = 0; i < 5; ++i)
        if (kGeneratorNames[i] == name) return static_cast<Generator>(i);
    throw Error(ErrorCode::invalid_argument, "unknown generator '" + std::string(name) + "'");
}

Image generate_source(Generator g, int size, std::uint64_t seed) {
    Rng rng(seed);
    switch (g) {
        case Generator::perlin: {
            PerlinSpec spec;
            spec.cell = static_cast<int>(rng.uniform_int(std::max(2, size / 16), std::max(2, size / 4)));
            spec.octaves = 4;
            spec.persistence = 0.5;
            spec.seed = rng.next();
            return gen_perlin(spec, size);
        }
        case Generator::fractal: {
            const IfsSystem sys = random_ifs(rng);
            return gen_fractal_ifs(sys, std::max(1000, 2 * size * size), size, rng.next());
        }
        case Generator::blobs:
            return gen_pattern(PatternKind::random_blobs, size, rng.next());
        case Generator::checker:
            return gen_pattern(PatternKind::checker, size, seed);
        case Generator::radial:
            return gen_pattern(PatternKind::radial_gradient, size, seed);
    }
    throw Error(ErrorCode::invalid_argument, "unknown generator");
}

}  // namespace pmv
