#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pmv/image.hpp"
#include "pmv/rng.hpp"

namespace pmv {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Vec2&) const = default;
};

// ---------------------------------------------------------------------------
// Directory sources
// ---------------------------------------------------------------------------

struct NamedImage {
    std::string name;  // file name relative to the directory
    Image image;
};

// Samples `count` images from `dir` (without replacement while possible, with
// replacement beyond the number of decodable files). Candidates are the sorted
// file names; undecodable files are skipped with a warning on stderr. Every
// selected image is center-cropped to a square and resized to target_size,
// always with 3 channels.
std::vector<NamedImage> load_image_dir_named(const std::filesystem::path& dir, int count,
                                             int target_size, std::uint64_t seed);
std::vector<Image> load_image_dir(const std::filesystem::path& dir, int count, int target_size,
                                  std::uint64_t seed);

// Decodable candidate names of `dir`, sorted.
std::vector<std::string> list_image_files(const std::filesystem::path& dir);

Image load_square_image(const std::filesystem::path& file, int target_size);

// ---------------------------------------------------------------------------
// Iterated function systems
// ---------------------------------------------------------------------------

struct AffineMap2 {
    std::array<double, 4> linear{1, 0, 0, 1};  // row-major 2x2
    Vec2 offset;

    Vec2 apply(Vec2 p) const noexcept {
        return {linear[0] * p.x + linear[1] * p.y + offset.x,
                linear[2] * p.x + linear[3] * p.y + offset.y};
    }
    double spectral_norm() const noexcept;
};

struct IfsSystem {
    std::vector<AffineMap2> maps;
    std::vector<double> weights;
};

// Throws invalid_system if weights are negative, do not sum to 1 (+-1e-9) or any
// map is not a contraction.
void validate(const IfsSystem& system);

// Ball centred at the origin that every orbit started at the origin stays in.
struct Ball {
    Vec2 center;
    double radius = 0.0;
    bool contains(Vec2 p, double slack = 1e-9) const noexcept;
};
Ball invariant_ball(const IfsSystem& system);

// Chaos-game orbit from the origin, first `kDiscard` points dropped.
inline constexpr int kIfsDiscard = 100;
std::vector<Vec2> ifs_orbit(const IfsSystem& system, int iterations, std::uint64_t seed);

// Square world window mapped onto the pixel grid.
struct RenderWindow {
    Vec2 origin;  // world coordinate of the top-left corner of pixel (0,0)
    double extent = 1.0;

    // Pixel containing `p` for a size x size raster; may fall outside the raster.
    std::array<int, 2> pixel_of(Vec2 p, int size) const noexcept;
};
// Bounding square of the points with a small margin.
RenderWindow fit_window(const std::vector<Vec2>& points);

Image rasterize_density(const std::vector<Vec2>& points, const RenderWindow& window, int size);

Image gen_fractal_ifs(const IfsSystem& system, int iterations, int size, std::uint64_t seed);

// Random 2 to 4 map system with contraction factors in [0.3, 0.8].
IfsSystem random_ifs(Rng& rng);

// ---------------------------------------------------------------------------
// Gradient noise
// ---------------------------------------------------------------------------

struct PerlinSpec {
    int cell = 32;
    int octaves = 4;
    double persistence = 0.5;
    std::uint64_t seed = 0;
};

void validate(const PerlinSpec& spec);

// Raw noise of one channel, before normalization. Octave k uses cell/2^k and
// weight persistence^k.
double perlin_value(const PerlinSpec& spec, int channel, double x, double y);

// Three independently seeded channels, min-max normalized over the image.
Image gen_perlin(const PerlinSpec& spec, int size);

// ---------------------------------------------------------------------------
// Procedural fixtures
// ---------------------------------------------------------------------------

enum class PatternKind { checker, radial_gradient, random_blobs };

inline constexpr int kCheckerCell = 16;

Image gen_pattern(PatternKind kind, int size, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Named procedural generators, addressable by (generator, seed)
// ---------------------------------------------------------------------------

enum class Generator { perlin, fractal, blobs, checker, radial };

std::string_view to_string(Generator g);
Generator parse_generator(std::string_view name);

Image generate_source(Generator g, int size, std::uint64_t seed);

}  // namespace pmv
