#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pmv {

// Row-major, channel-last frame of intensities in [0,1].
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<float> pixels;

    Image() = default;
    Image(int w, int h, int c, float fill = 0.0f);

    std::size_t size() const noexcept { return pixels.size(); }
    std::size_t row_stride() const noexcept { return static_cast<std::size_t>(width) * channels; }
    std::size_t index(int x, int y, int c) const noexcept {
        return (static_cast<std::size_t>(y) * width + x) * channels + c;
    }
    float& at(int x, int y, int c = 0) noexcept { return pixels[index(x, y, c)]; }
    float at(int x, int y, int c = 0) const noexcept { return pixels[index(x, y, c)]; }

    bool same_shape(const Image& other) const noexcept {
        return width == other.width && height == other.height && channels == other.channels;
    }
    bool operator==(const Image& other) const = default;
};

// Throws invalid_argument unless dims are positive, channels is 1 or 3, the buffer
// size matches and every value lies in [0,1].
void validate(const Image& image);

void clamp_unit(std::span<float> values);

// Ordered sequence of equally shaped frames.
struct Clip {
    std::vector<Image> frames;

    int length() const noexcept { return static_cast<int>(frames.size()); }
    int width() const noexcept { return frames.empty() ? 0 : frames.front().width; }
    int height() const noexcept { return frames.empty() ? 0 : frames.front().height; }
    int channels() const noexcept { return frames.empty() ? 0 : frames.front().channels; }
    bool operator==(const Clip& other) const = default;
};

void validate(const Clip& clip);

}  // namespace pmv
