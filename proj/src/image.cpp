#include "pmv/image.hpp"

#include <algorithm>
#include <string>

#include "pmv/error.hpp"

namespace pmv {

Image::Image(int w, int h, int c, float fill)
    : width(w), height(h), channels(c) {
    if (w <= 0 || h <= 0 || (c != 1 && c != 3))
        throw Error(ErrorCode::invalid_argument,
                    "image dims " + std::to_string(w) + "x" + std::to_string(h) + "x" +
                        std::to_string(c));
    pixels.assign(static_cast<std::size_t>(w) * h * c, fill);
}

void validate(const Image& image) {
    if (image.width <= 0 || image.height <= 0 || (image.channels != 1 && image.channels != 3))
        throw Error(ErrorCode::invalid_argument, "bad image dims");
    if (image.pixels.size() != static_cast<std::size_t>(image.width) * image.height * image.channels)
        throw Error(ErrorCode::invalid_argument, "pixel buffer size does not match dims");
    for (float v : image.pixels)
        if (!(v >= 0.0f && v <= 1.0f))
            throw Error(ErrorCode::invalid_argument, "pixel value outside [0,1]");
}

void clamp_unit(std::span<float> values) {
    for (float& v : values) v = std::clamp(v, 0.0f, 1.0f);
}

void validate(const Clip& clip) {
    if (clip.frames.size() < 2) throw Error(ErrorCode::invalid_argument, "clip needs at least 2 frames");
    for (const Image& f : clip.frames) {
        validate(f);
        if (!f.same_shape(clip.frames.front()))
            throw Error(ErrorCode::shape_mismatch, "clip frames differ in shape");
    }
}

}  // namespace pmv
