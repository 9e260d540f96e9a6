#pragma once

#include <filesystem>

#include "pmv/image.hpp"

namespace pmv {

// PNG (any bit depth / color type) and binary PGM/PPM (P5/P6, maxval 255).
// Decoded images always have 3 channels; alpha is composited away.
bool probe_raster(const std::filesystem::path& file);
Image read_raster(const std::filesystem::path& file);

// 8-bit PNG, gray or RGB by channel count; value = round(x * 255).
void write_png(const std::filesystem::path& file, const Image& image);

}  // namespace pmv
