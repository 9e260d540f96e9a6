#pragma once

// Serial reference implementations of the parallel kernels. Straight loops, no
// OpenMP, no early exits; used by the parity tests and the benchmarks.

#include <vector>

#include "pmv/analysis.hpp"
#include "pmv/image.hpp"
#include "pmv/transforms.hpp"

namespace pmv::ref {

Image crop_resize(const Image& image, RectF rect, int out_size);
Image warp_affine(const Image& image, const AffineParams& params);
Image warp_perspective(const Image& image, const std::array<Vec2, 4>& corner_offsets);
Image color_jitter(const Image& image, const ColorJitterParams& params);

std::vector<double> gap_differences(const Clip& clip);
std::vector<double> min_msd_map(const Clip& clip, int patch, int radius);
double trackability(const Clip& clip, const TrackParams& params);

}  // namespace pmv::ref
