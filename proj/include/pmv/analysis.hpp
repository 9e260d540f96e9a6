#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pmv/image.hpp"

namespace pmv {

// Mean absolute pixel difference of each consecutive frame pair.
std::vector<double> gap_differences(const Clip& clip);

// Mean of gap_differences.
double frame_difference(const Clip& clip);

struct TrackParams {
    int patch = 16;
    int radius = 8;
    double tau = 0.005;
    bool operator==(const TrackParams&) const = default;
};

// For every gap and every non-overlapping patch of the earlier frame, the
// minimum mean squared difference against the later frame over integer
// displacements within `radius` (displaced patch fully inside the frame).
// Gap-major, patches row-major.
std::vector<double> min_msd_map(const Clip& clip, int patch, int radius);

// Fraction of (patch, gap) pairs whose minimum MSD is <= tau.
double trackability(const Clip& clip, const TrackParams& params);

struct Partition {
    std::vector<std::size_t> top;     // top 50%
    std::vector<std::size_t> middle;  // 25th to 75th percentile
    std::vector<std::size_t> bottom;  // bottom 50%
};

// Scores are ranked ascending with ties broken by index. With rank r of n:
// bottom 2r < n, top 2r >= n, middle n <= 4r < 3n. Index lists are ascending.
Partition partition_by_difference(std::span<const double> scores);

struct ClipStats {
    double mean_frame_diff = 0.0;
    std::vector<double> gap_diffs;
    double trackability = 0.0;
    bool has_trackability = false;
};

ClipStats compute_stats(const Clip& clip, const TrackParams& params, bool with_trackability = true);

}  // namespace pmv
