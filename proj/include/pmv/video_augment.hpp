#pragma once

#include "pmv/image.hpp"
#include "pmv/rng.hpp"

namespace pmv {

// Frame-wise lambda * a + (1 - lambda) * b. Exactly symmetric under
// (a, b, lambda) <-> (b, a, 1 - lambda).
Clip mixup_clips(const Clip& a, const Clip& b, double lambda);

// lambda ~ Beta(alpha, alpha).
double sample_mixup_lambda(double alpha, Rng& rng);

struct VideoMixBox {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
    bool operator==(const VideoMixBox&) const = default;
};

// `a` with the box replaced by `b`'s pixels in every frame.
Clip videomix_clips(const Clip& a, const Clip& b, const VideoMixBox& box);

// CutMix-style box: area fraction 1 - lambda with lambda ~ Beta(alpha, alpha),
// at least 1x1, uniformly placed inside the frame.
VideoMixBox sample_videomix_box(int width, int height, double alpha, Rng& rng);

}  // namespace pmv
