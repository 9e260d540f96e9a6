#pragma once

#include <cmath>
#include <cstdint>

namespace pmv {

inline std::uint8_t quantize_u8(float x) noexcept {
    const double v = std::floor(static_cast<double>(x) * 255.0 + 0.5);
    return static_cast<std::uint8_t>(v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v));
}

inline float dequantize_u8(std::uint8_t q) noexcept { return static_cast<float>(q) / 255.0f; }

}  // namespace pmv
