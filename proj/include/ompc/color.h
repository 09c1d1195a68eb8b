#pragma once

#include <array>
#include <cstdint>

#include "ompc/point_cloud.h"

namespace ompc {

// BT.601 full-range conversion with round-half-up and clipping to [0,255].
// Coefficients are applied as exact integer fractions.
std::array<uint8_t, 3> rgbToYcbcr(const Rgb& rgb);
Rgb ycbcrToRgb(uint8_t y, uint8_t cb, uint8_t cr);

}  // namespace ompc
