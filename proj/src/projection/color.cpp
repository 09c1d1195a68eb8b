#include "ompc/color.h"

#include <algorithm>

namespace ompc {

namespace {

  int64_t floorDiv(int64_t num, int64_t den)
  {
    int64_t q = num / den;
    if ((num % den != 0) && ((num < 0) != (den < 0)))
      q--;
    return q;
  }

  // round(num/den) with halves rounded up, clipped to 8 bits.
  uint8_t roundClip(int64_t num, int64_t den)
  {
    return uint8_t(std::clamp<int64_t>(floorDiv(num + den / 2, den), 0, 255));
  }

}  // namespace

std::array<uint8_t, 3>
rgbToYcbcr(const Rgb& rgb)
{
  const int64_t r = rgb.r, g = rgb.g, b = rgb.b;
  const int64_t y = 299 * r + 587 * g + 114 * b;
  const int64_t cb = 128000000 - 168736 * r - 331264 * g + 500000 * b;
  const int64_t cr = 128000000 + 500000 * r - 418688 * g - 81312 * b;
  return {roundClip(y, 1000), roundClip(cb, 1000000), roundClip(cr, 1000000)};
}

Rgb
ycbcrToRgb(uint8_t y, uint8_t cb, uint8_t cr)
{
  const int64_t yy = y, u = int64_t(cb) - 128, v = int64_t(cr) - 128;
  return {roundClip(yy * 1000 + 1402 * v, 1000),
          roundClip(yy * 1000000 - 344136 * u - 714136 * v, 1000000),
          roundClip(yy * 1000 + 1772 * u, 1000)};
}

}  // namespace ompc
