#include "ompc/codec/quant.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ompc/codec/common.h"
#include "ompc/errors.h"

namespace ompc::codec {

namespace {

  // 64 * 2^(k / 6), k = 0..5
  constexpr int64_t kLevelScale[6] = {40, 45, 51, 57, 64, 72};

  // 64 * Qstep * 2^scaleShift
  int64_t scaledStep(int qp, int scaleShift)
  {
    if (qp < 0 || qp > kMaxQp)
      throw DomainError("qp out of range");
    return (kLevelScale[qp % 6] << (qp / 6)) << scaleShift;
  }

}  // namespace

double
quantStep(int qp)
{
  return double(scaledStep(qp, 0)) / 64.0;
}

int32_t
quantize(int32_t coeff, int qp, bool intra, int scaleShift)
{
  const int64_t denom = scaledStep(qp, scaleShift);
  const int64_t fden = intra ? 3 : 6;
  const int64_t mag = std::abs(int64_t(coeff));
  const int64_t level = (mag * 64 * fden + denom) / (denom * fden);
  return int32_t(coeff < 0 ? -level : level);
}

int32_t
dequantize(int32_t level, int qp, int scaleShift)
{
  const int64_t denom = scaledStep(qp, scaleShift);
  // The clamp only matters for corrupt streams; legal levels stay far below.
  const int64_t mag = std::min<int64_t>((std::abs(int64_t(level)) * denom + 32) >> 6, 1 << 18);
  return int32_t(level < 0 ? -mag : mag);
}

int
quantizeBlock(std::span<const int32_t> coeffs, std::span<int32_t> levels, int qp, bool intra,
              int scaleShift)
{
  if (levels.size() < coeffs.size())
    throw DomainError("level buffer too small");
  int nonZero = 0;
  for (size_t i = 0; i < coeffs.size(); i++) {
    levels[i] = quantize(coeffs[i], qp, intra, scaleShift);
    nonZero += levels[i] != 0;
  }
  return nonZero;
}

void
dequantizeBlock(std::span<const int32_t> levels, std::span<int32_t> coeffs, int qp, int scaleShift)
{
  if (coeffs.size() < levels.size())
    throw DomainError("coefficient buffer too small");
  for (size_t i = 0; i < levels.size(); i++)
    coeffs[i] = dequantize(levels[i], qp, scaleShift);
}

}  // namespace ompc::codec
