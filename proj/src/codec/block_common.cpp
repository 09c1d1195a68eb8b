#include "block_common.h"

#include <cstring>

#include "ompc/codec/quant.h"
#include "ompc/codec/transform.h"

namespace ompc::codec::detail {

void
reconstructTransformBlock(const int32_t* levels, int size, int qp, ConstBlock pred,
                          MutableBlock out)
{
  const size_t n2 = size_t(size) * size_t(size);
  int32_t coeffs[kMaxTuSize * kMaxTuSize];
  int16_t residual[kMaxTuSize * kMaxTuSize];
  dequantizeBlock({levels, n2}, {coeffs, n2}, qp, transformScaleShift(log2Size(size)));
  inverseTransform({coeffs, n2}, {residual, n2}, size);
  for (int y = 0; y < size; y++)
    for (int x = 0; x < size; x++)
      out.at(x, y) = uint8_t(std::clamp(int(pred.at(x, y)) + residual[y * size + x], 0, 255));
}

void
copyBlock(ConstBlock src, MutableBlock dst)
{
  for (int y = 0; y < src.height; y++)
    std::memcpy(dst.row(y), src.row(y), size_t(src.width));
}

}  // namespace ompc::codec::detail
