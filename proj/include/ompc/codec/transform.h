#pragma once

#include <cstdint>
#include <span>

namespace ompc::codec {

// Separable integer DCT-II for sizes 4..32. Coefficients are scaled to
// 512/N times the orthonormal transform and kept in 32 bits; the inverse uses
// the exact inverse of the rounded forward basis, so residuals in
// [-255, 255] survive a forward/inverse round trip unchanged.
void forwardTransform(std::span<const int16_t> residual, std::span<int32_t> coeffs, int size);
void inverseTransform(std::span<const int32_t> coeffs, std::span<int16_t> residual, int size);

// log2 of the coefficient scale relative to the orthonormal transform.
inline int transformScaleShift(int log2Size) { return 9 - log2Size; }

}  // namespace ompc::codec
