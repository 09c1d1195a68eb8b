#include "ompc/codec/transform.h"

#include <algorithm>

#include "ompc/codec/common.h"
#include "ompc/errors.h"

namespace ompc::codec {

namespace {

#include "transform_tables.inc"

  struct Basis {
    const int32_t* forward;
    const int64_t* inverse;
  };

  Basis basisFor(int size)
  {
    switch (size) {
    case 4: return {kForward4, kInverse4};
    case 8: return {kForward8, kInverse8};
    case 16: return {kForward16, kInverse16};
    case 32: return {kForward32, kInverse32};
    default: throw DomainError("unsupported transform size");
    }
  }

  int64_t roundShift(int64_t v, int shift) { return (v + (int64_t(1) << (shift - 1))) >> shift; }

}  // namespace

//============================================================================

void
forwardTransform(std::span<const int16_t> residual, std::span<int32_t> coeffs, int size)
{
  const Basis basis = basisFor(size);
  const size_t n2 = size_t(size) * size_t(size);
  if (residual.size() < n2 || coeffs.size() < n2)
    throw DomainError("transform buffer too small");

  // Columns first (exact in 32 bits), rows in 64 bits, then a single rounding.
  int32_t tmp[kMaxTuSize * kMaxTuSize];
  for (int k = 0; k < size; k++) {
    const int32_t* b = basis.forward + k * size;
    for (int x = 0; x < size; x++) {
      int32_t acc = 0;
      for (int y = 0; y < size; y++)
        acc += b[y] * residual[size_t(y * size + x)];
      tmp[k * size + x] = acc;
    }
  }
  const int shift = 3 + 2 * log2Size(size);
  for (int k = 0; k < size; k++) {
    const int32_t* t = tmp + k * size;
    for (int l = 0; l < size; l++) {
      const int32_t* b = basis.forward + l * size;
      int64_t acc = 0;
      for (int x = 0; x < size; x++)
        acc += int64_t(b[x]) * t[x];
      coeffs[size_t(k * size + l)] = int32_t(roundShift(acc, shift));
    }
  }
}

void
inverseTransform(std::span<const int32_t> coeffs, std::span<int16_t> residual, int size)
{
  const Basis basis = basisFor(size);
  const size_t n2 = size_t(size) * size_t(size);
  if (residual.size() < n2 || coeffs.size() < n2)
    throw DomainError("transform buffer too small");

  // residual = Inv * C * Inv^T, Inv scaled by 2^24.
  int64_t tmp[kMaxTuSize * kMaxTuSize];
  for (int y = 0; y < size; y++) {
    const int64_t* b = basis.inverse + y * size;
    for (int l = 0; l < size; l++) {
      int64_t acc = 0;
      for (int k = 0; k < size; k++)
        acc += b[k] * coeffs[size_t(k * size + l)];
      tmp[y * size + l] = acc;
    }
  }
  const int shift = 2 * kInverseBasisBits - 3 - 2 * log2Size(size);
  for (int y = 0; y < size; y++) {
    const int64_t* t = tmp + y * size;
    for (int x = 0; x < size; x++) {
      const int64_t* b = basis.inverse + x * size;
      int64_t acc = 0;
      for (int l = 0; l < size; l++)
        acc += b[l] * t[l];
      residual[size_t(y * size + x)] = int16_t(std::clamp<int64_t>(roundShift(acc, shift), -32768, 32767));
    }
  }
}

}  // namespace ompc::codec
