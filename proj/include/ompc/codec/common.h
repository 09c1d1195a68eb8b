#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdlib>

#include "ompc/image.h"

namespace ompc::codec {

constexpr int kCtuSize = 64;
constexpr int kMinCuSize = 8;
constexpr int kMaxTuSize = 32;
constexpr int kMaxQp = 51;

// Strided view of a rectangular block.
template <typename T>
struct BlockRef {
  T* data = nullptr;
  ptrdiff_t stride = 0;
  int width = 0;
  int height = 0;

  T& at(int x, int y) const { return data[y * stride + x]; }
  T* row(int y) const { return data + y * stride; }
};

using ConstBlock = BlockRef<const uint8_t>;
using MutableBlock = BlockRef<uint8_t>;

inline ConstBlock
blockOf(const Plane8& p, int x, int y, int w, int h)
{
  return {p.data() + ptrdiff_t(y) * p.width() + x, p.width(), w, h};
}

inline MutableBlock
blockOf(Plane8& p, int x, int y, int w, int h)
{
  return {p.data() + ptrdiff_t(y) * p.width() + x, p.width(), w, h};
}

inline ConstBlock
asConst(MutableBlock b)
{
  return {b.data, b.stride, b.width, b.height};
}

// Motion vector in half-sample units.
struct Mv {
  int16_t x = 0;
  int16_t y = 0;

  friend bool operator==(const Mv&, const Mv&) = default;
};

constexpr int kMvRange = 32;  // +/-16 samples

inline int
mvMagnitude(Mv mv)
{
  return std::abs(mv.x) + std::abs(mv.y);
}

inline int
log2Size(int size)
{
  int n = 0;
  while ((1 << n) < size)
    n++;
  return n;
}

}  // namespace ompc::codec
