#pragma once

// Pieces shared by the frame encoder and decoder.

#include <cstdint>

#include "ompc/codec/common.h"
#include "ompc/codec/frame.h"
#include "ompc/codec/syntax.h"

namespace ompc::codec::detail {

constexpr int kMaxPlanes = 3;

enum class SliceType : uint8_t { Intra = 0, Inter = 1 };

inline int
tuSizeFor(int cuSize, bool tuSplit)
{
  return std::min(cuSize, kMaxTuSize) >> int(tuSplit);
}

// Offset of transform block `index` (Morton order) inside its CU.
inline void
tuOffset(int index, int tuSize, int& dx, int& dy)
{
  dx = dy = 0;
  for (int b = 0; (index >> (2 * b)) != 0; b++) {
    dx |= ((index >> (2 * b)) & 1) << b;
    dy |= ((index >> (2 * b + 1)) & 1) << b;
  }
  dx *= tuSize;
  dy *= tuSize;
}

// Most probable intra mode: left unit if intra, else above unit if intra,
// else DC.
inline int
mostProbableMode(const MotionField& field, int x, int y)
{
  if (const MotionUnit* l = field.atPixel(x - 1, y); l && !l->inter)
    return l->intraMode;
  if (const MotionUnit* a = field.atPixel(x, y - 1); a && !a->inter)
    return a->intraMode;
  return kIntraDc;
}

inline int
skipContext(const MotionField& field, int x, int y)
{
  const MotionUnit* l = field.atPixel(x - 1, y);
  const MotionUnit* a = field.atPixel(x, y - 1);
  return int(l && l->skip) + int(a && a->skip);
}

// out = clip(pred + inverse(dequant(levels))).
void reconstructTransformBlock(const int32_t* levels, int size, int qp, ConstBlock pred,
                               MutableBlock out);

void copyBlock(ConstBlock src, MutableBlock dst);

}  // namespace ompc::codec::detail
