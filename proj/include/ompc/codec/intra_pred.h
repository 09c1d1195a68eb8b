#pragma once

#include <array>
#include <cstdint>

#include "ompc/codec/common.h"

namespace ompc::codec {

// 0 planar, 1 DC, 2..9 angular (see kAngularModes in intra_pred.cpp).
constexpr int kNumIntraModes = 10;
constexpr int kIntraPlanar = 0;
constexpr int kIntraDc = 1;
constexpr int kIntraHorizontal = 2;
constexpr int kIntraVertical = 7;

// Neighbouring samples of an NxN block. Index 0 is the top-left corner,
// index i + 1 is sample i of the row above (top) or column to the left.
// Samples N..2N-1 replicate sample N-1; samples outside the picture are 128.
struct IntraReference {
  int size = 0;
  std::array<int, 2 * kCtuSize + 1> top{};
  std::array<int, 2 * kCtuSize + 1> left{};
};

IntraReference buildIntraReference(const Plane8& recon, int x, int y, int size);

void predictIntra(const IntraReference& ref, int mode, MutableBlock out);

}  // namespace ompc::codec
