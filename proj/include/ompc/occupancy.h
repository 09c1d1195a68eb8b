#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ompc/image.h"

namespace ompc {

constexpr int kOccupancyBlock = 4;

// Occupancy at 4x4 block precision, the resolution sent to the decoder.
struct BlockOccupancy {
  int blocksWide = 0;
  int blocksHigh = 0;
  std::vector<uint8_t> blocks;

  uint8_t at(int bx, int by) const { return blocks[size_t(by) * size_t(blocksWide) + size_t(bx)]; }
  uint8_t& at(int bx, int by) { return blocks[size_t(by) * size_t(blocksWide) + size_t(bx)]; }

  friend bool operator==(const BlockOccupancy&, const BlockOccupancy&) = default;
};

// A block is occupied when any of its 16 pixels is.
BlockOccupancy downsampleOccupancy(const Mask& pixels);

Mask upsampleOccupancy(const BlockOccupancy& blocks);

// Payload: u16 blocksWide, u16 blocksHigh (little-endian), then one range-coded
// stream of block flags in raster order. Each flag's context is selected by
// its left and above neighbours (0 outside the map).
std::vector<uint8_t> encodeBlockOccupancy(const BlockOccupancy& blocks);
BlockOccupancy decodeBlockOccupancy(std::span<const uint8_t> payload);

}  // namespace ompc
