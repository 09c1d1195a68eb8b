#include "ompc/occupancy.h"

#include <array>

#include "ompc/entropy.h"
#include "ompc/errors.h"

namespace ompc {

BlockOccupancy
downsampleOccupancy(const Mask& pixels)
{
  if (pixels.width() % kOccupancyBlock || pixels.height() % kOccupancyBlock)
    throw DomainError("occupancy dimensions must be multiples of 4");

  BlockOccupancy out;
  out.blocksWide = pixels.width() / kOccupancyBlock;
  out.blocksHigh = pixels.height() / kOccupancyBlock;
  out.blocks.assign(size_t(out.blocksWide) * size_t(out.blocksHigh), 0);
  for (int y = 0; y < pixels.height(); y++)
    for (int x = 0; x < pixels.width(); x++)
      if (pixels.at(x, y))
        out.at(x / kOccupancyBlock, y / kOccupancyBlock) = 1;
  return out;
}

Mask
upsampleOccupancy(const BlockOccupancy& blocks)
{
  Mask out(blocks.blocksWide * kOccupancyBlock, blocks.blocksHigh * kOccupancyBlock, 0);
  for (int y = 0; y < out.height(); y++)
    for (int x = 0; x < out.width(); x++)
      out.at(x, y) = blocks.at(x / kOccupancyBlock, y / kOccupancyBlock) ? 1 : 0;
  return out;
}

//============================================================================

namespace {

  int contextIndex(const BlockOccupancy& b, int bx, int by)
  {
    const int left = bx > 0 ? b.at(bx - 1, by) : 0;
    const int above = by > 0 ? b.at(bx, by - 1) : 0;
    return left + 2 * above;
  }

}  // namespace

std::vector<uint8_t>
encodeBlockOccupancy(const BlockOccupancy& blocks)
{
  if (blocks.blocksWide > 0xFFFF || blocks.blocksHigh > 0xFFFF)
    throw DomainError("block map too large");

  std::array<ContextModel, 4> ctx{};
  RangeEncoder enc;
  for (int by = 0; by < blocks.blocksHigh; by++)
    for (int bx = 0; bx < blocks.blocksWide; bx++)
      enc.encodeBin(ctx[size_t(contextIndex(blocks, bx, by))], blocks.at(bx, by) ? 1 : 0);
  auto body = enc.finish();

  std::vector<uint8_t> out;
  out.reserve(body.size() + 4);
  for (int v : {blocks.blocksWide, blocks.blocksHigh}) {
    out.push_back(uint8_t(v & 0xFF));
    out.push_back(uint8_t(v >> 8));
  }
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

BlockOccupancy
decodeBlockOccupancy(std::span<const uint8_t> payload)
{
  if (payload.size() < 4)
    throw DecodeError("occupancy payload too short");

  BlockOccupancy out;
  out.blocksWide = payload[0] | payload[1] << 8;
  out.blocksHigh = payload[2] | payload[3] << 8;
  out.blocks.assign(size_t(out.blocksWide) * size_t(out.blocksHigh), 0);

  std::array<ContextModel, 4> ctx{};
  RangeDecoder dec(payload.subspan(4));
  for (int by = 0; by < out.blocksHigh; by++)
    for (int bx = 0; bx < out.blocksWide; bx++)
      out.at(bx, by) = uint8_t(dec.decodeBin(ctx[size_t(contextIndex(out, bx, by))]));
  if (!dec.fullyConsumed())
    throw DecodeError("trailing bytes in occupancy payload");
  return out;
}

}  // namespace ompc
