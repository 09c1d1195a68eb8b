#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <span>

#include "ompc/codec/common.h"
#include "ompc/codec/inter_pred.h"
#include "ompc/codec/intra_pred.h"
#include "ompc/entropy.h"

namespace ompc::codec {

// All adaptive contexts of the block layer. Copying the struct is how the
// encoder snapshots and restores coder state during RDO.
struct ContextSet {
  std::array<ContextModel, 3> split{};     // by depth 0..2
  std::array<ContextModel, 3> skip{};      // by skipped neighbours
  ContextModel mergeIdx;
  ContextModel predMode;
  ContextModel mergeFlag;
  ContextModel mpm;
  std::array<ContextModel, 4> tuSplit{};   // by log2(cu size) - 3
  std::array<ContextModel, 4> cbf{};       // chroma * 2 + tu depth
  std::array<ContextModel, 2 * 4 * 11> lastClass{};
  std::array<ContextModel, 2 * 4 * 4> sig{};
  std::array<ContextModel, 2 * 4> gt1{};

  friend bool operator==(const ContextSet&, const ContextSet&) = default;
};

// Up-right diagonal scan: scan position -> raster index, and the
// significance position class of each scan position.
struct ScanTable {
  std::span<const uint16_t> order;
  std::span<const uint8_t> posClass;
};
const ScanTable& diagonalScan(int log2Size);

constexpr int kMaxCoeffLevel = 1 << 16;

//============================================================================
// Writers, shared by RangeEncoder and BitCounter.

template <typename Coder>
void
writeSplitFlag(Coder& c, ContextSet& ctx, int depth, bool split)
{
  c.encodeBin(ctx.split[size_t(depth)], split);
}

template <typename Coder>
void
writeSkipFlag(Coder& c, ContextSet& ctx, int neighbours, bool skip)
{
  c.encodeBin(ctx.skip[size_t(neighbours)], skip);
}

template <typename Coder>
void
writeMergeIndex(Coder& c, ContextSet& ctx, int index, int listSize)
{
  const int cMax = listSize - 1;
  for (int i = 0; i < cMax; i++) {
    const int bin = i < index;
    if (i == 0)
      c.encodeBin(ctx.mergeIdx, bin);
    else
      c.encodeBypass(bin);
    if (!bin)
      break;
  }
}

template <typename Coder>
void
writeMvd(Coder& c, Mv mvd)
{
  encodeExpGolomb(c, mvdSymbol(mvd.x), 0);
  encodeExpGolomb(c, mvdSymbol(mvd.y), 0);
}

template <typename Coder>
void
writeIntraMode(Coder& c, ContextSet& ctx, int mode, int mpm)
{
  c.encodeBin(ctx.mpm, mode == mpm);
  if (mode == mpm)
    return;
  const int v = mode < mpm ? mode : mode - 1;
  if (v < 7)
    c.encodeBypassBits(uint32_t(v), 3);
  else
    c.encodeBypassBits(uint32_t(v + 7), 4);
}

template <typename Coder>
void
writeCbf(Coder& c, ContextSet& ctx, bool chroma, int tuDepth, bool cbf)
{
  c.encodeBin(ctx.cbf[size_t(chroma * 2 + tuDepth)], cbf);
}

inline int
lastPositionClass(int last)
{
  int cls = 0;
  while ((1 << cls) <= last)
    cls++;
  return cls;
}

// levels: raster order, size x size, at least one non-zero.
template <typename Coder>
void
writeCoefficients(Coder& c, ContextSet& ctx, const int32_t* levels, int size, bool chroma)
{
  const int log2 = log2Size(size);
  const int sizeClass = log2 - 2;
  const ScanTable& scan = diagonalScan(log2);

  int last = size * size - 1;
  while (levels[scan.order[size_t(last)]] == 0)
    last--;

  const int cls = lastPositionClass(last);
  const int cMax = 2 * log2;
  ContextModel* lastCtx = &ctx.lastClass[size_t((chroma * 4 + sizeClass) * 11)];
  for (int i = 0; i < cMax; i++) {
    const int bin = i < cls;
    c.encodeBin(lastCtx[std::min(i, 10)], bin);
    if (!bin)
      break;
  }
  if (cls > 1)
    c.encodeBypassBits(uint32_t(last - (1 << (cls - 1))), cls - 1);

  ContextModel* sigCtx = &ctx.sig[size_t((chroma * 4 + sizeClass) * 4)];
  ContextModel* gt1Ctx = &ctx.gt1[size_t(chroma * 4)];
  int numGt1 = 0;
  for (int pos = last; pos >= 0; pos--) {
    const int32_t level = levels[scan.order[size_t(pos)]];
    if (pos < last)
      c.encodeBin(sigCtx[scan.posClass[size_t(pos)]], level != 0);
    if (!level)
      continue;
    const uint32_t mag = uint32_t(std::abs(level));
    c.encodeBin(gt1Ctx[std::min(numGt1, 3)], mag > 1);
    if (mag > 1) {
      numGt1++;
      encodeExpGolomb(c, mag - 2, 0);
    }
    c.encodeBypass(level < 0);
  }
}

//============================================================================
// Readers. Each validates what it decodes and throws DecodeError.

bool readSplitFlag(RangeDecoder& d, ContextSet& ctx, int depth);
bool readSkipFlag(RangeDecoder& d, ContextSet& ctx, int neighbours);
int readMergeIndex(RangeDecoder& d, ContextSet& ctx, int listSize);
Mv readMvd(RangeDecoder& d);
int readIntraMode(RangeDecoder& d, ContextSet& ctx, int mpm);
bool readCbf(RangeDecoder& d, ContextSet& ctx, bool chroma, int tuDepth);
void readCoefficients(RangeDecoder& d, ContextSet& ctx, int32_t* levels, int size, bool chroma);

}  // namespace ompc::codec
