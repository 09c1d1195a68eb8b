#include "ompc/codec/syntax.h"

#include <vector>

#include "ompc/errors.h"

namespace ompc::codec {

namespace {

  struct ScanStorage {
    std::vector<uint16_t> order;
    std::vector<uint8_t> posClass;
    ScanTable table;
  };

  ScanStorage makeScan(int log2)
  {
    const int n = 1 << log2;
    ScanStorage s;
    for (int d = 0; d < 2 * n - 1; d++)
      for (int y = std::min(d, n - 1); y >= std::max(0, d - n + 1); y--) {
        const int x = d - y;
        s.order.push_back(uint16_t(y * n + x));
        int cls = 3;
        if (x == 0 && y == 0)
          cls = 0;
        else if (x + y < 3)
          cls = 1;
        else if (x + y < n / 2)
          cls = 2;
        s.posClass.push_back(uint8_t(cls));
      }
    s.table = {s.order, s.posClass};
    return s;
  }

}  // namespace

const ScanTable&
diagonalScan(int log2)
{
  static const std::array<ScanStorage, 4> tables = {makeScan(2), makeScan(3), makeScan(4),
                                                    makeScan(5)};
  if (log2 < 2 || log2 > 5)
    throw DomainError("unsupported scan size");
  return tables[size_t(log2 - 2)].table;
}

//============================================================================

bool
readSplitFlag(RangeDecoder& d, ContextSet& ctx, int depth)
{
  return d.decodeBin(ctx.split[size_t(depth)]);
}

bool
readSkipFlag(RangeDecoder& d, ContextSet& ctx, int neighbours)
{
  return d.decodeBin(ctx.skip[size_t(neighbours)]);
}

int
readMergeIndex(RangeDecoder& d, ContextSet& ctx, int listSize)
{
  int index = 0;
  for (int i = 0; i < listSize - 1; i++) {
    const int bin = i == 0 ? d.decodeBin(ctx.mergeIdx) : d.decodeBypass();
    if (!bin)
      break;
    index++;
  }
  return index;
}

namespace {

  int readMvdComponent(RangeDecoder& d)
  {
    const uint32_t sym = decodeExpGolomb(d, 0);
    if (sym > 4 * uint32_t(kMvRange))
      throw DecodeError("motion vector difference out of range");
    return sym & 1 ? int(sym + 1) / 2 : -int(sym / 2);
  }

}  // namespace

Mv
readMvd(RangeDecoder& d)
{
  Mv mvd;
  mvd.x = int16_t(readMvdComponent(d));
  mvd.y = int16_t(readMvdComponent(d));
  return mvd;
}

int
readIntraMode(RangeDecoder& d, ContextSet& ctx, int mpm)
{
  if (d.decodeBin(ctx.mpm))
    return mpm;
  int v = int(d.decodeBypassBits(3));
  if (v >= 7)
    v = ((v << 1) | d.decodeBypass()) - 7;
  return v < mpm ? v : v + 1;
}

bool
readCbf(RangeDecoder& d, ContextSet& ctx, bool chroma, int tuDepth)
{
  return d.decodeBin(ctx.cbf[size_t(chroma * 2 + tuDepth)]);
}

void
readCoefficients(RangeDecoder& d, ContextSet& ctx, int32_t* levels, int size, bool chroma)
{
  const int log2 = log2Size(size);
  const int sizeClass = log2 - 2;
  const ScanTable& scan = diagonalScan(log2);
  std::fill(levels, levels + size * size, 0);

  const int cMax = 2 * log2;
  ContextModel* lastCtx = &ctx.lastClass[size_t((chroma * 4 + sizeClass) * 11)];
  int cls = 0;
  while (cls < cMax && d.decodeBin(lastCtx[std::min(cls, 10)]))
    cls++;
  int last = 0;
  if (cls == 1)
    last = 1;
  else if (cls > 1)
    last = (1 << (cls - 1)) + int(d.decodeBypassBits(cls - 1));
  if (last >= size * size)
    throw DecodeError("last coefficient position out of range");

  ContextModel* sigCtx = &ctx.sig[size_t((chroma * 4 + sizeClass) * 4)];
  ContextModel* gt1Ctx = &ctx.gt1[size_t(chroma * 4)];
  int numGt1 = 0;
  for (int pos = last; pos >= 0; pos--) {
    if (pos < last && !d.decodeBin(sigCtx[scan.posClass[size_t(pos)]]))
      continue;
    uint32_t mag = 1;
    if (d.decodeBin(gt1Ctx[std::min(numGt1, 3)])) {
      numGt1++;
      const uint32_t rem = decodeExpGolomb(d, 0);
      if (rem > uint32_t(kMaxCoeffLevel))
        throw DecodeError("coefficient level out of range");
      mag = rem + 2;
    }
    const auto level = int32_t(mag);
    levels[scan.order[size_t(pos)]] = d.decodeBypass() ? -level : level;
  }
}

}  // namespace ompc::codec
