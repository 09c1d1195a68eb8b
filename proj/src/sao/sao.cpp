#include "ompc/sao.h"

#include <algorithm>

#include "ompc/errors.h"

namespace ompc::sao {

int
eoCategory(int a, int center, int b)
{
  const int s = (center > a) - (center < a) + (center > b) - (center < b);
  switch (s) {
  case -2: return 1;
  case -1: return 2;
  case 1: return 3;
  case 2: return 4;
  default: return 0;
  }
}

std::array<int, 4>
eoNeighbours(int eoClass)
{
  switch (eoClass) {
  case 0: return {-1, 0, 1, 0};
  case 1: return {0, -1, 0, 1};
  case 2: return {-1, -1, 1, 1};
  case 3: return {1, -1, -1, 1};
  default: throw DomainError("edge offset class out of range");
  }
}

namespace {

  void checkRect(const Plane8& p, Rect r)
  {
    if (r.x < 0 || r.y < 0 || r.x + r.width > p.width() || r.y + r.height > p.height())
      throw DomainError("SAO rectangle outside the picture");
  }

  bool insidePicture(const Plane8& p, int x, int y)
  {
    return x >= 0 && y >= 0 && x < p.width() && y < p.height();
  }

}  // namespace

SaoStats
collectStats(const Plane8& orig, const Plane8& recon, const Mask& mask, Rect rect)
{
  if (!orig.sameSize(recon) || !orig.sameSize(mask))
    throw DomainError("SAO planes differ in size");
  checkRect(recon, rect);

  SaoStats s;
  for (int y = rect.y; y < rect.y + rect.height; y++)
    for (int x = rect.x; x < rect.x + rect.width; x++) {
      if (!mask.at(x, y))
        continue;
      const int v = recon.at(x, y);
      const int diff = int(orig.at(x, y)) - v;
      s.bandSum[size_t(v >> kBandShift)] += diff;
      s.bandCount[size_t(v >> kBandShift)]++;
      for (int c = 0; c < kNumEoClasses; c++) {
        const auto n = eoNeighbours(c);
        if (!insidePicture(recon, x + n[0], y + n[1]) || !insidePicture(recon, x + n[2], y + n[3]))
          continue;
        const int cat = eoCategory(recon.at(x + n[0], y + n[1]), v, recon.at(x + n[2], y + n[3]));
        s.eoSum[size_t(c)][size_t(cat)] += diff;
        s.eoCount[size_t(c)][size_t(cat)]++;
      }
    }
  return s;
}

int
deriveOffset(int64_t sum, int64_t count)
{
  if (count <= 0)
    return 0;
  const int64_t mag = (2 * std::abs(sum) + count) / (2 * count);
  const int64_t o = sum < 0 ? -mag : mag;
  return int(std::clamp<int64_t>(o, -kMaxOffset, kMaxOffset));
}

std::array<int, 4>
edgeOffsets(const SaoStats& stats, int eoClass)
{
  std::array<int, 4> o{};
  for (int cat = 1; cat <= 4; cat++) {
    const int v = deriveOffset(stats.eoSum[size_t(eoClass)][size_t(cat)],
                               stats.eoCount[size_t(eoClass)][size_t(cat)]);
    o[size_t(cat - 1)] = cat <= 2 ? std::max(v, 0) : std::min(v, 0);
  }
  return o;
}

std::array<int, 4>
bandOffsets(const SaoStats& stats, int bandStart)
{
  std::array<int, 4> o{};
  for (int k = 0; k < 4; k++)
    o[size_t(k)] = deriveOffset(stats.bandSum[size_t(bandStart + k)],
                                stats.bandCount[size_t(bandStart + k)]);
  return o;
}

int64_t
distortionDelta(const SaoStats& stats, const SaoParams& params)
{
  int64_t delta = 0;
  for (int k = 0; k < 4; k++) {
    const int64_t o = params.offsets[size_t(k)];
    int64_t sum = 0, count = 0;
    if (params.type == SaoType::Edge) {
      sum = stats.eoSum[size_t(params.eoClass)][size_t(k + 1)];
      count = stats.eoCount[size_t(params.eoClass)][size_t(k + 1)];
    } else if (params.type == SaoType::Band) {
      sum = stats.bandSum[size_t(params.bandStart + k)];
      count = stats.bandCount[size_t(params.bandStart + k)];
    }
    delta += count * o * o - 2 * o * sum;
  }
  return delta;
}

SaoParams
selectSao(const SaoStats& stats, double lambda, const SaoContexts& contexts)
{
  auto cost = [&](const SaoParams& p) {
    SaoContexts scratch = contexts;
    BitCounter counter;
    writeSaoParams(counter, scratch, p);
    return double(distortionDelta(stats, p)) + lambda * fracToBits(counter.fracBits());
  };

  SaoParams best;
  double bestCost = cost(best);
  auto consider = [&](const SaoParams& p) {
    const double c = cost(p);
    if (c < bestCost) {
      bestCost = c;
      best = p;
    }
  };
  for (int c = 0; c < kNumEoClasses; c++)
    consider({SaoType::Edge, c, 0, edgeOffsets(stats, c)});
  for (int b = 0; b < kNumBandStarts; b++)
    consider({SaoType::Band, 0, b, bandOffsets(stats, b)});
  return best;
}

void
applySao(const Plane8& pre, Plane8& out, Rect rect, const SaoParams& params)
{
  if (!pre.sameSize(out))
    throw DomainError("SAO planes differ in size");
  checkRect(pre, rect);
  if (params.type == SaoType::Off)
    return;

  const auto n = params.type == SaoType::Edge ? eoNeighbours(params.eoClass)
                                              : std::array<int, 4>{};
  for (int y = rect.y; y < rect.y + rect.height; y++)
    for (int x = rect.x; x < rect.x + rect.width; x++) {
      const int v = pre.at(x, y);
      int offset = 0;
      if (params.type == SaoType::Band) {
        const int k = (v >> kBandShift) - params.bandStart;
        if (k >= 0 && k < 4)
          offset = params.offsets[size_t(k)];
      } else if (insidePicture(pre, x + n[0], y + n[1]) && insidePicture(pre, x + n[2], y + n[3])) {
        const int cat = eoCategory(pre.at(x + n[0], y + n[1]), v, pre.at(x + n[2], y + n[3]));
        if (cat)
          offset = params.offsets[size_t(cat - 1)];
      }
      out.at(x, y) = uint8_t(std::clamp(v + offset, 0, 255));
    }
}

SaoParams
readSaoParams(RangeDecoder& d, SaoContexts& ctx)
{
  SaoParams p;
  if (!d.decodeBin(ctx.enabled))
    return p;
  const bool band = d.decodeBin(ctx.band);
  if (band) {
    p.type = SaoType::Band;
    p.bandStart = int(d.decodeBypassBits(5));
    if (p.bandStart >= kNumBandStarts)
      throw DecodeError("SAO band start out of range");
  } else {
    p.type = SaoType::Edge;
    p.eoClass = int(d.decodeBypassBits(2));
  }
  for (size_t k = 0; k < 4; k++) {
    int mag = 0;
    while (mag < kMaxOffset && d.decodeBypass())
      mag++;
    int o = mag;
    if (band && mag && d.decodeBypass())
      o = -mag;
    if (!band && k >= 2)
      o = -mag;
    p.offsets[k] = o;
  }
  return p;
}

}  // namespace ompc::sao
