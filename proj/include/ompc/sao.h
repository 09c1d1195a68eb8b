#pragma once

#include <array>
#include <cstdint>

#include "ompc/entropy.h"
#include "ompc/image.h"

namespace ompc::sao {

constexpr int kNumEoClasses = 4;  // 0, 90, 135, 45 degrees
constexpr int kNumBands = 32;
constexpr int kBandShift = 3;
constexpr int kNumBandStarts = kNumBands - 3;
constexpr int kMaxOffset = 7;

enum class SaoType : uint8_t { Off, Edge, Band };

struct SaoParams {
  SaoType type = SaoType::Off;
  int eoClass = 0;
  int bandStart = 0;
  std::array<int, 4> offsets{};

  friend bool operator==(const SaoParams&, const SaoParams&) = default;
};

// Sums of (orig - recon) and pixel counts. Edge categories are indexed 1..4
// (slot 0 collects the unmodified pixels and is never used).
struct SaoStats {
  std::array<std::array<int64_t, 5>, kNumEoClasses> eoSum{};
  std::array<std::array<int64_t, 5>, kNumEoClasses> eoCount{};
  std::array<int64_t, kNumBands> bandSum{};
  std::array<int64_t, kNumBands> bandCount{};

  friend bool operator==(const SaoStats&, const SaoStats&) = default;
};

struct SaoContexts {
  ContextModel enabled;
  ContextModel band;
};

struct Rect {
  int x = 0, y = 0, width = 0, height = 0;
};

int eoCategory(int a, int center, int b);

// Neighbour offsets (dx, dy) of the two samples compared for an edge class.
std::array<int, 4> eoNeighbours(int eoClass);

// Only pixels with mask 1 contribute. Edge statistics skip pixels on the
// picture border along the class direction.
SaoStats collectStats(const Plane8& orig, const Plane8& recon, const Mask& mask, Rect rect);

int deriveOffset(int64_t sum, int64_t count);
std::array<int, 4> edgeOffsets(const SaoStats& stats, int eoClass);
std::array<int, 4> bandOffsets(const SaoStats& stats, int bandStart);

// Change in squared error implied by the statistics.
int64_t distortionDelta(const SaoStats& stats, const SaoParams& params);

// Cheapest of off, the four edge classes and every band start, by
// delta + lambda * exact parameter bits under the given context state.
SaoParams selectSao(const SaoStats& stats, double lambda, const SaoContexts& contexts);

// Filters rect of `out` using classification on `pre` (a pre-SAO copy).
void applySao(const Plane8& pre, Plane8& out, Rect rect, const SaoParams& params);

template <typename Coder>
void
writeSaoParams(Coder& c, SaoContexts& ctx, const SaoParams& p)
{
  c.encodeBin(ctx.enabled, p.type != SaoType::Off);
  if (p.type == SaoType::Off)
    return;
  const bool band = p.type == SaoType::Band;
  c.encodeBin(ctx.band, band);
  if (band)
    c.encodeBypassBits(uint32_t(p.bandStart), 5);
  else
    c.encodeBypassBits(uint32_t(p.eoClass), 2);
  for (int o : p.offsets) {
    const int mag = o < 0 ? -o : o;
    for (int i = 0; i < kMaxOffset; i++) {
      c.encodeBypass(i < mag);
      if (i >= mag)
        break;
    }
    if (band && mag)
      c.encodeBypass(o < 0);
  }
}

SaoParams readSaoParams(RangeDecoder& d, SaoContexts& ctx);

}  // namespace ompc::sao
