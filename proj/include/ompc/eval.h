#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ompc/image.h"
#include "ompc/point_cloud.h"

namespace ompc {

// Squared error over mask pixels.
struct OccupiedError {
  double sse = 0;
  int64_t count = 0;

  OccupiedError& operator+=(const OccupiedError& o)
  {
    sse += o.sse;
    count += o.count;
    return *this;
  }
};

OccupiedError occupiedError(const Plane8& orig, const Plane8& recon, const Mask& mask);

// 10*log10(255^2 / MSE) over mask pixels; +infinity when they match.
// Throws DomainError for an empty mask.
double psnrOccupied(const Plane8& orig, const Plane8& recon, const Mask& mask);
double psnrFromError(const OccupiedError& e);

struct RdPoint {
  double bits = 0;
  double quality = 0;
};

// One point per QP. bdRate sorts by bits.
using RdCurve = std::vector<RdPoint>;

// Bjontegaard rate difference in percent: cubic least-squares fit of
// log10(bits) against quality, averaged over the common quality range.
double bdRate(RdCurve anchor, RdCurve test);

enum class SequenceKind { Sphere, Torus, Blobs, Orbit };

SequenceKind parseSequenceKind(const std::string& name);
std::string sequenceKindName(SequenceKind kind);

// Deterministic synthetic content in an 8-bit cube. `points` is the number of
// surface samples per body before voxelization; 0 picks a dense default.
std::vector<PointCloud> generateSequence(SequenceKind kind, int frames, uint64_t seed,
                                         int points = 0);

}  // namespace ompc
