#pragma once

#include <cstdint>

#include "ompc/codec/common.h"

namespace ompc::codec {

// Lagrangian setup for one frame. The mask is the block-precision occupancy
// upsampled to pixels; when masking is disabled distortion is unmasked.
struct RdoContext {
  int qp = 32;
  double lambdaFull = 0;
  double lambdaPred = 0;
  const Mask* mask = nullptr;
  bool maskingEnabled = false;

  static RdoContext make(int qp, const Mask* mask, bool maskingEnabled);
};

// 0.57 * 2^((qp - 12) / 3)
double lambdaForQp(int qp);

// Sum of (orig - recon)^2 * mask. Throws DomainError on size mismatch.
int64_t maskedSsd(ConstBlock orig, ConstBlock recon, ConstBlock mask);
int64_t ssd(ConstBlock a, ConstBlock b);

// J = D + lambda * R
inline double
rdCost(double distortion, double bits, double lambda)
{
  return distortion + lambda * bits;
}

int64_t sad(ConstBlock a, ConstBlock b);

// Hadamard SATD: square blocks of size 4 use a 4x4 transform, larger blocks
// are tiled by 8x8. Each tile contributes sum|coef| / 2.
int64_t satd(ConstBlock a, ConstBlock b);

}  // namespace ompc::codec
