#include "ompc/codec/rdo.h"

#include <cmath>

#include "ompc/errors.h"

namespace ompc::codec {

double
lambdaForQp(int qp)
{
  return 0.57 * std::pow(2.0, (qp - 12) / 3.0);
}

RdoContext
RdoContext::make(int qp, const Mask* mask, bool maskingEnabled)
{
  RdoContext ctx;
  ctx.qp = qp;
  ctx.lambdaFull = lambdaForQp(qp);
  ctx.lambdaPred = std::sqrt(ctx.lambdaFull);
  ctx.mask = mask;
  ctx.maskingEnabled = maskingEnabled;
  return ctx;
}

//============================================================================

namespace {

  void checkSameSize(const ConstBlock& a, const ConstBlock& b)
  {
    if (a.width != b.width || a.height != b.height)
      throw DomainError("block dimensions differ");
  }

  // In-place unnormalized Walsh-Hadamard transform of n (4 or 8) values.
  void hadamard(int* v, int n, int step)
  {
    for (int len = 1; len < n; len <<= 1)
      for (int i = 0; i < n; i += len << 1)
        for (int j = i; j < i + len; j++) {
          const int a = v[j * step], b = v[(j + len) * step];
          v[j * step] = a + b;
          v[(j + len) * step] = a - b;
        }
  }

  int64_t satdTile(const ConstBlock& a, const ConstBlock& b, int x0, int y0, int n)
  {
    int d[64];
    for (int y = 0; y < n; y++)
      for (int x = 0; x < n; x++)
        d[y * n + x] = int(a.at(x0 + x, y0 + y)) - int(b.at(x0 + x, y0 + y));
    for (int y = 0; y < n; y++)
      hadamard(d + y * n, n, 1);
    for (int x = 0; x < n; x++)
      hadamard(d + x, n, n);
    int64_t sum = 0;
    for (int i = 0; i < n * n; i++)
      sum += std::abs(d[i]);
    return sum / 2;
  }

}  // namespace

int64_t
maskedSsd(ConstBlock orig, ConstBlock recon, ConstBlock mask)
{
  checkSameSize(orig, recon);
  checkSameSize(orig, mask);
  int64_t sum = 0;
  for (int y = 0; y < orig.height; y++) {
    const uint8_t* o = orig.row(y);
    const uint8_t* r = recon.row(y);
    const uint8_t* m = mask.row(y);
    int32_t rowSum = 0;
    for (int x = 0; x < orig.width; x++) {
      const int d = int(o[x]) - int(r[x]);
      rowSum += d * d * int(m[x]);
    }
    sum += rowSum;
  }
  return sum;
}

int64_t
ssd(ConstBlock a, ConstBlock b)
{
  checkSameSize(a, b);
  int64_t sum = 0;
  for (int y = 0; y < a.height; y++) {
    const uint8_t* p = a.row(y);
    const uint8_t* q = b.row(y);
    int32_t rowSum = 0;
    for (int x = 0; x < a.width; x++) {
      const int d = int(p[x]) - int(q[x]);
      rowSum += d * d;
    }
    sum += rowSum;
  }
  return sum;
}

int64_t
sad(ConstBlock a, ConstBlock b)
{
  checkSameSize(a, b);
  int64_t sum = 0;
  for (int y = 0; y < a.height; y++) {
    const uint8_t* p = a.row(y);
    const uint8_t* q = b.row(y);
    int32_t rowSum = 0;
    for (int x = 0; x < a.width; x++)
      rowSum += std::abs(int(p[x]) - int(q[x]));
    sum += rowSum;
  }
  return sum;
}

int64_t
satd(ConstBlock a, ConstBlock b)
{
  checkSameSize(a, b);
  if (a.width != a.height)
    throw DomainError("SATD needs a square block");
  if (a.width == 4)
    return satdTile(a, b, 0, 0, 4);
  if (a.width % 8)
    throw DomainError("SATD block size must be 4 or a multiple of 8");
  int64_t sum = 0;
  for (int y = 0; y < a.height; y += 8)
    for (int x = 0; x < a.width; x += 8)
      sum += satdTile(a, b, x, y, 8);
  return sum;
}

}  // namespace ompc::codec
