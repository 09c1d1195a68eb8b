#include "ompc/codec/intra_pred.h"

#include "ompc/errors.h"

namespace ompc::codec {

namespace {

  struct Angular {
    bool vertical;
    int angle;  // 1/32 sample displacement per row
  };

  // Modes 2..9.
  constexpr Angular kAngularModes[8] = {
    {false, 0}, {false, 13}, {false, -13}, {true, -32},
    {true, -13}, {true, 0}, {true, 13}, {true, 32},
  };

  int inverseAngle(int angle)
  {
    switch (-angle) {
    case 13: return 630;
    case 32: return 256;
    default: return 0;
    }
  }

  void predictAngular(const IntraReference& ref, Angular mode, MutableBlock out)
  {
    const int n = ref.size;
    const auto& mainRef = mode.vertical ? ref.top : ref.left;
    const auto& sideRef = mode.vertical ? ref.left : ref.top;

    // refMain[k] for k in [-n, 2n], stored at offset n.
    int buf[3 * kCtuSize + 1];
    int* refMain = buf + n;
    for (int k = 0; k <= 2 * n; k++)
      refMain[k] = mainRef[size_t(k)];
    if (mode.angle < 0) {
      const int inv = inverseAngle(mode.angle);
      for (int k = (n * mode.angle) >> 5; k < 0; k++)
        refMain[k] = sideRef[size_t((-k * inv + 128) >> 8)];
    }

    for (int j = 0; j < n; j++) {
      const int pos = (j + 1) * mode.angle;
      const int idx = pos >> 5;
      const int fact = pos & 31;
      for (int i = 0; i < n; i++) {
        const int a = refMain[i + idx + 1];
        const int v = fact ? ((32 - fact) * a + fact * refMain[i + idx + 2] + 16) >> 5 : a;
        if (mode.vertical)
          out.at(i, j) = uint8_t(v);
        else
          out.at(j, i) = uint8_t(v);
      }
    }
  }

}  // namespace

IntraReference
buildIntraReference(const Plane8& recon, int x, int y, int size)
{
  IntraReference ref;
  ref.size = size;
  ref.top.fill(128);
  ref.left.fill(128);
  if (x > 0 && y > 0)
    ref.top[0] = ref.left[0] = recon.at(x - 1, y - 1);
  if (y > 0) {
    for (int i = 0; i < size; i++)
      ref.top[size_t(i + 1)] = recon.at(x + i, y - 1);
    for (int i = size; i < 2 * size; i++)
      ref.top[size_t(i + 1)] = ref.top[size_t(size)];
  }
  if (x > 0) {
    for (int i = 0; i < size; i++)
      ref.left[size_t(i + 1)] = recon.at(x - 1, y + i);
    for (int i = size; i < 2 * size; i++)
      ref.left[size_t(i + 1)] = ref.left[size_t(size)];
  }
  return ref;
}

void
predictIntra(const IntraReference& ref, int mode, MutableBlock out)
{
  const int n = ref.size;
  const int shift = log2Size(n) + 1;
  if (mode == kIntraPlanar) {
    const int topRight = ref.top[size_t(n + 1)];
    const int bottomLeft = ref.left[size_t(n + 1)];
    for (int j = 0; j < n; j++)
      for (int i = 0; i < n; i++) {
        const int h = (n - 1 - i) * ref.left[size_t(j + 1)] + (i + 1) * topRight;
        const int v = (n - 1 - j) * ref.top[size_t(i + 1)] + (j + 1) * bottomLeft;
        out.at(i, j) = uint8_t((h + v + n) >> shift);
      }
  } else if (mode == kIntraDc) {
    int sum = n;
    for (int i = 1; i <= n; i++)
      sum += ref.top[size_t(i)] + ref.left[size_t(i)];
    const auto dc = uint8_t(sum >> shift);
    for (int j = 0; j < n; j++)
      for (int i = 0; i < n; i++)
        out.at(i, j) = dc;
  } else if (mode >= 2 && mode < kNumIntraModes) {
    predictAngular(ref, kAngularModes[mode - 2], out);
  } else {
    throw DomainError("intra mode out of range");
  }
}

}  // namespace ompc::codec
