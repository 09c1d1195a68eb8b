#include "ompc/codec/inter_pred.h"

#include <algorithm>
#include <cstring>

#include "ompc/codec/rdo.h"
#include "ompc/entropy.h"
#include "ompc/errors.h"

namespace ompc::codec {

PaddedPlane::PaddedPlane(const Plane8& plane)
  : width_(plane.width()), height_(plane.height()), stride_(plane.width() + 2 * kMargin),
    data_(size_t(stride_) * size_t(plane.height() + 2 * kMargin))
{
  if (plane.empty())
    throw DomainError("empty reference plane");
  for (int y = -kMargin; y < height_ + kMargin; y++) {
    const int sy = std::clamp(y, 0, height_ - 1);
    uint8_t* dst = data_.data() + (y + kMargin) * stride_;
    const uint8_t* src = plane.row(sy).data();
    std::memset(dst, src[0], kMargin);
    std::memcpy(dst + kMargin, src, size_t(width_));
    std::memset(dst + kMargin + width_, src[width_ - 1], kMargin);
  }
}

bool
mvUsable(int x, int y, int w, int h, Mv mv, int frameWidth, int frameHeight)
{
  if (std::abs(mv.x) > kMvRange || std::abs(mv.y) > kMvRange)
    return false;
  const int x0 = x + (mv.x >> 1), y0 = y + (mv.y >> 1);
  const int x1 = x0 + w - 1 + (mv.x & 1), y1 = y0 + h - 1 + (mv.y & 1);
  return x1 >= 0 && y1 >= 0 && x0 < frameWidth && y0 < frameHeight;
}

void
motionCompensate(const PaddedPlane& ref, int x, int y, Mv mv, MutableBlock out)
{
  const int fx = mv.x & 1, fy = mv.y & 1;
  const uint8_t* src = ref.ptr(x + (mv.x >> 1), y + (mv.y >> 1));
  const ptrdiff_t s = ref.stride();
  for (int j = 0; j < out.height; j++) {
    const uint8_t* p = src + j * s;
    uint8_t* d = out.row(j);
    if (!fx && !fy) {
      std::memcpy(d, p, size_t(out.width));
    } else if (fx && !fy) {
      for (int i = 0; i < out.width; i++)
        d[i] = uint8_t((p[i] + p[i + 1] + 1) >> 1);
    } else if (!fx) {
      for (int i = 0; i < out.width; i++)
        d[i] = uint8_t((p[i] + p[i + s] + 1) >> 1);
    } else {
      for (int i = 0; i < out.width; i++)
        d[i] = uint8_t((p[i] + p[i + 1] + p[i + s] + p[i + s + 1] + 2) >> 2);
    }
  }
}

//============================================================================

void
MergeList::push(Mv mv)
{
  if (count == kMaxMergeCandidates)
    return;
  for (int i = 0; i < count; i++)
    if (mvs[size_t(i)] == mv)
      return;
  mvs[size_t(count++)] = mv;
}

MergeList
buildMergeList(const MotionField& current, const MotionField* collocated, int x, int y, int size)
{
  MergeList list;
  auto take = [&](const MotionUnit* u) {
    if (u && u->inter)
      list.push(u->mv);
  };
  take(current.atPixel(x - 1, y));
  take(current.atPixel(x, y - 1));
  if (collocated)
    take(collocated->atPixel(x + size / 2, y + size / 2));
  list.push(Mv{});
  return list;
}

//============================================================================

uint32_t
mvdSymbol(int v)
{
  return v > 0 ? uint32_t(2 * v - 1) : uint32_t(-2 * v);
}

int
mvdBits(Mv mvd)
{
  return expGolombLength(mvdSymbol(mvd.x), 0) + expGolombLength(mvdSymbol(mvd.y), 0);
}

namespace {

  struct SearchBest {
    double cost = 0;
    int magnitude = 0;
    Mv mv;
    bool valid = false;

    // Candidates are offered in raster order, so a later one only wins on
    // strictly lower cost or equal cost with strictly smaller |mv|.
    void offer(double c, Mv candidate)
    {
      const int m = mvMagnitude(candidate);
      if (!valid || c < cost || (c == cost && m < magnitude)) {
        cost = c;
        magnitude = m;
        mv = candidate;
        valid = true;
      }
    }
  };

}  // namespace

Mv
motionSearch(ConstBlock orig, const PaddedPlane& ref, int x, int y, Mv predictor,
             double lambdaPred)
{
  const int w = orig.width, h = orig.height;
  const int range = kMvRange / 2;
  const int cx = predictor.x / 2, cy = predictor.y / 2;
  const int xMin = std::max(cx - range, -range), xMax = std::min(cx + range, range);
  const int yMin = std::max(cy - range, -range), yMax = std::min(cy + range, range);

  SearchBest best;
  for (int iy = yMin; iy <= yMax; iy++)
    for (int ix = xMin; ix <= xMax; ix++) {
      const Mv mv{int16_t(2 * ix), int16_t(2 * iy)};
      if (!mvUsable(x, y, w, h, mv, ref.width(), ref.height()))
        continue;
      const Mv mvd{int16_t(mv.x - predictor.x), int16_t(mv.y - predictor.y)};
      const double cost =
        double(sad(orig, ref.block(x + ix, y + iy, w, h))) + lambdaPred * mvdBits(mvd);
      best.offer(cost, mv);
    }

  const Mv center = best.mv;
  uint8_t buf[kCtuSize * kCtuSize];
  const MutableBlock pred{buf, w, w, h};
  SearchBest refined;
  for (int dy = -1; dy <= 1; dy++)
    for (int dx = -1; dx <= 1; dx++) {
      const Mv mv{int16_t(center.x + dx), int16_t(center.y + dy)};
      if (!mvUsable(x, y, w, h, mv, ref.width(), ref.height()))
        continue;
      motionCompensate(ref, x, y, mv, pred);
      const Mv mvd{int16_t(mv.x - predictor.x), int16_t(mv.y - predictor.y)};
      refined.offer(double(satd(orig, asConst(pred))) + lambdaPred * mvdBits(mvd), mv);
    }
  return refined.mv;
}

}  // namespace ompc::codec
