#pragma once

#include <array>

#include "ompc/codec/common.h"
#include "ompc/codec/frame.h"

namespace ompc::codec {

// Copy of a plane with replicated borders, so that motion compensation with
// clamped coordinates is a plain strided read.
class PaddedPlane {
public:
  static constexpr int kMargin = 24;

  PaddedPlane() = default;
  explicit PaddedPlane(const Plane8& plane);

  int width() const { return width_; }
  int height() const { return height_; }
  ptrdiff_t stride() const { return stride_; }
  const uint8_t* ptr(int x, int y) const
  {
    return data_.data() + (y + kMargin) * stride_ + (x + kMargin);
  }
  ConstBlock block(int x, int y, int w, int h) const { return {ptr(x, y), stride_, w, h}; }

private:
  int width_ = 0;
  int height_ = 0;
  ptrdiff_t stride_ = 0;
  std::vector<uint8_t> data_;
};

// False when |mv| exceeds the legal range or the displaced block (including
// the extra interpolation sample) lies entirely outside the picture.
bool mvUsable(int x, int y, int w, int h, Mv mv, int frameWidth, int frameHeight);

// Bilinear half-sample interpolation.
void motionCompensate(const PaddedPlane& ref, int x, int y, Mv mv, MutableBlock out);

constexpr int kMaxMergeCandidates = 4;

struct MergeList {
  std::array<Mv, kMaxMergeCandidates> mvs{};
  int count = 0;

  void push(Mv mv);
};

// Left (x-1, y), above (x, y-1), collocated unit at the block centre in the
// reference motion field, then zero; inter units only, duplicates dropped.
MergeList buildMergeList(const MotionField& current, const MotionField* collocated, int x, int y,
                         int size);

// Bits of a motion vector difference: signed exp-Golomb order 0 per component.
uint32_t mvdSymbol(int v);
int mvdBits(Mv mvd);

// Integer full search around the predictor followed by half-sample
// refinement; both stages unmasked. Returns a usable vector.
Mv motionSearch(ConstBlock orig, const PaddedPlane& ref, int x, int y, Mv predictor,
                double lambdaPred);

}  // namespace ompc::codec
