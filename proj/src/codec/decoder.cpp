#include <array>
#include <vector>

#include "block_common.h"
#include "ompc/codec/encoder.h"
#include "ompc/codec/inter_pred.h"
#include "ompc/codec/intra_pred.h"
#include "ompc/errors.h"
#include "ompc/sao.h"

namespace ompc::codec {

using namespace detail;

namespace {

  class FrameDecoder {
  public:
    FrameDecoder(RangeDecoder& dec, int qp, int numPlanes, int width, int height,
                 const ReferenceFrame* ref)
      : dec_(dec), qp_(qp), numPlanes_(numPlanes), ref_(ref), recon_(numPlanes, width, height),
        motion_(width, height)
    {
      if (ref)
        for (const Plane8& p : ref->recon.planes)
          refPlanes_.emplace_back(p);
    }

    void decodeTree(int x, int y, int size, int depth)
    {
      if (size > kMinCuSize && readSplitFlag(dec_, ctx_, depth)) {
        const int half = size / 2;
        for (int i = 0; i < 4; i++)
          decodeTree(x + (i & 1) * half, y + (i >> 1) * half, half, depth + 1);
        return;
      }
      decodeCu(x, y, size);
    }

    Picture& recon() { return recon_; }
    MotionField& motion() { return motion_; }

  private:
    void decodeCu(int x, int y, int size)
    {
      MotionUnit unit;
      bool skip = false;
      bool intra = true;
      Mv mv;
      int mode = kIntraDc;

      if (ref_) {
        const MergeList merge = buildMergeList(motion_, &ref_->motion, x, y, size);
        skip = readSkipFlag(dec_, ctx_, skipContext(motion_, x, y));
        if (skip) {
          mv = merge.mvs[size_t(readMergeIndex(dec_, ctx_, merge.count))];
          intra = false;
        } else {
          intra = dec_.decodeBin(ctx_.predMode);
          if (!intra) {
            if (dec_.decodeBin(ctx_.mergeFlag)) {
              mv = merge.mvs[size_t(readMergeIndex(dec_, ctx_, merge.count))];
            } else {
              const Mv mvd = readMvd(dec_);
              const Mv pred = merge.mvs[0];
              mv = Mv{int16_t(pred.x + mvd.x), int16_t(pred.y + mvd.y)};
              if (std::abs(mv.x) > kMvRange || std::abs(mv.y) > kMvRange)
                throw DecodeError("motion vector out of range");
            }
          }
        }
      }
      if (intra)
        mode = readIntraMode(dec_, ctx_, mostProbableMode(motion_, x, y));

      for (int p = 0; p < numPlanes_; p++) {
        const MutableBlock pred = blockOf(recon_.planes[size_t(p)], x, y, size, size);
        if (intra)
          predictIntra(buildIntraReference(recon_.planes[size_t(p)], x, y, size), mode, pred);
        else
          motionCompensate(refPlanes_[size_t(p)], x, y, mv, pred);
      }

      if (!skip) {
        const bool tuSplit = dec_.decodeBin(ctx_.tuSplit[size_t(log2Size(size) - 3)]);
        const int tuSize = tuSizeFor(size, tuSplit);
        const int numTus = (size / tuSize) * (size / tuSize);
        std::array<int32_t, kMaxTuSize * kMaxTuSize> levels;
        for (int t = 0; t < numTus; t++) {
          int dx, dy;
          tuOffset(t, tuSize, dx, dy);
          for (int p = 0; p < numPlanes_; p++) {
            if (!readCbf(dec_, ctx_, p > 0, tuSplit))
              continue;
            readCoefficients(dec_, ctx_, levels.data(), tuSize, p > 0);
            const MutableBlock block =
              blockOf(recon_.planes[size_t(p)], x + dx, y + dy, tuSize, tuSize);
            reconstructTransformBlock(levels.data(), tuSize, qp_, asConst(block), block);
          }
        }
      }

      unit.inter = !intra;
      unit.skip = skip;
      unit.mv = intra ? Mv{} : mv;
      unit.intraMode = uint8_t(intra ? mode : kIntraDc);
      motion_.fill(x, y, size, unit);
    }

    RangeDecoder& dec_;
    ContextSet ctx_;
    int qp_;
    int numPlanes_;
    const ReferenceFrame* ref_;
    std::vector<PaddedPlane> refPlanes_;
    Picture recon_;
    MotionField motion_;
  };

}  // namespace

ReferenceFrame
decodeFrame(std::span<const uint8_t> segment, int numPlanes, int width, int height,
            const ReferenceFrame* ref)
{
  if (numPlanes != 1 && numPlanes != 3)
    throw DecodeError("pictures must have 1 or 3 planes");
  if (width <= 0 || height <= 0 || width % kCtuSize || height % kCtuSize)
    throw DecodeError("picture dimensions must be positive multiples of 64");
  if (segment.size() < 3)
    throw DecodeError("frame segment too short");
  const int sliceType = segment[0];
  const int qp = segment[1];
  const int saoFlag = segment[2];
  if (sliceType > 1 || qp > kMaxQp || saoFlag > 1)
    throw DecodeError("invalid frame segment header");
  const bool inter = sliceType == int(SliceType::Inter);
  if (inter && !ref)
    throw DecodeError("inter frame without a reference");
  if (inter
      && (ref->recon.numPlanes() != numPlanes || ref->recon.width() != width
          || ref->recon.height() != height))
    throw DecodeError("reference picture does not match");

  RangeDecoder dec(segment.subspan(3));
  FrameDecoder frame(dec, qp, numPlanes, width, height, inter ? ref : nullptr);
  for (int y = 0; y < height; y += kCtuSize)
    for (int x = 0; x < width; x += kCtuSize)
      frame.decodeTree(x, y, kCtuSize, 0);

  if (saoFlag) {
    sao::SaoContexts ctx;
    Picture& recon = frame.recon();
    const std::vector<Plane8> pre = recon.planes;
    for (int y = 0; y < height; y += kCtuSize)
      for (int x = 0; x < width; x += kCtuSize)
        for (int p = 0; p < numPlanes; p++) {
          const sao::SaoParams params = sao::readSaoParams(dec, ctx);
          sao::applySao(pre[size_t(p)], recon.planes[size_t(p)], {x, y, kCtuSize, kCtuSize},
                        params);
        }
  }
  if (!dec.fullyConsumed())
    throw DecodeError("trailing bytes in frame segment");

  return {std::move(frame.recon()), std::move(frame.motion())};
}

}  // namespace ompc::codec
