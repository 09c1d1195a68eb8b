#include "ompc/codec/encoder.h"

#include <algorithm>
#include <array>
#include <memory>
#include <utility>

#include "block_common.h"
#include "ompc/codec/inter_pred.h"
#include "ompc/codec/intra_pred.h"
#include "ompc/codec/quant.h"
#include "ompc/codec/rdo.h"
#include "ompc/codec/syntax.h"
#include "ompc/codec/transform.h"
#include "ompc/errors.h"

namespace ompc::codec {

using namespace detail;

namespace {

  constexpr int kRoughIntraCandidates = 3;

  struct CuBuffers {
    std::array<std::array<uint8_t, kCtuSize * kCtuSize>, kMaxPlanes> planes;

    MutableBlock block(int p, int size) { return {planes[size_t(p)].data(), size, size, size}; }
    ConstBlock block(int p, int size) const
    {
      return {planes[size_t(p)].data(), size, size, size};
    }
  };

  struct ResidualData {
    bool tuSplit = false;
    std::vector<int32_t> levels;  // [tu][plane][tuSize^2]
    std::vector<uint8_t> cbf;     // [tu][plane]
  };

  struct CuDecision {
    int x = 0, y = 0, size = 0;
    CuMode mode = CuMode::Intra;
    int mergeIndex = 0;
    int mergeListSize = 1;
    int skipCtx = 0;
    Mv mv;
    Mv mvd;
    int intraMode = kIntraDc;
    int mpm = kIntraDc;
    ResidualData residual;
    uint64_t fracBits = 0;
    int64_t distortion = 0;
  };

  struct CtuDecision {
    std::vector<uint8_t> splits;  // pre-order, CUs larger than 8 only
    std::vector<CuDecision> cus;
  };

  struct RdCost {
    int64_t dist = 0;
    uint64_t frac = 0;
  };

  //==========================================================================

  template <typename Coder>
  void writeCuHeader(Coder& c, ContextSet& ctx, const CuDecision& cu, bool inter)
  {
    if (inter) {
      writeSkipFlag(c, ctx, cu.skipCtx, cu.mode == CuMode::Skip);
      if (cu.mode == CuMode::Skip) {
        writeMergeIndex(c, ctx, cu.mergeIndex, cu.mergeListSize);
        return;
      }
      c.encodeBin(ctx.predMode, cu.mode == CuMode::Intra);
      if (cu.mode != CuMode::Intra) {
        c.encodeBin(ctx.mergeFlag, cu.mode == CuMode::Merge);
        if (cu.mode == CuMode::Merge)
          writeMergeIndex(c, ctx, cu.mergeIndex, cu.mergeListSize);
        else
          writeMvd(c, cu.mvd);
        return;
      }
    }
    writeIntraMode(c, ctx, cu.intraMode, cu.mpm);
  }

  template <typename Coder>
  void writeResidual(Coder& c, ContextSet& ctx, const CuDecision& cu, int numPlanes)
  {
    const ResidualData& r = cu.residual;
    c.encodeBin(ctx.tuSplit[size_t(log2Size(cu.size) - 3)], r.tuSplit);
    const int tuSize = tuSizeFor(cu.size, r.tuSplit);
    const int numTus = (cu.size / tuSize) * (cu.size / tuSize);
    const size_t n2 = size_t(tuSize) * size_t(tuSize);
    for (int t = 0; t < numTus; t++)
      for (int p = 0; p < numPlanes; p++) {
        const size_t slot = size_t(t * numPlanes + p);
        writeCbf(c, ctx, p > 0, r.tuSplit, r.cbf[slot]);
        if (r.cbf[slot])
          writeCoefficients(c, ctx, r.levels.data() + slot * n2, tuSize, p > 0);
      }
  }

  //==========================================================================

  struct Evaluated {
    CuDecision decision;
    ContextSet ctx;
    CuBuffers recon;
  };

  class FrameEncoder {
  public:
    FrameEncoder(const Picture& orig, const EncoderConfig& config, const Mask& occupancy,
                 const ReferenceFrame* ref, RdoTrace* trace)
      : orig_(orig), config_(config), ref_(ref), trace_(trace), numPlanes_(orig.numPlanes()),
        width_(orig.width()), height_(orig.height())
    {
      if (numPlanes_ != 1 && numPlanes_ != 3)
        throw DomainError("pictures must have 1 or 3 planes");
      if (width_ <= 0 || height_ <= 0 || width_ % kCtuSize || height_ % kCtuSize)
        throw DomainError("picture dimensions must be positive multiples of 64");
      if (config.qp < 0 || config.qp > kMaxQp)
        throw DomainError("qp out of range");
      if (ref) {
        if (ref->recon.numPlanes() != numPlanes_ || ref->recon.width() != width_
            || ref->recon.height() != height_)
          throw DomainError("reference picture does not match");
        for (const Plane8& p : ref->recon.planes)
          refPlanes_.emplace_back(p);
      }
      // With masking off the effective mask is all ones, which makes the two
      // arms share every arithmetic step.
      if (config.masking) {
        if (occupancy.width() != width_ || occupancy.height() != height_)
          throw DomainError("occupancy mask does not match the picture");
        mask_ = occupancy;
      } else {
        mask_ = Mask(width_, height_, 1);
      }
      rdo_ = RdoContext::make(config.qp, &mask_, config.masking);
      recon_ = Picture(numPlanes_, width_, height_);
      motion_ = MotionField(width_, height_);
    }

    EncodedFrame run();

  private:
    RdCost compressCu(int x, int y, int size, int depth, CtuDecision& out);
    Evaluated evaluateCu(int x, int y, int size, const ContextSet& start);
    bool tryCandidate(CuDecision cu, const CuBuffers& pred, const ContextSet& start,
                      Evaluated& best, double& bestCost, bool haveBest);
    void evaluateResidual(const CuDecision& cu, const CuBuffers& pred, ContextSet& ctx,
                          ResidualData& data, CuBuffers& recon, RdCost& cost);
    void predictIntraCu(int x, int y, int size, int mode, CuBuffers& pred) const;
    std::vector<int> roughIntraModes(int x, int y, int size, const ContextSet& start, int mpm);
    void commitCtu(RangeEncoder& enc, ContextSet& ctx, const CtuDecision& ctu);

    int64_t distortion(int p, int x, int y, ConstBlock candidate) const
    {
      return maskedSsd(blockOf(orig_.planes[size_t(p)], x, y, candidate.width, candidate.height),
                       candidate,
                       blockOf(mask_, x, y, candidate.width, candidate.height));
    }
    double cost(const RdCost& c) const
    {
      return rdCost(double(c.dist), fracToBits(c.frac), rdo_.lambdaFull);
    }

    const Picture& orig_;
    EncoderConfig config_;
    const ReferenceFrame* ref_;
    RdoTrace* trace_;
    int numPlanes_;
    int width_;
    int height_;
    std::vector<PaddedPlane> refPlanes_;
    Mask mask_;
    RdoContext rdo_;
    Picture recon_;
    MotionField motion_;
    ContextSet ctx_;
    FrameEncodeStats stats_;
  };

  //==========================================================================

  void FrameEncoder::predictIntraCu(int x, int y, int size, int mode, CuBuffers& pred) const
  {
    for (int p = 0; p < numPlanes_; p++) {
      const IntraReference ref = buildIntraReference(recon_.planes[size_t(p)], x, y, size);
      predictIntra(ref, mode, pred.block(p, size));
    }
  }

  std::vector<int>
  FrameEncoder::roughIntraModes(int x, int y, int size, const ContextSet& start, int mpm)
  {
    const IntraReference ref = buildIntraReference(recon_.planes[0], x, y, size);
    const ConstBlock orig = blockOf(orig_.planes[0], x, y, size, size);
    std::array<uint8_t, kCtuSize * kCtuSize> buf;
    const MutableBlock pred{buf.data(), size, size, size};

    std::array<double, kNumIntraModes> costs;
    std::array<int, kNumIntraModes> order;
    for (int m = 0; m < kNumIntraModes; m++) {
      predictIntra(ref, m, pred);
      ContextSet scratch = start;
      BitCounter bits;
      writeIntraMode(bits, scratch, m, mpm);
      costs[size_t(m)] = double(satd(orig, asConst(pred)))
                         + rdo_.lambdaPred * fracToBits(bits.fracBits());
      order[size_t(m)] = m;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return costs[size_t(a)] < costs[size_t(b)]; });
    std::vector<int> top(order.begin(), order.begin() + kRoughIntraCandidates);
    if (trace_)
      trace_->roughIntra.push_back(top);
    return top;
  }

  void FrameEncoder::evaluateResidual(const CuDecision& cu, const CuBuffers& pred,
                                      ContextSet& ctx, ResidualData& data, CuBuffers& recon,
                                      RdCost& total)
  {
    const bool intra = cu.mode == CuMode::Intra;
    const ContextSet start = ctx;
    double bestCost = 0;
    bool haveBest = false;

    for (int split = 0; split <= 1; split++) {
      ContextSet c = start;
      BitCounter bits;
      bits.encodeBin(c.tuSplit[size_t(log2Size(cu.size) - 3)], split);
      ResidualData cand;
      CuBuffers candRecon;
      RdCost candCost;

      cand.tuSplit = split;
      const int tuSize = tuSizeFor(cu.size, split);
      const int log2 = log2Size(tuSize);
      const int numTus = (cu.size / tuSize) * (cu.size / tuSize);
      const size_t n2 = size_t(tuSize) * size_t(tuSize);
      cand.levels.assign(size_t(numTus * numPlanes_) * n2, 0);
      cand.cbf.assign(size_t(numTus * numPlanes_), 0);

      int16_t residual[kMaxTuSize * kMaxTuSize];
      int32_t coeffs[kMaxTuSize * kMaxTuSize];
      for (int t = 0; t < numTus; t++) {
        int dx, dy;
        tuOffset(t, tuSize, dx, dy);
        const int px = cu.x + dx, py = cu.y + dy;
        for (int p = 0; p < numPlanes_; p++) {
          const size_t slot = size_t(t * numPlanes_ + p);
          const bool chroma = p > 0;
          const ConstBlock predTu = {pred.planes[size_t(p)].data() + dy * cu.size + dx, cu.size,
                                     tuSize, tuSize};
          const MutableBlock reconTu = {candRecon.planes[size_t(p)].data() + dy * cu.size + dx,
                                        cu.size, tuSize, tuSize};
          const ConstBlock origTu = blockOf(orig_.planes[size_t(p)], px, py, tuSize, tuSize);
          for (int j = 0; j < tuSize; j++)
            for (int i = 0; i < tuSize; i++)
              residual[j * tuSize + i] = int16_t(int(origTu.at(i, j)) - int(predTu.at(i, j)));
          forwardTransform({residual, n2}, {coeffs, n2}, tuSize);
          int32_t* levels = cand.levels.data() + slot * n2;
          const int nonZero = quantizeBlock({coeffs, n2}, {levels, n2}, rdo_.qp, intra,
                                            transformScaleShift(log2));

          ContextSet zeroCtx = c;
          BitCounter zeroBits;
          writeCbf(zeroBits, zeroCtx, chroma, split, false);
          const int64_t zeroDist = distortion(p, px, py, predTu);
          const double zeroCost =
            rdCost(double(zeroDist), fracToBits(zeroBits.fracBits()), rdo_.lambdaFull);

          bool coded = false;
          if (nonZero) {
            ContextSet codedCtx = c;
            BitCounter codedBits;
            writeCbf(codedBits, codedCtx, chroma, split, true);
            writeCoefficients(codedBits, codedCtx, levels, tuSize, chroma);
            reconstructTransformBlock(levels, tuSize, rdo_.qp, predTu, reconTu);
            const int64_t codedDist = distortion(p, px, py, asConst(reconTu));
            const double codedCost =
              rdCost(double(codedDist), fracToBits(codedBits.fracBits()), rdo_.lambdaFull);
            if (codedCost < zeroCost) {
              coded = true;
              c = codedCtx;
              candCost.dist += codedDist;
              candCost.frac += codedBits.fracBits();
            }
          }
          if (!coded) {
            std::fill(levels, levels + n2, 0);
            copyBlock(predTu, reconTu);
            c = zeroCtx;
            candCost.dist += zeroDist;
            candCost.frac += zeroBits.fracBits();
          }
          cand.cbf[slot] = coded;
        }
      }
      candCost.frac += bits.fracBits();
      const double j = cost(candCost);
      if (!haveBest || j < bestCost) {
        haveBest = true;
        bestCost = j;
        data = std::move(cand);
        recon = candRecon;
        ctx = c;
        total = candCost;
      }
    }
  }

  bool FrameEncoder::tryCandidate(CuDecision cu, const CuBuffers& pred, const ContextSet& start,
                                  Evaluated& best, double& bestCost, bool haveBest)
  {
    const bool inter = ref_ != nullptr;
    ContextSet c = start;
    BitCounter header;
    writeCuHeader(header, c, cu, inter);

    RdCost total;
    auto candRecon = std::make_unique<CuBuffers>();
    if (cu.mode == CuMode::Skip) {
      for (int p = 0; p < numPlanes_; p++)
        total.dist += distortion(p, cu.x, cu.y, pred.block(p, cu.size));
      *candRecon = pred;
    } else {
      evaluateResidual(cu, pred, c, cu.residual, *candRecon, total);
    }
    total.frac += header.fracBits();
    const double j = cost(total);
    cu.fracBits = total.frac;
    cu.distortion = total.dist;

    if (trace_) {
      int index = 0;
      if (cu.mode == CuMode::Skip || cu.mode == CuMode::Merge)
        index = cu.mergeIndex;
      else if (cu.mode == CuMode::Intra)
        index = cu.intraMode;
      trace_->candidates.push_back({cu.x, cu.y, cu.size, cu.mode, index, total.frac, total.dist, j});
    }

    if (haveBest && !(j < bestCost))
      return false;
    bestCost = j;
    best.decision = std::move(cu);
    best.ctx = c;
    best.recon = *candRecon;
    return true;
  }

  Evaluated FrameEncoder::evaluateCu(int x, int y, int size, const ContextSet& start)
  {
    Evaluated best;
    double bestCost = 0;
    bool haveBest = false;
    auto pred = std::make_unique<CuBuffers>();

    CuDecision base;
    base.x = x;
    base.y = y;
    base.size = size;
    base.mpm = mostProbableMode(motion_, x, y);

    if (ref_) {
      base.skipCtx = skipContext(motion_, x, y);
      const MergeList merge = buildMergeList(motion_, &ref_->motion, x, y, size);
      base.mergeListSize = merge.count;

      for (int i = 0; i < merge.count; i++) {
        const Mv mv = merge.mvs[size_t(i)];
        if (!mvUsable(x, y, size, size, mv, width_, height_))
          continue;
        for (int p = 0; p < numPlanes_; p++)
          motionCompensate(refPlanes_[size_t(p)], x, y, mv, pred->block(p, size));
        for (CuMode mode : {CuMode::Skip, CuMode::Merge}) {
          CuDecision cu = base;
          cu.mode = mode;
          cu.mergeIndex = i;
          cu.mv = mv;
          haveBest |= tryCandidate(std::move(cu), *pred, start, best, bestCost, haveBest);
        }
      }

      const Mv predictor = merge.mvs[0];
      const Mv mv = motionSearch(blockOf(orig_.planes[0], x, y, size, size), refPlanes_[0], x, y,
                                 predictor, rdo_.lambdaPred);
      if (trace_)
        trace_->searchedMvs.push_back(mv);
      for (int p = 0; p < numPlanes_; p++)
        motionCompensate(refPlanes_[size_t(p)], x, y, mv, pred->block(p, size));
      CuDecision cu = base;
      cu.mode = CuMode::Amvp;
      cu.mv = mv;
      cu.mvd = Mv{int16_t(mv.x - predictor.x), int16_t(mv.y - predictor.y)};
      haveBest |= tryCandidate(std::move(cu), *pred, start, best, bestCost, haveBest);
    }

    // Rough intra selection codes the mode flag after the inter header bins;
    // those bins do not depend on the intra mode, so the start state is used.
    for (int mode : roughIntraModes(x, y, size, start, base.mpm)) {
      predictIntraCu(x, y, size, mode, *pred);
      CuDecision cu = base;
      cu.mode = CuMode::Intra;
      cu.intraMode = mode;
      haveBest |= tryCandidate(std::move(cu), *pred, start, best, bestCost, haveBest);
    }
    return best;
  }

  RdCost FrameEncoder::compressCu(int x, int y, int size, int depth, CtuDecision& out)
  {
    const ContextSet start = ctx_;
    const bool canSplit = size > kMinCuSize;

    ContextSet unsplitStart = start;
    BitCounter flagBits;
    if (canSplit)
      writeSplitFlag(flagBits, unsplitStart, depth, false);
    auto best = std::make_unique<Evaluated>(evaluateCu(x, y, size, unsplitStart));
    RdCost unsplit{best->decision.distortion, best->decision.fracBits + flagBits.fracBits()};

    if (canSplit) {
      const size_t splitMark = out.splits.size(), cuMark = out.cus.size();
      ctx_ = start;
      BitCounter splitBits;
      writeSplitFlag(splitBits, ctx_, depth, true);
      out.splits.push_back(1);
      RdCost split{0, splitBits.fracBits()};
      const int half = size / 2;
      for (int i = 0; i < 4; i++) {
        const RdCost child = compressCu(x + (i & 1) * half, y + (i >> 1) * half, half, depth + 1, out);
        split.dist += child.dist;
        split.frac += child.frac;
      }
      if (cost(split) < cost(unsplit))
        return split;
      out.splits.resize(splitMark);
      out.cus.resize(cuMark);
      out.splits.push_back(0);
    }

    const CuDecision& cu = best->decision;
    for (int p = 0; p < numPlanes_; p++)
      copyBlock(std::as_const(best->recon).block(p, size),
                blockOf(recon_.planes[size_t(p)], x, y, size, size));
    MotionUnit unit;
    unit.inter = cu.mode != CuMode::Intra;
    unit.skip = cu.mode == CuMode::Skip;
    unit.mv = unit.inter ? cu.mv : Mv{};
    unit.intraMode = uint8_t(unit.inter ? kIntraDc : cu.intraMode);
    motion_.fill(x, y, size, unit);
    ctx_ = best->ctx;
    out.cus.push_back(std::move(best->decision));
    return unsplit;
  }

  void FrameEncoder::commitCtu(RangeEncoder& enc, ContextSet& ctx, const CtuDecision& ctu)
  {
    size_t splitIdx = 0, cuIdx = 0;
    const bool inter = ref_ != nullptr;
    auto walk = [&](auto&& self, int size, int depth) -> void {
      if (size > kMinCuSize) {
        const bool split = ctu.splits.at(splitIdx++);
        writeSplitFlag(enc, ctx, depth, split);
        if (split) {
          for (int i = 0; i < 4; i++)
            self(self, size / 2, depth + 1);
          return;
        }
      }
      const CuDecision& cu = ctu.cus.at(cuIdx++);
      writeCuHeader(enc, ctx, cu, inter);
      if (cu.mode != CuMode::Skip)
        writeResidual(enc, ctx, cu, numPlanes_);

      stats_.numCus++;
      switch (cu.mode) {
      case CuMode::Skip: stats_.skipCus++; break;
      case CuMode::Merge: stats_.mergeCus++; break;
      case CuMode::Amvp: stats_.amvpCus++; break;
      case CuMode::Intra: stats_.intraCus++; break;
      }
      if (trace_) {
        int index = cu.mode == CuMode::Intra ? cu.intraMode
                    : cu.mode == CuMode::Amvp ? 0
                                              : cu.mergeIndex;
        trace_->chosen.push_back({cu.x, cu.y, cu.size, cu.mode, index, cu.fracBits,
                                  cu.distortion,
                                  rdCost(double(cu.distortion), fracToBits(cu.fracBits),
                                         rdo_.lambdaFull)});
      }
    };
    walk(walk, kCtuSize, 0);
    if (splitIdx != ctu.splits.size() || cuIdx != ctu.cus.size())
      throw ConsistencyError("CTU decision tree is inconsistent");
  }

  EncodedFrame FrameEncoder::run()
  {
    RangeEncoder enc;
    ContextSet commitCtx;
    const int ctusWide = width_ / kCtuSize, ctusHigh = height_ / kCtuSize;

    for (int cy = 0; cy < ctusHigh; cy++)
      for (int cx = 0; cx < ctusWide; cx++) {
        CtuDecision ctu;
        const RdCost predicted = compressCu(cx * kCtuSize, cy * kCtuSize, kCtuSize, 0, ctu);
        const uint64_t before = enc.fracBits();
        commitCtu(enc, commitCtx, ctu);
        stats_.predictedFracBits += predicted.frac;
        stats_.committedFracBits += enc.fracBits() - before;
        if (!(commitCtx == ctx_))
          throw ConsistencyError("RDO and committed context states diverged");
      }

    EncodedFrame result;
    if (config_.sao) {
      sao::SaoContexts selectCtx, writeCtx;
      std::vector<Plane8> pre = recon_.planes;
      for (int cy = 0; cy < ctusHigh; cy++)
        for (int cx = 0; cx < ctusWide; cx++) {
          const sao::Rect rect{cx * kCtuSize, cy * kCtuSize, kCtuSize, kCtuSize};
          for (int p = 0; p < numPlanes_; p++) {
            const sao::SaoStats stats =
              sao::collectStats(orig_.planes[size_t(p)], pre[size_t(p)], mask_, rect);
            const sao::SaoParams params = sao::selectSao(stats, rdo_.lambdaFull, selectCtx);
            BitCounter sink;
            sao::writeSaoParams(sink, selectCtx, params);
            sao::applySao(pre[size_t(p)], recon_.planes[size_t(p)], rect, params);
            result.sao.push_back(params);
          }
        }
      for (const sao::SaoParams& params : result.sao)
        sao::writeSaoParams(enc, writeCtx, params);
    }

    const std::vector<uint8_t> payload = enc.finish();
    result.segment.reserve(payload.size() + 3);
    result.segment.push_back(uint8_t(ref_ ? SliceType::Inter : SliceType::Intra));
    result.segment.push_back(uint8_t(config_.qp));
    result.segment.push_back(uint8_t(config_.sao));
    result.segment.insert(result.segment.end(), payload.begin(), payload.end());
    result.reconstruction.recon = std::move(recon_);
    result.reconstruction.motion = std::move(motion_);
    result.stats = stats_;
    return result;
  }

}  // namespace

EncodedFrame
encodeFrame(const Picture& orig, const EncoderConfig& config, const Mask& occupancy,
            const ReferenceFrame* ref, RdoTrace* trace)
{
  FrameEncoder encoder(orig, config, occupancy, ref, trace);
  return encoder.run();
}

}  // namespace ompc::codec
