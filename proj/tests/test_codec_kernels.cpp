#include <doctest.h>

#include <cmath>
#include <random>
#include <utility>

#include "ompc/codec/frame.h"
#include "ompc/codec/inter_pred.h"
#include "ompc/codec/intra_pred.h"
#include "ompc/codec/quant.h"
#include "ompc/codec/rdo.h"
#include "ompc/codec/syntax.h"
#include "ompc/codec/transform.h"
#include "ompc/errors.h"
#include "oracles.h"
#include "test_util.h"

using namespace ompc;
using namespace ompc::codec;
using namespace oracle;

namespace {

ConstBlock
whole(const Plane8& p)
{
  return blockOf(p, 0, 0, p.width(), p.height());
}

}  // namespace

TEST_CASE("masked ssd and rd cost")
{
  Plane8 o(4, 1), r(4, 1), m(4, 1);
  const int diffs[4] = {2, 3, 4, 5};
  const int mask[4] = {1, 0, 1, 0};
  for (int i = 0; i < 4; i++) {
    o.at(i, 0) = uint8_t(100 + diffs[i]);
    r.at(i, 0) = 100;
    m.at(i, 0) = uint8_t(mask[i]);
  }
  CHECK(maskedSsd(whole(o), whole(r), whole(m)) == 20);
  CHECK(maskedSsd(whole(o), whole(r), whole(Plane8(4, 1, 1))) == ssd(whole(o), whole(r)));
  CHECK(maskedSsd(whole(o), whole(r), whole(Plane8(4, 1, 0))) == 0);
  CHECK_THROWS_AS(maskedSsd(whole(o), whole(Plane8(3, 1)), whole(m)), DomainError);

  CHECK(rdCost(20, 5, 2) == 30);
  CHECK(rdCost(0, 10, 4) == 40);
  CHECK(rdCost(17, 99, 0) == 17);

  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; i++) {
    const Plane8 a = testutil::randomPlane(rng, 16, 16), b = testutil::randomPlane(rng, 16, 16);
    const Mask mk = testutil::randomMask(rng, 16, 16);
    CHECK(maskedSsd(whole(a), whole(b), whole(mk)) <= ssd(whole(a), whole(b)));
  }
}

TEST_CASE("lambda")
{
  CHECK(lambdaForQp(12) == doctest::Approx(0.57));
  CHECK(lambdaForQp(27) == doctest::Approx(0.57 * 32));
  const RdoContext c = RdoContext::make(30, nullptr, false);
  CHECK(c.lambdaPred == doctest::Approx(std::sqrt(c.lambdaFull)));
}

TEST_CASE("satd: examples and dense Hadamard oracle")
{
  Plane8 a(4, 4, 50), b(4, 4, 50);
  CHECK(satd(whole(a), whole(b)) == 0);
  a.at(0, 0) = 51;
  CHECK(satd(whole(a), whole(b)) == 8);

  std::mt19937_64 rng(2);
  for (int n : {4, 8, 16, 32}) {
    for (int t = 0; t < 30; t++) {
      const Plane8 x = testutil::randomPlane(rng, n, n), y = testutil::randomPlane(rng, n, n);
      REQUIRE(satd(whole(x), whole(y)) == satdOracle(x, y));
    }
  }
  CHECK_THROWS_AS(satd(whole(Plane8(8, 4)), whole(Plane8(8, 4))), DomainError);
}

TEST_CASE("transform: DC, zero and exact round trip")
{
  for (int n : {4, 8, 16, 32}) {
    const size_t nn = size_t(n) * size_t(n);
    std::vector<int16_t> res(nn, 37), back(nn);
    std::vector<int32_t> coef(nn);
    forwardTransform(res, coef, n);
    CHECK(coef[0] != 0);
    for (size_t i = 1; i < nn; i++)
      REQUIRE(coef[i] == 0);

    std::fill(res.begin(), res.end(), 0);
    forwardTransform(res, coef, n);
    for (int32_t c : coef)
      REQUIRE(c == 0);
  }

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> v(-255, 255);
  for (int t = 0; t < 20000; t++) {
    const int n = 4 << (t % 4);
    const size_t nn = size_t(n) * size_t(n);
    std::vector<int16_t> res(nn), back(nn);
    std::vector<int32_t> coef(nn);
    for (auto& r : res)
      r = int16_t(t % 7 == 0 ? (v(rng) > 0 ? 255 : -255) : v(rng));
    forwardTransform(res, coef, n);
    inverseTransform(coef, back, n);
    REQUIRE(back == res);
  }
}

TEST_CASE("quantization")
{
  CHECK(quantStep(4) == 1.0);
  CHECK(quantStep(16) == 4.0);
  CHECK(quantize(10, 16, false) == 2);
  CHECK(quantize(-10, 16, false) == -2);
  CHECK(quantize(10, 16, true) == 2);   // floor(2.5 + 1/3)
  CHECK(quantize(11, 16, true) == 3);   // floor(2.75 + 1/3)
  CHECK(quantize(0, 30, true) == 0);
  CHECK(dequantize(2, 16) == 8);
  CHECK_THROWS_AS(quantize(1, 52, true), DomainError);

  // reconstruction error bound: a deadzone rounding offset f leaves up to
  // (1 - f) steps of error, plus one for the integer rounding
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> c(-20000, 20000);
  for (int qp = 22; qp <= 37; qp++)
    for (bool intra : {false, true})
      for (int shift : {0, 3}) {
        const double step = quantStep(qp) * double(1 << shift);
        const double f = intra ? 1.0 / 3 : 1.0 / 6;
        for (int i = 0; i < 2000; i++) {
          const int32_t x = c(rng);
          const int32_t l = quantize(x, qp, intra, shift);
          const double err = std::abs(double(x) - double(dequantize(l, qp, shift)));
          REQUIRE(err <= (1 - f) * step + 1);
          // floor(|c| / step + f), with the approximated step
          REQUIRE(std::abs(l) == int(std::floor(std::abs(double(x)) / step + f + 1e-12)));
        }
      }
}

TEST_CASE("intra prediction basics")
{
  std::mt19937_64 rng(5);
  Plane8 recon = testutil::randomPlane(rng, 64, 64);
  uint8_t buf[32 * 32];
  for (int n : {8, 16, 32}) {
    const MutableBlock out{buf, n, n, n};
    const IntraReference ref = buildIntraReference(recon, 16, 16, n);
    predictIntra(ref, kIntraVertical, out);
    for (int y = 0; y < n; y++)
      for (int x = 0; x < n; x++)
        REQUIRE(out.at(x, y) == recon.at(16 + x, 15));
    predictIntra(ref, kIntraHorizontal, out);
    for (int y = 0; y < n; y++)
      for (int x = 0; x < n; x++)
        REQUIRE(out.at(x, y) == recon.at(15, 16 + y));
  }

  // outside the picture every reference is 128
  const IntraReference corner = buildIntraReference(recon, 0, 0, 8);
  const MutableBlock out{buf, 8, 8, 8};
  for (int mode = 0; mode < kNumIntraModes; mode++) {
    predictIntra(corner, mode, out);
    for (int y = 0; y < 8; y++)
      for (int x = 0; x < 8; x++)
        REQUIRE(out.at(x, y) == 128);
  }

  Plane8 flat(64, 64, 77);
  const IntraReference f = buildIntraReference(flat, 32, 32, 16);
  const MutableBlock o16{buf, 16, 16, 16};
  for (int mode = 0; mode < kNumIntraModes; mode++) {
    predictIntra(f, mode, o16);
    for (int y = 0; y < 16; y++)
      for (int x = 0; x < 16; x++)
        REQUIRE(o16.at(x, y) == 77);
  }
}

TEST_CASE("motion vector usability")
{
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> mv(-40, 40), pos(0, 56);
  for (int i = 0; i < 20000; i++) {
    const Mv m{int16_t(mv(rng)), int16_t(mv(rng))};
    const int x = pos(rng) & ~7, y = pos(rng) & ~7;
    REQUIRE(mvUsable(x, y, 8, 8, m, 64, 64) == usableOracle(x, y, 8, 8, m, 64, 64));
  }
}

TEST_CASE("motion compensation matches a clamped bilinear oracle")
{
  std::mt19937_64 rng(7);
  const Plane8 ref = testutil::randomPlane(rng, 64, 64);
  const PaddedPlane padded(ref);
  std::uniform_int_distribution<int> mv(-32, 32);
  uint8_t buf[16 * 16];
  for (int i = 0; i < 500; i++) {
    const Mv m{int16_t(mv(rng)), int16_t(mv(rng))};
    const int x = 16 * int(rng() % 4), y = 16 * int(rng() % 4);
    motionCompensate(padded, x, y, m, MutableBlock{buf, 16, 16, 16});
    const Plane8 expect = bilinear(ref, x, y, 16, 16, m);
    for (int j = 0; j < 16; j++)
      for (int k = 0; k < 16; k++)
        REQUIRE(buf[j * 16 + k] == expect.at(k, j));
  }
}

TEST_CASE("merge list")
{
  MotionField cur(64, 64), col(64, 64);
  MergeList first = buildMergeList(cur, nullptr, 0, 0, 64);
  CHECK(first.count == 1);
  CHECK(first.mvs[0] == Mv{});

  MotionUnit u;
  u.inter = true;
  u.mv = {2, 0};
  cur.fill(0, 8, 8, u);  // left of (8, 8)
  cur.fill(8, 0, 8, u);  // above
  const MergeList dedup = buildMergeList(cur, nullptr, 8, 8, 8);
  CHECK(dedup.count == 2);
  CHECK(dedup.mvs[0] == Mv{2, 0});
  CHECK(dedup.mvs[1] == Mv{});

  // rule-by-rule oracle over random fields
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> mvc(-3, 3);
  for (int t = 0; t < 2000; t++) {
    MotionField a(64, 64), b(64, 64);
    for (MotionField* f : {&a, &b})
      for (int y = 0; y < 64; y += 8)
        for (int x = 0; x < 64; x += 8) {
          MotionUnit m;
          m.inter = rng() % 3 != 0;
          m.mv = {int16_t(mvc(rng)), int16_t(mvc(rng))};
          f->fill(x, y, 8, m);
        }
    const int size = 8 << (rng() % 3);
    const int x = size * int(rng() % (64 / size)), y = size * int(rng() % (64 / size));
    const bool withCol = rng() & 1;
    std::vector<Mv> expect;
    auto add = [&](const MotionUnit* m) {
      if (m && m->inter && std::find(expect.begin(), expect.end(), m->mv) == expect.end())
        expect.push_back(m->mv);
    };
    add(x > 0 ? a.atPixel(x - 1, y) : nullptr);
    add(y > 0 ? a.atPixel(x, y - 1) : nullptr);
    if (withCol)
      add(b.atPixel(x + size / 2, y + size / 2));
    if (std::find(expect.begin(), expect.end(), Mv{}) == expect.end())
      expect.push_back(Mv{});
    const MergeList got = buildMergeList(a, withCol ? &b : nullptr, x, y, size);
    REQUIRE(got.count == int(expect.size()));
    for (size_t i = 0; i < expect.size(); i++)
      REQUIRE(got.mvs[i] == expect[i]);
  }
}

TEST_CASE("motion search: known shift, identity and exhaustive oracle")
{
  std::mt19937_64 rng(9);
  const Plane8 ref = testutil::randomPlane(rng, 64, 64);
  Plane8 cur(64, 64);
  for (int y = 0; y < 64; y++)
    for (int x = 0; x < 64; x++)
      cur.at(x, y) = uint8_t(clampedAt(ref, x + 3, y + 1));
  const PaddedPlane padded(ref);
  CHECK(motionSearch(blockOf(std::as_const(cur), 16, 16, 16, 16), padded, 16, 16, Mv{}, 4.0) == Mv{6, 2});
  CHECK(motionSearch(blockOf(std::as_const(ref), 16, 16, 16, 16), padded, 16, 16, Mv{}, 4.0) == Mv{});

  for (int t = 0; t < 100; t++) {
    // smooth content so that the search surface has structure
    Plane8 r(64, 64), c(64, 64);
    const double fx = 0.05 + 0.2 * double(rng() % 100) / 100, fy = 0.05 + 0.2 * double(rng() % 100) / 100;
    const int sx = int(rng() % 13) - 6, sy = int(rng() % 13) - 6;
    std::uniform_int_distribution<int> noise(-6, 6);
    for (int y = 0; y < 64; y++)
      for (int x = 0; x < 64; x++) {
        r.at(x, y) = uint8_t(128 + 60 * std::sin(fx * x) * std::cos(fy * y) + noise(rng));
        c.at(x, y) = uint8_t(std::clamp(128 + 60 * std::sin(fx * (x + sx)) * std::cos(fy * (y + sy))
                                          + noise(rng), 0.0, 255.0));
      }
    const int n = 8 << (t % 3);
    const int x = n * int(rng() % (64 / n)), y = n * int(rng() % (64 / n));
    const Mv pred{int16_t(int(rng() % 21) - 10), int16_t(int(rng() % 21) - 10)};
    const double lambda = 1 + double(rng() % 40);
    const PaddedPlane p(r);
    REQUIRE(motionSearch(blockOf(std::as_const(c), x, y, n, n), p, x, y, pred, lambda)
            == searchOracle(c, r, x, y, n, pred, lambda));
  }
}

TEST_CASE("mvd bits")
{
  CHECK(mvdSymbol(0) == 0);
  CHECK(mvdSymbol(1) == 1);
  CHECK(mvdSymbol(-1) == 2);
  CHECK(mvdBits(Mv{}) == 2);
  for (int dx = -40; dx <= 40; dx++)
    CHECK(mvdBits(Mv{int16_t(dx), 3}) == mvdBitsOracle(dx, 3));
}

TEST_CASE("syntax round trip")
{
  std::mt19937_64 rng(10);
  struct Cu {
    int split, skip, mergeIdx, listSize, mode, mpm, cbf;
    Mv mvd;
    std::vector<int32_t> levels;
    int size;
    bool chroma;
  };
  std::vector<Cu> cus;
  std::uniform_int_distribution<int> lvl(-40, 40);
  for (int i = 0; i < 400; i++) {
    Cu c;
    c.split = rng() & 1;
    c.skip = rng() & 1;
    c.listSize = 1 + int(rng() % 4);
    c.mergeIdx = int(rng() % unsigned(c.listSize));
    c.mode = int(rng() % 10);
    c.mpm = int(rng() % 10);
    c.cbf = rng() & 1;
    c.mvd = {int16_t(int(rng() % 129) - 64), int16_t(int(rng() % 129) - 64)};
    c.size = 4 << (rng() % 4);
    c.chroma = rng() & 1;
    c.levels.assign(size_t(c.size * c.size), 0);
    const int nz = 1 + int(rng() % 12);
    for (int k = 0; k < nz; k++)
      c.levels[size_t(rng() % c.levels.size())] = lvl(rng);
    c.levels[size_t(rng() % c.levels.size())] = 1 + int(rng() % 3000);
    cus.push_back(std::move(c));
  }

  ContextSet encCtx, cntCtx;
  RangeEncoder enc;
  BitCounter counter;
  auto write = [&](auto& coder, ContextSet& ctx) {
    for (const Cu& c : cus) {
      writeSplitFlag(coder, ctx, c.size % 3, c.split);
      writeSkipFlag(coder, ctx, c.mergeIdx % 3, c.skip);
      writeMergeIndex(coder, ctx, c.mergeIdx, c.listSize);
      writeMvd(coder, c.mvd);
      writeIntraMode(coder, ctx, c.mode, c.mpm);
      writeCbf(coder, ctx, c.chroma, c.split, c.cbf);
      writeCoefficients(coder, ctx, c.levels.data(), c.size, c.chroma);
    }
  };
  write(enc, encCtx);
  write(counter, cntCtx);
  CHECK(enc.fracBits() == counter.fracBits());
  const auto bytes = enc.finish();

  ContextSet decCtx;
  RangeDecoder dec(bytes);
  std::vector<int32_t> levels(32 * 32);
  for (const Cu& c : cus) {
    REQUIRE(readSplitFlag(dec, decCtx, c.size % 3) == bool(c.split));
    REQUIRE(readSkipFlag(dec, decCtx, c.mergeIdx % 3) == bool(c.skip));
    REQUIRE(readMergeIndex(dec, decCtx, c.listSize) == c.mergeIdx);
    REQUIRE(readMvd(dec) == c.mvd);
    REQUIRE(readIntraMode(dec, decCtx, c.mpm) == c.mode);
    REQUIRE(readCbf(dec, decCtx, c.chroma, c.split) == bool(c.cbf));
    readCoefficients(dec, decCtx, levels.data(), c.size, c.chroma);
    REQUIRE(std::equal(c.levels.begin(), c.levels.end(), levels.begin()));
  }
  CHECK(dec.fullyConsumed());
  CHECK(decCtx == encCtx);
}

TEST_CASE("diagonal scan is a permutation with DC first")
{
  for (int log2 = 2; log2 <= 5; log2++) {
    const int n = 1 << log2;
    const ScanTable& s = diagonalScan(log2);
    REQUIRE(s.order.size() == size_t(n * n));
    std::vector<int> seen(size_t(n * n), 0);
    int prevDiag = 0;
    for (size_t i = 0; i < s.order.size(); i++) {
      const int x = s.order[i] % n, y = s.order[i] / n;
      seen[s.order[i]]++;
      CHECK(x + y >= prevDiag);
      prevDiag = x + y;
    }
    for (int v : seen)
      CHECK(v == 1);
    CHECK(s.order[0] == 0);
    CHECK(s.posClass[0] == 0);
  }
}
