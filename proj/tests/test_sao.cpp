#include <doctest.h>

#include <cmath>
#include <random>

#include "ompc/errors.h"
#include "ompc/sao.h"
#include "oracles.h"
#include "test_util.h"

using namespace ompc;
using namespace ompc::sao;
using namespace oracle;

namespace {

int
sign(int v)
{
  return (v > 0) - (v < 0);
}

}  // namespace

TEST_CASE("edge categories")
{
  CHECK(eoCategory(5, 3, 5) == 1);
  CHECK(eoCategory(3, 3, 3) == 0);
  CHECK(eoCategory(2, 7, 4) == 4);
  CHECK(eoCategory(3, 3, 5) == 2);
  CHECK(eoCategory(5, 5, 3) == 3);
  CHECK(eoCategory(1, 3, 5) == 0);
  for (int a = 0; a < 6; a++)
    for (int c = 0; c < 6; c++)
      for (int b = 0; b < 6; b++)
        REQUIRE(eoCategory(a, c, b) == naiveCategory(a, c, b));
  CHECK_THROWS_AS(eoNeighbours(4), DomainError);
}

TEST_CASE("stats: examples")
{
  const Plane8 recon(8, 8, 100);
  Plane8 orig(8, 8, 100);
  CHECK(collectStats(orig, recon, Mask(8, 8, 0), {0, 0, 8, 8}) == SaoStats{});

  // one occupied valley pixel
  Plane8 r2(8, 8, 100);
  r2.at(3, 3) = 90;
  Plane8 o2 = r2;
  o2.at(3, 3) = 87;
  Mask m(8, 8, 0);
  m.at(3, 3) = 1;
  const SaoStats s = collectStats(o2, r2, m, {0, 0, 8, 8});
  SaoStats expect;
  for (int c = 0; c < 4; c++) {
    expect.eoSum[size_t(c)][1] = -3;
    expect.eoCount[size_t(c)][1] = 1;
  }
  expect.bandSum[90 >> 3] = -3;
  expect.bandCount[90 >> 3] = 1;
  CHECK(s == expect);

  // border pixels are left out of edge stats only
  Mask corner(8, 8, 0);
  corner.at(0, 0) = 1;
  const SaoStats b = collectStats(orig, recon, corner, {0, 0, 8, 8});
  for (int c = 0; c < 4; c++)
    CHECK(b.eoCount[size_t(c)][0] == 0);
  CHECK(b.bandCount[100 >> 3] == 1);

  CHECK_THROWS_AS(collectStats(orig, recon, m, {4, 4, 8, 8}), DomainError);
  CHECK_THROWS_AS(collectStats(orig, Plane8(4, 4), m, {0, 0, 4, 4}), DomainError);
}

TEST_CASE("offset derivation")
{
  CHECK(deriveOffset(-3, 1) == -3);
  CHECK(deriveOffset(9, 2) == 5);
  CHECK(deriveOffset(-9, 2) == -5);
  CHECK(deriveOffset(5, 0) == 0);
  CHECK(deriveOffset(100, 3) == 7);
  CHECK(deriveOffset(-100, 3) == -7);
  for (int64_t sum = -60; sum <= 60; sum++)
    for (int64_t count = 0; count <= 9; count++)
      REQUIRE(deriveOffset(sum, count) == oracleOffset(sum, count));

  SaoStats s;
  s.eoSum[0][1] = -3;  // category 1 wants a negative offset: clamped to 0
  s.eoCount[0][1] = 1;
  s.eoSum[0][2] = 9;
  s.eoCount[0][2] = 2;
  s.eoSum[0][3] = 4;  // category 3 must not go positive
  s.eoCount[0][3] = 1;
  s.eoSum[0][4] = -8;
  s.eoCount[0][4] = 2;
  CHECK(edgeOffsets(s, 0) == std::array<int, 4>{0, 5, 0, -4});
}

TEST_CASE("stats and selection match per-pixel oracles on 1000 CTUs")
{
  std::mt19937_64 rng(17);
  for (int t = 0; t < 1000; t++) {
    const RandomCtu c = randomCtu(rng);
    const SaoStats s = collectStats(c.orig, c.recon, c.mask, c.rect);

    const SaoStats naive = naiveStats(c.orig, c.recon, c.mask, c.rect);
    REQUIRE(s == naive);

    const double lambda = std::pow(2.0, double(rng() % 12));
    const SaoParams chosen = selectSao(s, lambda, SaoContexts{});
    REQUIRE(chosen == exhaustiveSelect(c.orig, c.recon, c.mask, c.rect, lambda, SaoContexts{}));
    if (chosen.type == SaoType::Edge)
      for (int k = 0; k < 4; k++)
        CHECK(sign(chosen.offsets[size_t(k)]) * (k < 2 ? 1 : -1) >= 0);
  }
}

TEST_CASE("distortion delta equals the measured change without clipping")
{
  std::mt19937_64 rng(23);
  for (int t = 0; t < 200; t++) {
    const RandomCtu c = randomCtu(rng);
    const SaoStats s = collectStats(c.orig, c.recon, c.mask, c.rect);
    std::uniform_int_distribution<int> o(-7, 7);
    SaoParams p;
    if (t % 2) {
      p = {SaoType::Edge, int(rng() % 4), 0, {}};
      p.offsets = {std::abs(o(rng)), std::abs(o(rng)), -std::abs(o(rng)), -std::abs(o(rng))};
    } else {
      p = {SaoType::Band, 0, int(rng() % 29), {o(rng), o(rng), o(rng), o(rng)}};
    }
    CHECK(distortionDelta(s, p) == measuredDelta(c.orig, c.recon, c.mask, c.rect, p));
  }
  CHECK(distortionDelta(SaoStats{}, SaoParams{}) == 0);
}

TEST_CASE("selection: zero error picks off, uniform +2 picks a band")
{
  std::mt19937_64 rng(29);
  const Plane8 recon = testutil::randomPlane(rng, 64, 64, 20, 230);
  const Mask mask = testutil::randomMask(rng, 64, 64, 0.5);
  const Rect all{0, 0, 64, 64};
  CHECK(selectSao(collectStats(recon, recon, mask, all), 10.0, SaoContexts{}).type == SaoType::Off);

  // every occupied pixel in band 12 and two below the original
  Plane8 flat(64, 64);
  Plane8 orig(64, 64);
  for (int y = 0; y < 64; y++)
    for (int x = 0; x < 64; x++) {
      flat.at(x, y) = uint8_t(96 + (x + y) % 8);
      orig.at(x, y) = uint8_t(flat.at(x, y) + 2);
    }
  const SaoStats s = collectStats(orig, flat, mask, all);
  const SaoParams p = selectSao(s, 20.0, SaoContexts{});
  CHECK(p.type == SaoType::Band);
  CHECK(p.bandStart <= 12);
  CHECK(p.bandStart + 3 >= 12);
  CHECK(p.offsets[size_t(12 - p.bandStart)] == 2);
  CHECK(p == exhaustiveSelect(orig, flat, mask, all, 20.0, SaoContexts{}));

  Plane8 out = flat;
  applySao(flat, out, all, p);
  CHECK(out == orig);  // unoccupied pixels move too
}

TEST_CASE("all-ones mask matches statistics without a mask")
{
  std::mt19937_64 rng(31);
  for (int t = 0; t < 50; t++) {
    const RandomCtu c = randomCtu(rng);
    const Mask ones(c.mask.width(), c.mask.height(), 1);
    const SaoStats s = collectStats(c.orig, c.recon, ones, c.rect);
    int64_t total = 0;
    for (int64_t n : s.bandCount)
      total += n;
    CHECK(total == int64_t(c.rect.width) * c.rect.height);
  }
}

TEST_CASE("apply: off is identity, writes stay inside the rectangle")
{
  std::mt19937_64 rng(37);
  for (int t = 0; t < 100; t++) {
    const Plane8 pre = testutil::randomPlane(rng, 40, 40);
    const Rect r{int(rng() % 20), int(rng() % 20), 1 + int(rng() % 20), 1 + int(rng() % 20)};
    Plane8 out = pre;
    applySao(pre, out, r, SaoParams{});
    REQUIRE(out == pre);

    std::uniform_int_distribution<int> o(-7, 7);
    SaoParams p = t % 2 ? SaoParams{SaoType::Edge, int(rng() % 4), 0, {7, 3, -3, -7}}
                        : SaoParams{SaoType::Band, 0, int(rng() % 29), {o(rng), o(rng), o(rng), o(rng)}};
    applySao(pre, out, r, p);
    for (int y = 0; y < 40; y++)
      for (int x = 0; x < 40; x++) {
        const bool in = x >= r.x && y >= r.y && x < r.x + r.width && y < r.y + r.height;
        if (!in)
          REQUIRE(out.at(x, y) == pre.at(x, y));
        else
          REQUIRE(std::abs(out.at(x, y) - pre.at(x, y)) <= 7);
      }
  }

  // clipping
  const Plane8 hi(4, 4, 252);
  Plane8 out = hi;
  applySao(hi, out, {0, 0, 4, 4}, {SaoType::Band, 0, 28, {0, 0, 0, 7}});
  CHECK(out == Plane8(4, 4, 255));
  CHECK_THROWS_AS(applySao(hi, out, {2, 2, 4, 4}, SaoParams{}), DomainError);
}

TEST_CASE("parameter syntax round trips")
{
  std::mt19937_64 rng(41);
  std::vector<SaoParams> params;
  std::uniform_int_distribution<int> o(-7, 7), m(0, 7);
  for (int i = 0; i < 500; i++) {
    switch (rng() % 3) {
    case 0: params.push_back({}); break;
    case 1: params.push_back({SaoType::Edge, int(rng() % 4), 0, {m(rng), m(rng), -m(rng), -m(rng)}}); break;
    default: params.push_back({SaoType::Band, 0, int(rng() % 29), {o(rng), o(rng), o(rng), o(rng)}}); break;
    }
  }
  RangeEncoder enc;
  SaoContexts ec;
  for (const auto& p : params)
    writeSaoParams(enc, ec, p);
  const auto bytes = enc.finish();
  RangeDecoder dec(bytes);
  SaoContexts dc;
  for (const auto& p : params)
    REQUIRE(readSaoParams(dec, dc) == p);
}
