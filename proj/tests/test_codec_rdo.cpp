#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <tuple>

#include "ompc/codec/encoder.h"
#include "ompc/errors.h"
#include "test_util.h"

using namespace ompc;
using namespace ompc::codec;

namespace {

// Smooth gradients with some texture, shifted by (dx, dy) between frames.
Picture
content(int w, int h, int planes, uint64_t seed, int dx = 0, int dy = 0)
{
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> noise(-4, 4);
  Picture pic(planes, w, h);
  for (int p = 0; p < planes; p++)
    for (int y = 0; y < h; y++)
      for (int x = 0; x < w; x++) {
        const double sx = x + dx, sy = y + dy;
        const double v = 128 + 50 * std::sin(0.07 * sx + p) * std::cos(0.05 * sy) + 20 * std::sin(0.3 * sx * sy / 64);
        pic.planes[size_t(p)].at(x, y) = uint8_t(std::clamp(v + noise(rng), 0.0, 255.0));
      }
  return pic;
}

Mask
rectMask(int w, int h, int x0, int y0, int x1, int y1)
{
  Mask m(w, h, 0);
  for (int y = y0; y < y1; y++)
    for (int x = x0; x < x1; x++)
      m.at(x, y) = 1;
  return m;
}

bool
regionAny(const Mask& m, int x, int y, int size)
{
  for (int j = 0; j < size; j++)
    for (int i = 0; i < size; i++)
      if (m.at(x + i, y + j))
        return true;
  return false;
}

bool
regionAll(const Mask& m, int x, int y, int size, uint8_t v)
{
  for (int j = 0; j < size; j++)
    for (int i = 0; i < size; i++)
      if (m.at(x + i, y + j) != v)
        return false;
  return true;
}

}  // namespace

TEST_CASE("decoder reproduces the encoder reconstruction")
{
  const Picture f0 = content(128, 128, 3, 1);
  const Picture f1 = content(128, 128, 3, 2, 3, 1);
  std::mt19937_64 rng(3);
  const Mask mask = testutil::randomMask(rng, 128, 128, 0.6);
  for (int qp : {22, 27, 32, 37})
    for (bool masking : {false, true})
      for (bool sao : {false, true}) {
        EncoderConfig cfg{qp, sao, masking};
        const EncodedFrame i = encodeFrame(f0, cfg, mask, nullptr);
        const ReferenceFrame di = decodeFrame(i.segment, 3, 128, 128, nullptr);
        REQUIRE(di.recon == i.reconstruction.recon);
        REQUIRE(di.motion == i.reconstruction.motion);
        CHECK(i.stats.predictedFracBits == i.stats.committedFracBits);

        const EncodedFrame p = encodeFrame(f1, cfg, mask, &i.reconstruction);
        const ReferenceFrame dp = decodeFrame(p.segment, 3, 128, 128, &di);
        REQUIRE(dp.recon == p.reconstruction.recon);
        CHECK(p.stats.predictedFracBits == p.stats.committedFracBits);
        CHECK(p.stats.skipCus + p.stats.mergeCus + p.stats.amvpCus + p.stats.intraCus
              == p.stats.numCus);
      }
}

TEST_CASE("uniform gray intra frame codes as 64x64 DC CUs")
{
  const Picture gray(3, 192, 128, 128);
  RdoTrace trace;
  const EncodedFrame f = encodeFrame(gray, EncoderConfig{32, true, false}, Mask(192, 128, 1),
                                     nullptr, &trace);
  REQUIRE(trace.chosen.size() == 6);
  for (const RdoCandidate& c : trace.chosen) {
    CHECK(c.size == 64);
    CHECK(c.mode == CuMode::Intra);
    CHECK(c.index == 1);  // DC
    CHECK(c.distortion == 0);
  }
  CHECK(f.reconstruction.recon == gray);
  // a handful of flag bins per CTU and plane
  CHECK(fracToBits(f.stats.committedFracBits) < 6 * 16);
}

TEST_CASE("all-ones mask reproduces the unmasked encoder exactly")
{
  const Mask ones(128, 64, 1);
  for (int qp : {22, 37}) {
    const Picture f0 = content(128, 64, 3, 10 + qp), f1 = content(128, 64, 3, 11 + qp, -2, 1);
    RdoTrace ta, tb;
    const EncodedFrame a = encodeFrame(f0, EncoderConfig{qp, true, false}, ones, nullptr, &ta);
    const EncodedFrame b = encodeFrame(f0, EncoderConfig{qp, true, true}, ones, nullptr, &tb);
    CHECK(a.segment == b.segment);
    CHECK(a.reconstruction.recon == b.reconstruction.recon);
    CHECK(ta.candidates.size() == tb.candidates.size());
    const EncodedFrame pa = encodeFrame(f1, EncoderConfig{qp, true, false}, ones, &a.reconstruction);
    const EncodedFrame pb = encodeFrame(f1, EncoderConfig{qp, true, true}, ones, &b.reconstruction);
    CHECK(pa.segment == pb.segment);
    CHECK(pa.sao == pb.sao);
  }
}

TEST_CASE("rough stages do not look at the mask")
{
  std::mt19937_64 rng(4);
  const Picture f0 = content(64, 64, 1, 20), f1 = content(64, 64, 1, 21, 2, 2);
  const EncodedFrame ref = encodeFrame(f0, EncoderConfig{30, false, false}, Mask(64, 64, 1), nullptr);
  for (int t = 0; t < 5; t++) {
    const Mask m = testutil::randomMask(rng, 64, 64, 0.3);
    RdoTrace off, on;
    encodeFrame(f1, EncoderConfig{30, false, false}, m, &ref.reconstruction, &off);
    encodeFrame(f1, EncoderConfig{30, false, true}, m, &ref.reconstruction, &on);
    // Everything up to the first committed leaf (64, 32, 16, 8 at the
    // origin) sees identical reconstructions in both arms.
    for (size_t i = 0; i < 4; i++) {
      CHECK(off.roughIntra.at(i) == on.roughIntra.at(i));
      CHECK(off.searchedMvs.at(i) == on.searchedMvs.at(i));
    }
  }
}

TEST_CASE("fully unoccupied CUs take the cheapest candidate")
{
  std::mt19937_64 rng(5);
  const Picture f0 = content(128, 128, 3, 30);
  Picture f1 = content(128, 128, 3, 31, 1, 0);
  // unoccupied right half holds noise unrelated to the reference
  for (auto& plane : f1.planes)
    for (int y = 0; y < 128; y++)
      for (int x = 64; x < 128; x++)
        plane.at(x, y) = uint8_t(rng() & 255);
  const Mask mask = rectMask(128, 128, 0, 0, 64, 128);

  for (int qp : {22, 32}) {
    RdoTrace ti, tp;
    const EncodedFrame i = encodeFrame(f0, EncoderConfig{qp, true, true}, mask, nullptr, &ti);
    const EncodedFrame p = encodeFrame(f1, EncoderConfig{qp, true, true}, mask, &i.reconstruction, &tp);
    for (const RdoTrace* tr : {&ti, &tp}) {
      std::map<std::tuple<int, int, int>, uint64_t> minBits;
      for (const RdoCandidate& c : tr->candidates) {
        auto key = std::make_tuple(c.x, c.y, c.size);
        auto it = minBits.find(key);
        if (it == minBits.end() || c.fracBits < it->second)
          minBits[key] = c.fracBits;
      }
      int dead = 0;
      for (const RdoCandidate& c : tr->chosen) {
        if (!regionAll(mask, c.x, c.y, c.size, 0))
          continue;
        dead++;
        CHECK(c.distortion == 0);
        CHECK(c.fracBits == minBits.at(std::make_tuple(c.x, c.y, c.size)));
        if (tr == &tp)
          CHECK(c.mode == CuMode::Skip);
      }
      CHECK(dead > 0);
    }
  }
}

TEST_CASE("masking spends fewer bits when noise sits in unoccupied pixels")
{
  std::mt19937_64 rng(6);
  Picture f = content(128, 64, 3, 40);
  for (auto& plane : f.planes)
    for (int y = 0; y < 64; y++)
      for (int x = 0; x < 128; x++)
        if ((x / 4 + y / 4) % 3 == 0)  // scattered unoccupied 4x4 blocks
          plane.at(x, y) = uint8_t(rng() & 255);
  Mask mask(128, 64, 1);
  for (int y = 0; y < 64; y++)
    for (int x = 0; x < 128; x++)
      mask.at(x, y) = (x / 4 + y / 4) % 3 != 0;
  for (int qp : {22, 27, 32, 37}) {
    const EncodedFrame base = encodeFrame(f, EncoderConfig{qp, true, false}, mask, nullptr);
    const EncodedFrame masked = encodeFrame(f, EncoderConfig{qp, true, true}, mask, nullptr);
    CHECK(masked.segment.size() < base.segment.size());
    CHECK(decodeFrame(masked.segment, 3, 128, 64, nullptr).recon == masked.reconstruction.recon);
  }
}

TEST_CASE("motion follows the occupied object under masking")
{
  std::mt19937_64 rng(7);
  const int w = 128, h = 64;
  // textured object, noisy background that changes every frame
  Plane8 texture = testutil::randomPlane(rng, 32, 32, 40, 220);
  auto frame = [&](int ox, int oy) {
    Picture pic(1, w, h);
    for (int y = 0; y < h; y++)
      for (int x = 0; x < w; x++)
        pic.planes[0].at(x, y) = uint8_t(rng() & 255);
    for (int y = 0; y < 32; y++)
      for (int x = 0; x < 32; x++)
        pic.planes[0].at(ox + x, oy + y) = texture.at(x, y);
    return pic;
  };
  const Picture f0 = frame(29, 14), f1 = frame(32, 16);
  const Mask m0 = rectMask(w, h, 29, 14, 61, 46), m1 = rectMask(w, h, 32, 16, 64, 48);
  const EncodedFrame i = encodeFrame(f0, EncoderConfig{22, false, true}, m0, nullptr);
  RdoTrace trace;
  const EncodedFrame p = encodeFrame(f1, EncoderConfig{22, false, true}, m1, &i.reconstruction, &trace);
  int onObject = 0;
  for (const RdoCandidate& c : trace.chosen) {
    if (!regionAny(m1, c.x, c.y, c.size))
      continue;
    onObject++;
    CHECK(c.mode != CuMode::Intra);
  }
  // object interior carries the true displacement
  for (int y = 24; y < 40; y += 8)
    for (int x = 40; x < 56; x += 8)
      CHECK(p.reconstruction.motion.atPixel(x, y)->mv == Mv{-6, -4});
  CHECK(onObject > 0);
  bool found = false;
  for (Mv mv : trace.searchedMvs)
    found |= mv == Mv{-6, -4};
  CHECK(found);
}

TEST_CASE("decoder rejects malformed segments without crashing")
{
  const Picture f0 = content(64, 64, 3, 50), f1 = content(64, 64, 3, 51, 1, 1);
  const EncodedFrame i = encodeFrame(f0, EncoderConfig{30, true, false}, Mask(64, 64, 1), nullptr);
  const EncodedFrame p = encodeFrame(f1, EncoderConfig{30, true, false}, Mask(64, 64, 1), &i.reconstruction);

  auto seg = i.segment;
  seg[0] = 2;
  CHECK_THROWS_AS(decodeFrame(seg, 3, 64, 64, nullptr), DecodeError);
  CHECK_THROWS_AS(decodeFrame(p.segment, 3, 64, 64, nullptr), DecodeError);
  CHECK_THROWS_AS(decodeFrame(std::vector<uint8_t>{0, 30}, 3, 64, 64, nullptr), DecodeError);
  auto trunc = i.segment;
  trunc.resize(trunc.size() / 2);
  CHECK_THROWS_AS(decodeFrame(trunc, 3, 64, 64, nullptr), DecodeError);

  std::mt19937_64 rng(8);
  int rejected = 0;
  for (int t = 0; t < 300; t++) {
    const bool inter = t % 2;
    auto bytes = inter ? p.segment : i.segment;
    const int flips = 1 + int(rng() % 4);
    for (int k = 0; k < flips; k++)
      bytes[3 + rng() % (bytes.size() - 3)] ^= uint8_t(1 << (rng() % 8));
    try {
      decodeFrame(bytes, 3, 64, 64, inter ? &i.reconstruction : nullptr);
    } catch (const DecodeError&) {
      rejected++;
    }
  }
  CHECK(rejected > 0);
}
