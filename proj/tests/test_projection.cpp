#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "ompc/color.h"
#include "ompc/errors.h"
#include "ompc/eval.h"
#include "ompc/metrics.h"
#include "ompc/occupancy.h"
#include "ompc/projection.h"
#include "test_util.h"

using namespace ompc;

namespace {

PointCloud
plate(int size, int z)
{
  PointCloud c;
  for (int y = 0; y < size; y++)
    for (int x = 0; x < size; x++)
      c.points.push_back({x + 20, y + 20, z});
  return c;
}

PointCloud
hollowCube(int lo, int hi)
{
  PointCloud c;
  for (int x = lo; x <= hi; x++)
    for (int y = lo; y <= hi; y++)
      for (int z = lo; z <= hi; z++)
        if (x == lo || x == hi || y == lo || y == hi || z == lo || z == hi)
          c.points.push_back({x, y, z});
  return c;
}

std::vector<int>
allIndices(const PointCloud& c)
{
  std::vector<int> v(c.size());
  for (size_t i = 0; i < v.size(); i++)
    v[i] = int(i);
  return v;
}

}  // namespace

TEST_CASE("segmentation: flat plate is one +Z component")
{
  const Segmentation seg = segmentPatches(plate(16, 5), 8);
  for (int o : seg.orientation)
    CHECK(o == 4);
  CHECK(seg.components.size() == 1);
}

TEST_CASE("segmentation: two separated plates give two components")
{
  PointCloud c = plate(10, 5);
  for (int y = 0; y < 10; y++)
    for (int x = 0; x < 10; x++)
      c.points.push_back({x + 100, y + 100, 5});
  const Segmentation seg = segmentPatches(c, 8);
  CHECK(seg.components.size() == 2);
  for (int o : seg.orientation)
    CHECK(o == 4);
}

TEST_CASE("segmentation: hollow cube faces take their outward axis")
{
  const int lo = 40, hi = 80;
  const PointCloud c = hollowCube(lo, hi);
  const Segmentation seg = segmentPatches(c, 16);
  // face interior points only (edges are ambiguous)
  std::map<int, std::pair<int, int>> perFace;  // expected orientation -> (match, total)
  for (size_t i = 0; i < c.size(); i++) {
    const Point3& p = c.points[i];
    int expected = -1, onFaces = 0;
    for (int a = 0; a < 3; a++) {
      if (p[a] == lo) {
        expected = 2 * a + 1;
        onFaces++;
      }
      if (p[a] == hi) {
        expected = 2 * a;
        onFaces++;
      }
    }
    if (onFaces != 1)
      continue;
    auto& [match, total] = perFace[expected];
    total++;
    match += seg.orientation[i] == expected;
  }
  REQUIRE(perFace.size() == 6);
  for (const auto& [o, mt] : perFace)
    CHECK(double(mt.first) >= 0.9 * mt.second);
}

TEST_CASE("rasterize: plate depths and near-layer rule")
{
  const PointCloud p = plate(8, 5);
  const PatchTile t = rasterizePatch(p, allIndices(p), 4);
  CHECK(t.d0 == 5);
  CHECK(t.lostPoints == 0);
  for (uint8_t d : t.depth.values())
    CHECK(d == 0);

  PointCloud two;
  two.points = {{1, 1, 3}, {1, 1, 9}};
  const PatchTile u = rasterizePatch(two, {0, 1}, 4);
  CHECK(u.lostPoints == 1);
  CHECK(u.d0 == 3);
  CHECK(u.depth.at(0, 0) == 0);
  CHECK(u.width % 4 == 0);
  CHECK(u.height % 4 == 0);

  PointCloud tall;
  tall.bitDepth = 10;
  tall.points = {{1, 1, 0}, {2, 1, 600}};
  CHECK_THROWS_AS(rasterizePatch(tall, {0, 1}, 4), SplitError);
}

TEST_CASE("rasterize: lost points match a multiplicity recount")
{
  const auto clouds = generateSequence(SequenceKind::Sphere, 1, 3, 5000);
  const PointCloud& c = clouds[0];
  const Segmentation seg = segmentPatches(c, 16);
  for (size_t k = 0; k < seg.components.size(); k++) {
    const int o = seg.componentOrientation[k];
    const int axis = orientationAxis(o);
    std::set<std::pair<int, int>> cells;
    for (int idx : seg.components[k]) {
      const Point3& p = c.points[size_t(idx)];
      cells.insert({p[tangentAxis(axis)], p[bitangentAxis(axis)]});
    }
    const PatchTile t = rasterizePatch(c, seg.components[k], o);
    CHECK(t.lostPoints == int(seg.components[k].size() - cells.size()));
  }
}

TEST_CASE("packing examples and properties")
{
  PatchSet one = packPatches({{12, 20}}, 64);
  CHECK(one.patches[0].u0 == 0);
  CHECK(one.patches[0].v0 == 0);
  CHECK(one.frameWidth == 64);
  CHECK(one.frameHeight == 64);

  PatchSet two = packPatches({{32, 32}, {32, 32}}, 64);
  CHECK(two.patches[0].u0 == 0);
  CHECK(two.patches[1].u0 == 32);
  CHECK(two.patches[1].v0 == 0);
  CHECK(two.frameHeight == 64);

  CHECK_THROWS_AS(packPatches({{68, 4}}, 64), PackingError);

  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> dim(1, 16);
  for (int trial = 0; trial < 20; trial++) {
    std::vector<TileSize> tiles;
    for (int i = 0; i < 50; i++)
      tiles.push_back({4 * dim(rng), 4 * dim(rng)});
    const PatchSet ps = packPatches(tiles, 128);
    CHECK(ps == packPatches(tiles, 128));
    CHECK(ps.frameHeight % 64 == 0);
    for (size_t i = 0; i < ps.patches.size(); i++) {
      const Patch& a = ps.patches[i];
      CHECK(a.u0 % 4 == 0);
      CHECK(a.v0 % 4 == 0);
      CHECK(a.u0 + a.sizeU <= ps.frameWidth);
      CHECK(a.v0 + a.sizeV <= ps.frameHeight);
      for (size_t j = i + 1; j < ps.patches.size(); j++) {
        const Patch& b = ps.patches[j];
        const bool disjoint = a.u0 + a.sizeU <= b.u0 || b.u0 + b.sizeU <= a.u0
                              || a.v0 + a.sizeV <= b.v0 || b.v0 + b.sizeV <= a.v0;
        CHECK(disjoint);
      }
    }
  }
}

TEST_CASE("colour conversion")
{
  CHECK(rgbToYcbcr({255, 255, 255}) == std::array<uint8_t, 3>{255, 128, 128});
  CHECK(rgbToYcbcr({0, 0, 0}) == std::array<uint8_t, 3>{0, 128, 128});
  // 0.299*255 = 76.245; 128 - 0.168736*255 = 84.97; Cr clips at 255
  CHECK(rgbToYcbcr({255, 0, 0}) == std::array<uint8_t, 3>{76, 85, 255});
  int worst = 0;
  for (int r = 0; r < 256; r += 4)
    for (int g = 0; g < 256; g += 4)
      for (int b = 0; b < 256; b += 4) {
        const Rgb in{uint8_t(r), uint8_t(g), uint8_t(b)};
        const auto ycc = rgbToYcbcr(in);
        const Rgb out = ycbcrToRgb(ycc[0], ycc[1], ycc[2]);
        worst = std::max({worst, std::abs(out.r - r), std::abs(out.g - g), std::abs(out.b - b)});
      }
  CHECK(worst <= 1);
}

TEST_CASE("frames: fill values and dilation")
{
  PointCloud c = plate(8, 5);
  c.colors.assign(c.size(), Rgb{255, 255, 255});
  ProjectionOptions opts;
  opts.frameWidth = 64;
  const ProjectedFrame f = projectCloud(c, opts);
  const FramePair& fp = f.frames;
  CHECK(fp.occupancy.at(0, 0) == 1);
  CHECK(fp.attribute.planes[0].at(0, 0) == 255);
  CHECK(fp.occupancy.at(40, 40) == 0);
  CHECK(fp.geometry.planes[0].at(40, 40) == 0);
  CHECK(fp.attribute.planes[0].at(40, 40) == 128);
  CHECK(fp.attribute.planes[1].at(40, 40) == 128);

  opts.padding = PaddingMode::Dilate;
  const FramePair d = projectCloud(c, opts).frames;
  CHECK(d.occupancy == fp.occupancy);
  CHECK(d.attribute.planes[0].at(10, 3) == 255);  // within 4 px of the plate
  CHECK(d.attribute.planes[0].at(12, 3) == 128);  // beyond
}

TEST_CASE("reconstruction: lossless plate and single-pixel perturbation")
{
  const PointCloud c = plate(12, 5);
  ProjectionOptions opts;
  opts.frameWidth = 64;
  const ProjectedFrame f = projectCloud(c, opts);
  const PointCloud r =
    reconstructCloud(f.frames.geometry, f.frames.occupancy, f.patchSet, nullptr, 8);
  CHECK(sameContent(r, c));
  CHECK(d1Mse(c, r) == 0);

  Picture g = f.frames.geometry;
  g.planes[0].at(3, 2) += 1;
  const PointCloud moved = reconstructCloud(g, f.frames.occupancy, f.patchSet, nullptr, 8);
  int differing = 0;
  std::set<Point3> orig(c.points.begin(), c.points.end());
  for (const Point3& p : moved.points)
    if (!orig.count(p)) {
      differing++;
      CHECK(orig.count(Point3{p.x, p.y, p.z - 1}));
    }
  CHECK(differing == 1);

  Mask stray = f.frames.occupancy;
  stray.at(60, 60) = 1;
  CHECK_THROWS_AS(reconstructCloud(f.frames.geometry, stray, f.patchSet, nullptr, 8),
                  ConsistencyError);
}

TEST_CASE("reconstruction: block mask only adds points near patch borders")
{
  const auto clouds = generateSequence(SequenceKind::Torus, 1, 4);
  ProjectionOptions opts;
  const ProjectedFrame f = projectCloud(clouds[0], opts);
  const PointCloud exact =
    reconstructCloud(f.frames.geometry, f.frames.occupancy, f.patchSet, nullptr, 8);
  const Mask block = upsampleOccupancy(downsampleOccupancy(f.frames.occupancy));
  const PointCloud coarse = reconstructCloud(f.frames.geometry, block, f.patchSet, nullptr, 8);
  CHECK(coarse.size() >= exact.size());
  // every extra pixel is within a 4x4 block that also has a real pixel
  for (int y = 0; y < block.height(); y++)
    for (int x = 0; x < block.width(); x++)
      if (block.at(x, y) && !f.frames.occupancy.at(x, y)) {
        bool near = false;
        for (int dy = -3; dy <= 3 && !near; dy++)
          for (int dx = -3; dx <= 3 && !near; dx++) {
            const int sx = x + dx, sy = y + dy;
            near = sx >= 0 && sy >= 0 && sx < block.width() && sy < block.height()
                   && f.frames.occupancy.at(sx, sy);
          }
        REQUIRE(near);
      }
}

TEST_CASE("projection accounting: occupied pixels + lost points = cloud size")
{
  for (SequenceKind k : {SequenceKind::Sphere, SequenceKind::Torus, SequenceKind::Blobs,
                         SequenceKind::Orbit}) {
    const PointCloud c = generateSequence(k, 1, 12)[0];
    const ProjectedFrame f = projectCloud(c, ProjectionOptions{});
    int occupied = 0;
    for (uint8_t m : f.frames.occupancy.values())
      occupied += m;
    CHECK(occupied + f.lostPoints == int(c.size()));
    CHECK(f.patchSet.frameWidth % 64 == 0);
    CHECK(f.patchSet.frameHeight % 64 == 0);
    // every occupied pixel lies in exactly one patch rectangle
    for (int y = 0; y < f.patchSet.frameHeight; y++)
      for (int x = 0; x < f.patchSet.frameWidth; x++) {
        if (!f.frames.occupancy.at(x, y))
          continue;
        int owners = 0;
        for (const Patch& p : f.patchSet.patches)
          owners += x >= p.u0 && x < p.u0 + p.sizeU && y >= p.v0 && y < p.v0 + p.sizeV;
        REQUIRE(owners == 1);
      }
    const ProjectedFrame again = projectCloud(c, ProjectionOptions{});
    CHECK(again.patchSet == f.patchSet);
    CHECK(again.frames.geometry == f.frames.geometry);
  }
}

TEST_CASE("frame height padding")
{
  const PointCloud c = plate(8, 5);
  ProjectionOptions opts;
  opts.frameWidth = 64;
  opts.minFrameHeight = 100;
  const ProjectedFrame f = projectCloud(c, opts);
  CHECK(f.patchSet.frameHeight == 128);
  CHECK(f.frames.attribute.planes[2].at(5, 127) == 128);
  CHECK(f.frames.occupancy.height() == 128);
}
