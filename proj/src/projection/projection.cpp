#include "ompc/projection.h"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "ompc/color.h"
#include "ompc/errors.h"
#include "ompc/metrics.h"

namespace ompc {

namespace {

  int alignUp(int v, int a) { return (v + a - 1) / a * a; }

  uint64_t pixelKey(int u, int v) { return uint64_t(uint32_t(u)) << 32 | uint32_t(v); }

  uint64_t voxelKey(const Point3& p)
  {
    return uint64_t(uint32_t(p.x)) << 42 | uint64_t(uint32_t(p.y)) << 21 | uint64_t(uint32_t(p.z));
  }

  // Labels 26-connected voxel components; returns the component id per point.
  std::vector<int> voxelComponents(const PointCloud& cloud, int& count)
  {
    std::unordered_map<uint64_t, int> lookup;
    lookup.reserve(cloud.size());
    for (size_t i = 0; i < cloud.size(); i++)
      lookup.emplace(voxelKey(cloud.points[i]), int(i));

    std::vector<int> label(cloud.size(), -1);
    std::vector<int> stack;
    count = 0;
    for (size_t seed = 0; seed < cloud.size(); seed++) {
      if (label[seed] >= 0)
        continue;
      label[seed] = count;
      stack.push_back(int(seed));
      while (!stack.empty()) {
        const Point3 p = cloud.points[size_t(stack.back())];
        stack.pop_back();
        for (int dz = -1; dz <= 1; dz++)
          for (int dy = -1; dy <= 1; dy++)
            for (int dx = -1; dx <= 1; dx++) {
              const Point3 q{p.x + dx, p.y + dy, p.z + dz};
              if (q.x < 0 || q.y < 0 || q.z < 0)
                continue;
              auto it = lookup.find(voxelKey(q));
              if (it != lookup.end() && label[size_t(it->second)] < 0) {
                label[size_t(it->second)] = count;
                stack.push_back(it->second);
              }
            }
      }
      count++;
    }
    return label;
  }

  int depthOf(const Point3& p, int orientation, int bitDepth)
  {
    const int axis = orientationAxis(orientation);
    return orientationNegative(orientation) ? ((1 << bitDepth) - 1) - p[axis] : p[axis];
  }

}  // namespace

//============================================================================

int
tangentAxis(int axis)
{
  return axis == 2 ? 0 : 2;
}

int
bitangentAxis(int axis)
{
  return axis == 1 ? 0 : 1;
}

//============================================================================

Segmentation
segmentPatches(const PointCloud& cloud, int k)
{
  const NormalField normals = estimateNormals(cloud, k);

  // Orient normals away from the centroid of their 3D-connected body.
  int numBodies = 0;
  const auto body = voxelComponents(cloud, numBodies);
  std::vector<std::array<double, 4>> centroid(size_t(numBodies), {0, 0, 0, 0});
  for (size_t i = 0; i < cloud.size(); i++) {
    auto& c = centroid[size_t(body[i])];
    c[0] += cloud.points[i].x;
    c[1] += cloud.points[i].y;
    c[2] += cloud.points[i].z;
    c[3] += 1;
  }

  Segmentation seg;
  seg.orientation.resize(cloud.size());
  for (size_t i = 0; i < cloud.size(); i++) {
    const auto& c = centroid[size_t(body[i])];
    auto n = normals.normals[i];
    double outward = 0;
    for (int a = 0; a < 3; a++)
      outward += n[size_t(a)] * (cloud.points[i][a] - c[size_t(a)] / c[3]);
    if (outward < 0)
      for (auto& v : n)
        v = -v;

    int best = 0;
    double bestDot = n[0];
    for (int o = 1; o < kNumOrientations; o++) {
      const double s = orientationNegative(o) ? -1.0 : 1.0;
      const double dot = s * n[size_t(orientationAxis(o))];
      if (dot > bestDot) {
        bestDot = dot;
        best = o;
      }
    }
    seg.orientation[i] = best;
  }

  // 8-connected components of the projected pixels of each orientation group.
  for (int o = 0; o < kNumOrientations; o++) {
    const int axis = orientationAxis(o);
    const int tu = tangentAxis(axis), tv = bitangentAxis(axis);
    std::unordered_map<uint64_t, std::vector<int>> pixels;
    std::vector<uint64_t> pixelOrder;
    for (size_t i = 0; i < cloud.size(); i++) {
      if (seg.orientation[i] != o)
        continue;
      const auto key = pixelKey(cloud.points[i][tu], cloud.points[i][tv]);
      auto [it, inserted] = pixels.try_emplace(key);
      if (inserted)
        pixelOrder.push_back(key);
      it->second.push_back(int(i));
    }

    std::unordered_set<uint64_t> visited;
    for (const auto seedKey : pixelOrder) {
      if (visited.count(seedKey))
        continue;
      std::vector<int> members;
      std::vector<uint64_t> stack{seedKey};
      visited.insert(seedKey);
      while (!stack.empty()) {
        const auto key = stack.back();
        stack.pop_back();
        const auto& pts = pixels[key];
        members.insert(members.end(), pts.begin(), pts.end());
        const int u = int(key >> 32), v = int(uint32_t(key));
        for (int dv = -1; dv <= 1; dv++)
          for (int du = -1; du <= 1; du++) {
            if ((du == 0 && dv == 0) || u + du < 0 || v + dv < 0)
              continue;
            const auto nk = pixelKey(u + du, v + dv);
            if (pixels.count(nk) && visited.insert(nk).second)
              stack.push_back(nk);
          }
      }
      std::sort(members.begin(), members.end());
      seg.components.push_back(std::move(members));
      seg.componentOrientation.push_back(o);
    }
  }
  return seg;
}

//============================================================================

PatchTile
rasterizePatch(const PointCloud& cloud, const std::vector<int>& indices, int orientation)
{
  if (indices.empty())
    throw DomainError("cannot rasterize an empty component");

  const int axis = orientationAxis(orientation);
  const int tu = tangentAxis(axis), tv = bitangentAxis(axis);

  PatchTile tile;
  tile.orientation = orientation;
  tile.sourcePoints = int(indices.size());
  tile.shiftAxis = orientationNegative(orientation) ? (1 << cloud.bitDepth) - 1 : 0;

  int minU = INT32_MAX, minV = INT32_MAX, maxU = 0, maxV = 0;
  tile.d0 = INT32_MAX;
  for (int idx : indices) {
    const auto& p = cloud.points[size_t(idx)];
    minU = std::min(minU, p[tu]);
    minV = std::min(minV, p[tv]);
    maxU = std::max(maxU, p[tu]);
    maxV = std::max(maxV, p[tv]);
    tile.d0 = std::min(tile.d0, depthOf(p, orientation, cloud.bitDepth));
  }
  tile.shiftU = minU;
  tile.shiftV = minV;
  tile.width = alignUp(maxU - minU + 1, kPatchAlignment);
  tile.height = alignUp(maxV - minV + 1, kPatchAlignment);

  // Nearest point per cell.
  std::vector<int> keep(size_t(tile.width) * size_t(tile.height), -1);
  std::vector<int> keepDepth(keep.size(), 0);
  for (int idx : indices) {
    const auto& p = cloud.points[size_t(idx)];
    const size_t cell = size_t(p[tv] - minV) * size_t(tile.width) + size_t(p[tu] - minU);
    const int depth = depthOf(p, orientation, cloud.bitDepth) - tile.d0;
    if (keep[cell] < 0 || depth < keepDepth[cell]) {
      keep[cell] = idx;
      keepDepth[cell] = depth;
    }
  }

  tile.depth = Plane8(tile.width, tile.height, 0);
  tile.occupancy = Mask(tile.width, tile.height, 0);
  tile.color.assign(keep.size(), Rgb{128, 128, 128});
  int kept = 0;
  for (int v = 0; v < tile.height; v++)
    for (int u = 0; u < tile.width; u++) {
      const size_t cell = size_t(v) * size_t(tile.width) + size_t(u);
      if (keep[cell] < 0)
        continue;
      if (keepDepth[cell] > 255)
        throw SplitError("patch depth range exceeds 8 bits");
      tile.depth.at(u, v) = uint8_t(keepDepth[cell]);
      tile.occupancy.at(u, v) = 1;
      if (cloud.hasColors())
        tile.color[cell] = cloud.colors[size_t(keep[cell])];
      kept++;
    }
  tile.lostPoints = tile.sourcePoints - kept;
  return tile;
}

//============================================================================

PatchSet
packPatches(const std::vector<TileSize>& tiles, int frameWidth)
{
  if (frameWidth <= 0 || frameWidth % kFrameAlignment)
    throw PackingError("frame width must be a positive multiple of 64");

  std::vector<size_t> order(tiles.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (tiles[a].height != tiles[b].height)
      return tiles[a].height > tiles[b].height;
    return tiles[a].width > tiles[b].width;
  });

  PatchSet set;
  set.frameWidth = frameWidth;
  set.patches.resize(tiles.size());

  int shelfY = 0, shelfHeight = 0, cursor = 0;
  for (size_t idx : order) {
    const int w = alignUp(tiles[idx].width, kPatchAlignment);
    const int h = alignUp(tiles[idx].height, kPatchAlignment);
    if (w > frameWidth)
      throw PackingError("tile wider than the frame");
    if (cursor + w > frameWidth) {
      shelfY += shelfHeight;
      shelfHeight = 0;
      cursor = 0;
    }
    auto& p = set.patches[idx];
    p.u0 = cursor;
    p.v0 = shelfY;
    p.sizeU = tiles[idx].width;
    p.sizeV = tiles[idx].height;
    cursor += w;
    shelfHeight = std::max(shelfHeight, h);
  }
  set.frameHeight = std::max(kFrameAlignment, alignUp(shelfY + shelfHeight, kFrameAlignment));
  return set;
}

//============================================================================

namespace {

  void dilate(FramePair& fp)
  {
    const int w = fp.occupancy.width(), h = fp.occupancy.height();
    Mask filled = fp.occupancy;
    const int dx[4] = {-1, 1, 0, 0};
    const int dy[4] = {0, 0, -1, 1};
    for (int iter = 0; iter < 4; iter++) {
      Mask next = filled;
      for (int y = 0; y < h; y++)
        for (int x = 0; x < w; x++) {
          if (filled.at(x, y))
            continue;
          for (int n = 0; n < 4; n++) {
            const int sx = x + dx[n], sy = y + dy[n];
            if (sx < 0 || sy < 0 || sx >= w || sy >= h || !filled.at(sx, sy))
              continue;
            fp.geometry.planes[0].at(x, y) = fp.geometry.planes[0].at(sx, sy);
            for (auto& plane : fp.attribute.planes)
              plane.at(x, y) = plane.at(sx, sy);
            next.at(x, y) = 1;
            break;
          }
        }
      filled = std::move(next);
    }
  }

}  // namespace

FramePair
buildFrames(const PatchSet& patchSet, const std::vector<PatchTile>& tiles, PaddingMode padding)
{
  if (tiles.size() != patchSet.patches.size())
    throw DomainError("tile count does not match the patch set");

  const int w = patchSet.frameWidth, h = patchSet.frameHeight;
  FramePair fp;
  fp.geometry = Picture(1, w, h, 0);
  fp.attribute = Picture(3, w, h, 128);
  fp.occupancy = Mask(w, h, 0);

  for (size_t i = 0; i < tiles.size(); i++) {
    const auto& p = patchSet.patches[i];
    const auto& t = tiles[i];
    for (int v = 0; v < t.height; v++)
      for (int u = 0; u < t.width; u++) {
        if (!t.occupancy.at(u, v))
          continue;
        const int x = p.u0 + u, y = p.v0 + v;
        fp.geometry.planes[0].at(x, y) = t.depth.at(u, v);
        const auto ycc = rgbToYcbcr(t.color[size_t(v) * size_t(t.width) + size_t(u)]);
        for (int c = 0; c < 3; c++)
          fp.attribute.planes[size_t(c)].at(x, y) = ycc[size_t(c)];
        fp.occupancy.at(x, y) = 1;
      }
  }

  if (padding == PaddingMode::Dilate)
    dilate(fp);
  return fp;
}

//============================================================================

PointCloud
reconstructCloud(const Picture& geometry, const Mask& mask, const PatchSet& patchSet,
                 const Picture* attribute, int bitDepth)
{
  const int w = mask.width(), h = mask.height();
  if (geometry.width() != w || geometry.height() != h)
    throw DomainError("geometry and mask sizes differ");
  if (attribute && (attribute->width() != w || attribute->height() != h || attribute->numPlanes() != 3))
    throw DomainError("attribute picture does not match the mask");

  Plane<int16_t> owner(w, h, -1);
  for (size_t i = 0; i < patchSet.patches.size(); i++) {
    const auto& p = patchSet.patches[i];
    for (int y = p.v0; y < std::min(h, p.v0 + p.sizeV); y++)
      for (int x = p.u0; x < std::min(w, p.u0 + p.sizeU); x++)
        owner.at(x, y) = int16_t(i);
  }

  const int32_t maxCoord = (1 << bitDepth) - 1;
  PointCloud cloud;
  cloud.bitDepth = bitDepth;
  for (int y = 0; y < h; y++)
    for (int x = 0; x < w; x++) {
      if (!mask.at(x, y))
        continue;
      const int idx = owner.at(x, y);
      if (idx < 0)
        throw ConsistencyError("occupied pixel outside every patch");
      const auto& p = patchSet.patches[size_t(idx)];
      const int axis = orientationAxis(p.orientation);
      const int depth = p.d0 + geometry.planes[0].at(x, y);
      Point3 pt;
      pt[tangentAxis(axis)] = x - p.u0 + p.shiftU;
      pt[bitangentAxis(axis)] = y - p.v0 + p.shiftV;
      pt[axis] = orientationNegative(p.orientation) ? p.shiftAxis - depth : p.shiftAxis + depth;
      for (int a = 0; a < 3; a++)
        pt[a] = std::clamp(pt[a], 0, maxCoord);
      cloud.points.push_back(pt);
      if (attribute)
        cloud.colors.push_back(ycbcrToRgb(attribute->planes[0].at(x, y), attribute->planes[1].at(x, y),
                                          attribute->planes[2].at(x, y)));
    }
  removeDuplicatePoints(cloud);
  return cloud;
}

//============================================================================

ProjectedFrame
projectCloud(const PointCloud& cloud, const ProjectionOptions& options)
{
  const Segmentation seg = segmentPatches(cloud, options.normalNeighbors);

  std::vector<PatchTile> tiles;
  for (size_t c = 0; c < seg.components.size(); c++) {
    const int o = seg.componentOrientation[c];
    try {
      tiles.push_back(rasterizePatch(cloud, seg.components[c], o));
    } catch (const SplitError&) {
      // Slice the component into depth slabs that each fit 8 bits.
      int dmin = INT32_MAX;
      for (int idx : seg.components[c])
        dmin = std::min(dmin, depthOf(cloud.points[size_t(idx)], o, cloud.bitDepth));
      std::map<int, std::vector<int>> slabs;
      for (int idx : seg.components[c])
        slabs[(depthOf(cloud.points[size_t(idx)], o, cloud.bitDepth) - dmin) / 256].push_back(idx);
      for (auto& [_, members] : slabs)
        tiles.push_back(rasterizePatch(cloud, members, o));
    }
  }

  std::vector<TileSize> sizes;
  sizes.reserve(tiles.size());
  for (const auto& t : tiles)
    sizes.push_back({t.width, t.height});

  ProjectedFrame out;
  out.bitDepth = cloud.bitDepth;
  out.patchSet = packPatches(sizes, options.frameWidth);
  for (size_t i = 0; i < tiles.size(); i++) {
    auto& p = out.patchSet.patches[i];
    const auto& t = tiles[i];
    p.orientation = t.orientation;
    p.d0 = t.d0;
    p.shiftU = t.shiftU;
    p.shiftV = t.shiftV;
    p.shiftAxis = t.shiftAxis;
    out.lostPoints += t.lostPoints;
  }
  out.frames = buildFrames(out.patchSet, tiles, options.padding);
  const int minHeight = alignUp(options.minFrameHeight, kFrameAlignment);
  if (out.patchSet.frameHeight < minHeight)
    padFrameHeight(out, minHeight);
  return out;
}

//----------------------------------------------------------------------------

void
padFrameHeight(ProjectedFrame& frame, int height)
{
  auto& ps = frame.patchSet;
  if (height <= ps.frameHeight)
    return;
  const int w = ps.frameWidth, oldH = ps.frameHeight;

  auto grow = [&](Plane8& plane, uint8_t fill) {
    Plane8 bigger(w, height, fill);
    for (int y = 0; y < oldH; y++)
      std::copy(plane.row(y).begin(), plane.row(y).end(), bigger.row(y).begin());
    plane = std::move(bigger);
  };
  grow(frame.frames.geometry.planes[0], 0);
  for (auto& plane : frame.frames.attribute.planes)
    grow(plane, 128);
  grow(frame.frames.occupancy, 0);
  ps.frameHeight = height;
}

std::vector<ProjectedFrame>
projectSequence(const std::vector<PointCloud>& clouds, const ProjectionOptions& options)
{
  std::vector<ProjectedFrame> frames;
  frames.reserve(clouds.size());
  int height = alignUp(options.minFrameHeight, kFrameAlignment);
  for (const auto& cloud : clouds) {
    frames.push_back(projectCloud(cloud, options));
    height = std::max(height, frames.back().patchSet.frameHeight);
  }
  for (auto& f : frames)
    padFrameHeight(f, height);
  return frames;
}

}  // namespace ompc
