#pragma once

#include <cstdint>
#include <vector>

#include "ompc/image.h"
#include "ompc/point_cloud.h"

namespace ompc {

// Orientation index: axis = orientation / 2 (X, Y, Z), odd orientations look
// along the negative axis.
constexpr int kNumOrientations = 6;
constexpr int kPatchAlignment = 4;
constexpr int kFrameAlignment = 64;

inline int orientationAxis(int orientation) { return orientation / 2; }
inline bool orientationNegative(int orientation) { return (orientation & 1) != 0; }

// Tangent (u) and bitangent (v) axes for a projection axis.
int tangentAxis(int axis);
int bitangentAxis(int axis);

struct Patch {
  int orientation = 0;
  int u0 = 0;
  int v0 = 0;
  int sizeU = 0;
  int sizeV = 0;
  int d0 = 0;
  int shiftU = 0;
  int shiftV = 0;
  // Reference coordinate along the projection axis: 0 for positive
  // orientations, 2^d - 1 for negative ones. 3D coordinate along the axis is
  // shiftAxis +/- (d0 + stored depth).
  int shiftAxis = 0;

  friend bool operator==(const Patch&, const Patch&) = default;
};

struct PatchSet {
  std::vector<Patch> patches;
  int frameWidth = 0;
  int frameHeight = 0;

  friend bool operator==(const PatchSet&, const PatchSet&) = default;
};

struct Segmentation {
  std::vector<int> orientation;             // per point
  std::vector<std::vector<int>> components;  // point indices
  std::vector<int> componentOrientation;
};

// Rasterized patch content. Tile dimensions are multiples of 4.
struct PatchTile {
  int orientation = 0;
  int width = 0;
  int height = 0;
  int d0 = 0;
  int shiftU = 0;
  int shiftV = 0;
  int shiftAxis = 0;
  Plane8 depth;
  std::vector<Rgb> color;  // width*height, mid-gray where unoccupied
  Mask occupancy;
  int lostPoints = 0;
  int sourcePoints = 0;
};

struct FramePair {
  Picture geometry;   // 1 plane, unoccupied = 0
  Picture attribute;  // 3 planes YCbCr, unoccupied = (128,128,128)
  Mask occupancy;
};

enum class PaddingMode { None, Dilate };

struct ProjectionOptions {
  int normalNeighbors = 16;
  int frameWidth = 256;
  int minFrameHeight = 0;
  PaddingMode padding = PaddingMode::None;
};

struct ProjectedFrame {
  PatchSet patchSet;
  FramePair frames;
  int lostPoints = 0;
  int bitDepth = 8;
};

// Labels each point with the orientation best aligned with its (outward
// oriented) normal and splits every orientation group into 8-connected
// components on its projection plane.
Segmentation segmentPatches(const PointCloud& cloud, int k);

// Single-layer projection of the given points. Throws SplitError when the
// depth range does not fit 8 bits.
PatchTile rasterizePatch(const PointCloud& cloud, const std::vector<int>& indices,
                         int orientation);

struct TileSize {
  int width = 0;
  int height = 0;
};

// Deterministic shelf packing at 4-aligned positions.
PatchSet packPatches(const std::vector<TileSize>& tiles, int frameWidth);

FramePair buildFrames(const PatchSet& patchSet, const std::vector<PatchTile>& tiles,
                      PaddingMode padding = PaddingMode::None);

// Back-projects every mask pixel covered by a patch rectangle.
PointCloud reconstructCloud(const Picture& geometry, const Mask& mask, const PatchSet& patchSet,
                            const Picture* attribute, int bitDepth);

// Full projection pipeline for one cloud.
ProjectedFrame projectCloud(const PointCloud& cloud, const ProjectionOptions& options);

// Projects every frame and pads all of them to a common height.
std::vector<ProjectedFrame> projectSequence(const std::vector<PointCloud>& clouds,
                                            const ProjectionOptions& options);

// Grows a projected frame to the given height (unoccupied fill).
void padFrameHeight(ProjectedFrame& frame, int height);

}  // namespace ompc
