#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <vector>

namespace ompc {

struct Point3 {
  int32_t x = 0;
  int32_t y = 0;
  int32_t z = 0;

  int32_t operator[](int axis) const { return axis == 0 ? x : axis == 1 ? y : z; }
  int32_t& operator[](int axis) { return axis == 0 ? x : axis == 1 ? y : z; }

  friend auto operator<=>(const Point3&, const Point3&) = default;
};

struct Rgb {
  uint8_t r = 0;
  uint8_t g = 0;
  uint8_t b = 0;

  friend auto operator<=>(const Rgb&, const Rgb&) = default;
};

inline int64_t squaredDistance(const Point3& a, const Point3& b)
{
  const int64_t dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

// Voxelized point cloud. Colors are either empty or parallel to points.
struct PointCloud {
  int bitDepth = 8;
  std::vector<Point3> points;
  std::vector<Rgb> colors;

  size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool hasColors() const { return !colors.empty(); }

  // Throws DomainError when an invariant does not hold.
  void validate() const;

  // Smallest bit depth (at least 8) whose cube contains every point.
  static int fittingBitDepth(const std::vector<Point3>& points);
};

// Removes repeated positions, keeping the first occurrence (and its color).
void removeDuplicatePoints(PointCloud& cloud);

// Unordered comparison: equal point sets with equal per-point colors.
bool sameContent(const PointCloud& a, const PointCloud& b);

}  // namespace ompc
