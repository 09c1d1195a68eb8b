#include "ompc/point_cloud.h"

#include <algorithm>
#include <map>
#include <string>
#include <unordered_set>

#include "ompc/errors.h"

namespace ompc {

namespace {

  struct PointHash {
    size_t operator()(const Point3& p) const
    {
      uint64_t h = uint64_t(uint32_t(p.x));
      h = h * 0x9E3779B97F4A7C15ull ^ uint64_t(uint32_t(p.y));
      h = h * 0x9E3779B97F4A7C15ull ^ uint64_t(uint32_t(p.z));
      return size_t(h ^ (h >> 29));
    }
  };

}  // namespace

//============================================================================

void
PointCloud::validate() const
{
  if (bitDepth < 1 || bitDepth > 16)
    throw DomainError("bit depth out of range: " + std::to_string(bitDepth));
  if (!colors.empty() && colors.size() != points.size())
    throw DomainError("color count does not match point count");

  const int32_t limit = int32_t(1) << bitDepth;
  std::unordered_set<Point3, PointHash> seen;
  seen.reserve(points.size());
  for (const auto& p : points) {
    for (int a = 0; a < 3; a++)
      if (p[a] < 0 || p[a] >= limit)
        throw DomainError("point outside the bit-depth cube");
    if (!seen.insert(p).second)
      throw DomainError("duplicate point");
  }
}

int
PointCloud::fittingBitDepth(const std::vector<Point3>& points)
{
  int32_t maxCoord = 0;
  for (const auto& p : points)
    maxCoord = std::max({maxCoord, p.x, p.y, p.z});
  int d = 8;
  while ((int64_t(1) << d) <= maxCoord)
    d++;
  return d;
}

//----------------------------------------------------------------------------

void
removeDuplicatePoints(PointCloud& cloud)
{
  std::unordered_set<Point3, PointHash> seen;
  seen.reserve(cloud.points.size());
  size_t out = 0;
  const bool colored = cloud.hasColors();
  for (size_t i = 0; i < cloud.points.size(); i++) {
    if (!seen.insert(cloud.points[i]).second)
      continue;
    cloud.points[out] = cloud.points[i];
    if (colored)
      cloud.colors[out] = cloud.colors[i];
    out++;
  }
  cloud.points.resize(out);
  if (colored)
    cloud.colors.resize(out);
}

//----------------------------------------------------------------------------

bool
sameContent(const PointCloud& a, const PointCloud& b)
{
  if (a.size() != b.size() || a.hasColors() != b.hasColors())
    return false;

  std::map<Point3, Rgb> lhs;
  for (size_t i = 0; i < a.size(); i++)
    lhs.emplace(a.points[i], a.hasColors() ? a.colors[i] : Rgb{});
  for (size_t i = 0; i < b.size(); i++) {
    auto it = lhs.find(b.points[i]);
    if (it == lhs.end())
      return false;
    if (b.hasColors() && !(it->second == b.colors[i]))
      return false;
  }
  return true;
}

}  // namespace ompc
