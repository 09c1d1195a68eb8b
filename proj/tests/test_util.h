#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "ompc/image.h"
#include "ompc/point_cloud.h"

namespace testutil {

inline ompc::PointCloud
randomCloud(std::mt19937_64& rng, int n, int extent, bool colors = false)
{
  ompc::PointCloud c;
  std::uniform_int_distribution<int> coord(0, extent - 1), col(0, 255);
  for (int i = 0; i < n; i++) {
    c.points.push_back({coord(rng), coord(rng), coord(rng)});
    if (colors)
      c.colors.push_back({uint8_t(col(rng)), uint8_t(col(rng)), uint8_t(col(rng))});
  }
  ompc::removeDuplicatePoints(c);
  return c;
}

inline ompc::Plane8
randomPlane(std::mt19937_64& rng, int w, int h, int lo = 0, int hi = 255)
{
  ompc::Plane8 p(w, h);
  std::uniform_int_distribution<int> v(lo, hi);
  for (auto& x : p.values())
    x = uint8_t(v(rng));
  return p;
}

inline ompc::Mask
randomMask(std::mt19937_64& rng, int w, int h, double density = 0.5)
{
  ompc::Mask m(w, h);
  std::bernoulli_distribution b(density);
  for (auto& x : m.values())
    x = b(rng);
  return m;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path
scratchDir(const std::string& name)
{
  const auto dir = std::filesystem::temp_directory_path() / ("ompc_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
