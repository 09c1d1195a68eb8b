#pragma once

#include <filesystem>

#include "ompc/point_cloud.h"

namespace ompc {

// Reads an ASCII PLY with x,y,z (float or integer) and optional
// red,green,blue properties. Coordinates are rounded to the nearest voxel and
// duplicate voxels are dropped, first occurrence wins.
PointCloud loadPly(const std::filesystem::path& path);

void savePly(const PointCloud& cloud, const std::filesystem::path& path);

}  // namespace ompc
