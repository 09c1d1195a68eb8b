#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ompc/point_cloud.h"

namespace ompc {

struct Neighbor {
  int index = -1;
  int64_t dist2 = 0;
};

// Uniform-grid accelerator for exact nearest-neighbour queries over integer
// points. Results are ordered by (squared distance, point index), so they match
// an exhaustive scan exactly, ties included.
class NearestNeighborIndex {
public:
  explicit NearestNeighborIndex(const std::vector<Point3>& points, int cellSize = 4);

  Neighbor nearest(const Point3& query) const;

  // The k nearest points (fewer if the cloud is smaller). `exclude` removes
  // one index from consideration, typically the query point itself.
  std::vector<Neighbor> kNearest(const Point3& query, int k, int exclude = -1) const;

  size_t size() const { return points_.size(); }

private:
  struct CellRange {
    uint32_t begin = 0;
    uint32_t end = 0;
  };

  static uint64_t cellKey(int cx, int cy, int cz);
  int cellOf(int32_t c) const { return c >= 0 ? c / cellSize_ : -((-c + cellSize_ - 1) / cellSize_); }

  std::vector<Point3> points_;
  int cellSize_;
  std::array<int, 3> minCell_{};
  std::array<int, 3> maxCell_{};
  std::vector<uint32_t> order_;
  std::unordered_map<uint64_t, CellRange> cells_;
};

}  // namespace ompc
