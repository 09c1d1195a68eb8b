#include "ompc/nn_search.h"

#include <algorithm>
#include <limits>

namespace ompc {

namespace {

  bool closer(const Neighbor& a, const Neighbor& b)
  {
    return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
  }

}  // namespace

//============================================================================

uint64_t
NearestNeighborIndex::cellKey(int cx, int cy, int cz)
{
  // 21 bits per axis, biased so that small negative cells stay distinct.
  const uint64_t bias = 1u << 20;
  return ((uint64_t(cx) + bias) & 0x1FFFFF) << 42 | ((uint64_t(cy) + bias) & 0x1FFFFF) << 21
    | ((uint64_t(cz) + bias) & 0x1FFFFF);
}

//----------------------------------------------------------------------------

NearestNeighborIndex::NearestNeighborIndex(const std::vector<Point3>& points, int cellSize)
  : points_(points), cellSize_(std::max(1, cellSize))
{
  if (points_.empty())
    return;

  std::vector<uint64_t> keys(points_.size());
  minCell_ = {std::numeric_limits<int>::max(), std::numeric_limits<int>::max(),
              std::numeric_limits<int>::max()};
  maxCell_ = {std::numeric_limits<int>::min(), std::numeric_limits<int>::min(),
              std::numeric_limits<int>::min()};
  for (size_t i = 0; i < points_.size(); i++) {
    int c[3];
    for (int a = 0; a < 3; a++) {
      c[a] = cellOf(points_[i][a]);
      minCell_[a] = std::min(minCell_[a], c[a]);
      maxCell_[a] = std::max(maxCell_[a], c[a]);
    }
    keys[i] = cellKey(c[0], c[1], c[2]);
  }

  order_.resize(points_.size());
  for (uint32_t i = 0; i < order_.size(); i++)
    order_[i] = i;
  std::stable_sort(order_.begin(), order_.end(),
                   [&](uint32_t a, uint32_t b) { return keys[a] < keys[b]; });

  cells_.reserve(points_.size());
  for (uint32_t i = 0; i < order_.size();) {
    uint32_t j = i;
    while (j < order_.size() && keys[order_[j]] == keys[order_[i]])
      j++;
    cells_[keys[order_[i]]] = {i, j};
    i = j;
  }
}

//----------------------------------------------------------------------------

Neighbor
NearestNeighborIndex::nearest(const Point3& query) const
{
  auto result = kNearest(query, 1);
  return result.empty() ? Neighbor{} : result.front();
}

//----------------------------------------------------------------------------

std::vector<Neighbor>
NearestNeighborIndex::kNearest(const Point3& query, int k, int exclude) const
{
  std::vector<Neighbor> best;
  if (k <= 0 || points_.empty())
    return best;
  best.reserve(size_t(k) + 1);

  const int qc[3] = {cellOf(query.x), cellOf(query.y), cellOf(query.z)};
  int maxRing = 0;
  for (int a = 0; a < 3; a++)
    maxRing = std::max({maxRing, std::abs(qc[a] - minCell_[a]), std::abs(qc[a] - maxCell_[a])});

  auto consider = [&](uint32_t idx) {
    if (int(idx) == exclude)
      return;
    Neighbor cand{int(idx), squaredDistance(points_[idx], query)};
    if (int(best.size()) == k && !closer(cand, best.back()))
      return;
    auto pos = std::upper_bound(best.begin(), best.end(), cand, closer);
    best.insert(pos, cand);
    if (int(best.size()) > k)
      best.pop_back();
  };

  auto visitCell = [&](int cx, int cy, int cz) {
    auto it = cells_.find(cellKey(cx, cy, cz));
    if (it == cells_.end())
      return;
    for (uint32_t i = it->second.begin; i < it->second.end; i++)
      consider(order_[i]);
  };

  for (int r = 0; r <= maxRing; r++) {
    for (int dz = -r; dz <= r; dz++) {
      for (int dy = -r; dy <= r; dy++) {
        const bool shell = std::abs(dz) == r || std::abs(dy) == r;
        if (shell) {
          for (int dx = -r; dx <= r; dx++)
            visitCell(qc[0] + dx, qc[1] + dy, qc[2] + dz);
        } else {
          visitCell(qc[0] - r, qc[1] + dy, qc[2] + dz);
          if (r > 0)
            visitCell(qc[0] + r, qc[1] + dy, qc[2] + dz);
        }
      }
    }
    // Every point outside rings 0..r is at least r*cell+1 away on some axis.
    if (int(best.size()) == k) {
      const int64_t bound = int64_t(r) * cellSize_ + 1;
      if (best.back().dist2 < bound * bound)
        break;
    }
  }
  return best;
}

}  // namespace ompc
