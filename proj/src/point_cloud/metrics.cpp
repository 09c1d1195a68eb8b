#include "ompc/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "ompc/color.h"
#include "ompc/errors.h"
#include "ompc/nn_search.h"

namespace ompc {

//============================================================================

NormalField
estimateNormals(const PointCloud& cloud, int k)
{
  if (k < 3)
    throw DomainError("normal estimation needs k >= 3");
  if (cloud.size() < size_t(k) + 1)
    throw DomainError("cloud has fewer than k+1 points");

  NearestNeighborIndex index(cloud.points);
  NormalField field;
  field.k = k;
  field.normals.resize(cloud.size());

  for (size_t i = 0; i < cloud.size(); i++) {
    auto nbrs = index.kNearest(cloud.points[i], k, int(i));

    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    auto pos = [&](int idx) {
      const auto& p = cloud.points[size_t(idx)];
      return Eigen::Vector3d(p.x, p.y, p.z);
    };
    mean += pos(int(i));
    for (const auto& n : nbrs)
      mean += pos(n.index);
    mean /= double(nbrs.size() + 1);

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    auto accumulate = [&](int idx) {
      const Eigen::Vector3d d = pos(idx) - mean;
      cov += d * d.transpose();
    };
    accumulate(int(i));
    for (const auto& n : nbrs)
      accumulate(n.index);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    Eigen::Vector3d normal = solver.eigenvectors().col(0).normalized();

    int major = 0;
    for (int a = 1; a < 3; a++)
      if (std::abs(normal[a]) > std::abs(normal[major]))
        major = a;
    if (normal[major] < 0)
      normal = -normal;
    field.normals[i] = {normal[0], normal[1], normal[2]};
  }
  return field;
}

//----------------------------------------------------------------------------

namespace {

  double directionalPointError(const PointCloud& from, const NearestNeighborIndex& to)
  {
    double sum = 0;
    for (const auto& p : from.points)
      sum += double(to.nearest(p).dist2);
    return sum / double(from.size());
  }

}  // namespace

double
d1Mse(const PointCloud& ref, const PointCloud& deg)
{
  if (ref.empty() || deg.empty())
    throw DomainError("D1 requires non-empty clouds");
  NearestNeighborIndex refIndex(ref.points);
  NearestNeighborIndex degIndex(deg.points);
  return std::max(directionalPointError(ref, degIndex), directionalPointError(deg, refIndex));
}

//----------------------------------------------------------------------------

double
d2Mse(const PointCloud& ref, const PointCloud& deg, const NormalField& refNormals)
{
  if (ref.empty() || deg.empty())
    throw DomainError("D2 requires non-empty clouds");
  if (refNormals.normals.size() != ref.size())
    throw DomainError("normal count does not match the reference cloud");

  auto planeError = [&](const Point3& a, const Point3& b, size_t refIdx) {
    const auto& n = refNormals.normals[refIdx];
    const double e = double(b.x - a.x) * n[0] + double(b.y - a.y) * n[1] + double(b.z - a.z) * n[2];
    return e * e;
  };

  NearestNeighborIndex refIndex(ref.points);
  NearestNeighborIndex degIndex(deg.points);

  double refToDeg = 0;
  for (size_t i = 0; i < ref.size(); i++) {
    const auto nn = degIndex.nearest(ref.points[i]);
    refToDeg += planeError(ref.points[i], deg.points[size_t(nn.index)], i);
  }
  refToDeg /= double(ref.size());

  double degToRef = 0;
  for (const auto& b : deg.points) {
    const auto nn = refIndex.nearest(b);
    degToRef += planeError(ref.points[size_t(nn.index)], b, size_t(nn.index));
  }
  degToRef /= double(deg.size());

  return std::max(refToDeg, degToRef);
}

//----------------------------------------------------------------------------

double
geometryPsnr(double mse, int bitDepth)
{
  if (mse <= 0)
    return std::numeric_limits<double>::infinity();
  const double peak = double((int64_t(1) << bitDepth) - 1);
  return 10.0 * std::log10(3.0 * peak * peak / mse);
}

//----------------------------------------------------------------------------

std::array<double, 3>
colorMse(const PointCloud& ref, const PointCloud& deg)
{
  if (ref.empty() || deg.empty())
    throw DomainError("colour error requires non-empty clouds");
  if (!ref.hasColors() || !deg.hasColors())
    throw DomainError("colour error requires coloured clouds");

  auto directional = [](const PointCloud& from, const PointCloud& to) {
    NearestNeighborIndex index(to.points);
    std::array<double, 3> sum{};
    for (size_t i = 0; i < from.size(); i++) {
      const Neighbor nn = index.nearest(from.points[i]);
      const auto a = rgbToYcbcr(from.colors[i]);
      const auto b = rgbToYcbcr(to.colors[size_t(nn.index)]);
      for (int c = 0; c < 3; c++) {
        const double d = double(a[size_t(c)]) - double(b[size_t(c)]);
        sum[size_t(c)] += d * d;
      }
    }
    for (double& v : sum)
      v /= double(from.size());
    return sum;
  };
  const auto forward = directional(ref, deg);
  const auto backward = directional(deg, ref);
  return {std::max(forward[0], backward[0]), std::max(forward[1], backward[1]),
          std::max(forward[2], backward[2])};
}

double
colorPsnr(double mse)
{
  if (mse <= 0)
    return std::numeric_limits<double>::infinity();
  return 10 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace ompc
