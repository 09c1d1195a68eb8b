#pragma once

#include <array>
#include <vector>

#include "ompc/point_cloud.h"

namespace ompc {

struct NormalField {
  std::vector<std::array<double, 3>> normals;
  int k = 0;
};

// Per-point unit normal from the covariance of the point and its k nearest
// neighbours: eigenvector of the smallest eigenvalue, signed so that its
// largest-magnitude component is positive.
NormalField estimateNormals(const PointCloud& cloud, int k);

// Symmetric point-to-point error: max of the two directional mean squared
// nearest-neighbour distances.
double d1Mse(const PointCloud& ref, const PointCloud& deg);

// Symmetric point-to-plane error using normals of the reference cloud.
double d2Mse(const PointCloud& ref, const PointCloud& deg, const NormalField& refNormals);

// Per-channel Y, Cb, Cr mean squared error against the nearest neighbour
// colour, the worse of the two directions per channel. Both clouds need colours.
std::array<double, 3> colorMse(const PointCloud& ref, const PointCloud& deg);

// 10*log10(255^2/mse), +infinity for mse == 0.
double colorPsnr(double mse);

// 10*log10(3*p^2/mse), p = 2^bitDepth - 1. Returns +infinity for mse == 0.
double geometryPsnr(double mse, int bitDepth);

}  // namespace ompc
