#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "ompc/errors.h"

namespace ompc {

// Row-major single-channel raster.
template <typename T>
class Plane {
public:
  Plane() = default;
  Plane(int width, int height, T fill = T{})
    : width_(width), height_(height), data_(size_t(width) * size_t(height), fill)
  {
    if (width < 0 || height < 0)
      throw DomainError("negative plane dimensions");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  size_t size() const { return data_.size(); }

  T& at(int x, int y) { return data_[size_t(y) * width_ + x]; }
  const T& at(int x, int y) const { return data_[size_t(y) * width_ + x]; }

  std::span<T> row(int y) { return {data_.data() + size_t(y) * width_, size_t(width_)}; }
  std::span<const T> row(int y) const
  {
    return {data_.data() + size_t(y) * width_, size_t(width_)};
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

  bool sameSize(const Plane& other) const
  {
    return width_ == other.width_ && height_ == other.height_;
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  friend bool operator==(const Plane&, const Plane&) = default;

private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Plane8 = Plane<uint8_t>;

// Binary mask, one byte per pixel holding 0 or 1.
using Mask = Plane<uint8_t>;

// A picture of 1 (geometry) or 3 (YCbCr 4:4:4 attribute) planes.
struct Picture {
  std::vector<Plane8> planes;

  Picture() = default;
  Picture(int numPlanes, int width, int height, uint8_t fill = 0)
    : planes(size_t(numPlanes), Plane8(width, height, fill))
  {}

  int numPlanes() const { return int(planes.size()); }
  int width() const { return planes.empty() ? 0 : planes[0].width(); }
  int height() const { return planes.empty() ? 0 : planes[0].height(); }

  friend bool operator==(const Picture&, const Picture&) = default;
};

}  // namespace ompc
