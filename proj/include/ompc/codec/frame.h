#pragma once

#include <vector>

#include "ompc/codec/common.h"
#include "ompc/codec/intra_pred.h"
#include "ompc/image.h"

namespace ompc::codec {

constexpr int kMotionUnit = 8;

// Per 8x8 unit record of the final coding decision, used for merge
// candidates, intra MPM derivation and skip-flag contexts.
struct MotionUnit {
  bool inter = false;
  bool skip = false;
  Mv mv;
  uint8_t intraMode = kIntraDc;

  friend bool operator==(const MotionUnit&, const MotionUnit&) = default;
};

class MotionField {
public:
  MotionField() = default;
  MotionField(int width, int height)
    : unitsWide_(width / kMotionUnit), unitsHigh_(height / kMotionUnit),
      units_(size_t(unitsWide_) * size_t(unitsHigh_))
  {}

  int unitsWide() const { return unitsWide_; }
  int unitsHigh() const { return unitsHigh_; }

  // nullptr outside the picture.
  const MotionUnit* atPixel(int x, int y) const
  {
    if (x < 0 || y < 0)
      return nullptr;
    const int ux = x / kMotionUnit, uy = y / kMotionUnit;
    if (ux >= unitsWide_ || uy >= unitsHigh_)
      return nullptr;
    return &units_[size_t(uy) * unitsWide_ + ux];
  }

  void fill(int x, int y, int size, const MotionUnit& unit)
  {
    for (int uy = y / kMotionUnit; uy < (y + size) / kMotionUnit; uy++)
      for (int ux = x / kMotionUnit; ux < (x + size) / kMotionUnit; ux++)
        units_[size_t(uy) * unitsWide_ + ux] = unit;
  }

  // Copies the units of a square region between fields of equal size.
  void copyRegion(const MotionField& from, int x, int y, int size)
  {
    for (int uy = y / kMotionUnit; uy < (y + size) / kMotionUnit; uy++)
      for (int ux = x / kMotionUnit; ux < (x + size) / kMotionUnit; ux++)
        units_[size_t(uy) * unitsWide_ + ux] = from.units_[size_t(uy) * unitsWide_ + ux];
  }

  friend bool operator==(const MotionField&, const MotionField&) = default;

private:
  int unitsWide_ = 0;
  int unitsHigh_ = 0;
  std::vector<MotionUnit> units_;
};

// A decoded picture as seen by later frames.
struct ReferenceFrame {
  Picture recon;
  MotionField motion;
};

}  // namespace ompc::codec
