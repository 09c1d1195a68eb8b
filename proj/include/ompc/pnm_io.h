#pragma once

#include <filesystem>

#include "ompc/image.h"

namespace ompc {

// Debug dumps: P5 for single planes, P6 for 3-plane pictures (planes written
// as interleaved channels), P4 for binary masks.
void writePgm(const Plane8& plane, const std::filesystem::path& path);
void writePpm(const Picture& picture, const std::filesystem::path& path);
void writePbm(const Mask& mask, const std::filesystem::path& path);

}  // namespace ompc
