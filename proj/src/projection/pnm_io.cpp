#include "ompc/pnm_io.h"

#include <fstream>

namespace ompc {

namespace {

  std::ofstream openBinary(const std::filesystem::path& path)
  {
    std::ofstream out(path, std::ios::binary);
    if (!out)
      throw IoError("cannot write " + path.string());
    return out;
  }

}  // namespace

void
writePgm(const Plane8& plane, const std::filesystem::path& path)
{
  auto out = openBinary(path);
  out << "P5\n" << plane.width() << ' ' << plane.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(plane.data()), std::streamsize(plane.size()));
}

void
writePpm(const Picture& picture, const std::filesystem::path& path)
{
  auto out = openBinary(path);
  out << "P6\n" << picture.width() << ' ' << picture.height() << "\n255\n";
  for (int y = 0; y < picture.height(); y++)
    for (int x = 0; x < picture.width(); x++)
      for (int c = 0; c < 3; c++) {
        const int p = std::min(c, picture.numPlanes() - 1);
        out.put(char(picture.planes[size_t(p)].at(x, y)));
      }
}

void
writePbm(const Mask& mask, const std::filesystem::path& path)
{
  auto out = openBinary(path);
  out << "P4\n" << mask.width() << ' ' << mask.height() << "\n";
  for (int y = 0; y < mask.height(); y++) {
    uint8_t acc = 0;
    int n = 0;
    for (int x = 0; x < mask.width(); x++) {
      acc = uint8_t(acc << 1 | (mask.at(x, y) ? 1 : 0));
      if (++n == 8) {
        out.put(char(acc));
        acc = 0;
        n = 0;
      }
    }
    if (n)
      out.put(char(acc << (8 - n)));
  }
}

}  // namespace ompc
