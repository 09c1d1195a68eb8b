#include "ompc/ply_io.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ompc/errors.h"

namespace ompc {

namespace {

  struct Element {
    std::string name;
    long count = 0;
    std::vector<std::string> properties;
  };

  std::vector<std::string> tokenize(const std::string& line)
  {
    std::istringstream in(line);
    std::vector<std::string> tokens;
    std::string t;
    while (in >> t)
      tokens.push_back(t);
    return tokens;
  }

  int propertyIndex(const Element& e, const char* name)
  {
    for (size_t i = 0; i < e.properties.size(); i++)
      if (e.properties[i] == name)
        return int(i);
    return -1;
  }

}  // namespace

//============================================================================

PointCloud
loadPly(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path.string());

  std::string line;
  int lineNo = 0;
  auto nextLine = [&]() -> bool {
    if (!std::getline(in, line))
      return false;
    lineNo++;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    return true;
  };

  if (!nextLine() || line != "ply")
    throw ParseError("missing 'ply' magic", lineNo);

  std::vector<Element> elements;
  bool sawFormat = false;
  bool sawEnd = false;
  while (nextLine()) {
    auto tok = tokenize(line);
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info")
      continue;
    if (tok[0] == "format") {
      if (tok.size() != 3 || tok[1] != "ascii")
        throw ParseError("only 'format ascii 1.0' is supported", lineNo);
      sawFormat = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3)
        throw ParseError("malformed element line", lineNo);
      Element e;
      e.name = tok[1];
      try {
        e.count = std::stol(tok[2]);
      } catch (const std::exception&) {
        throw ParseError("bad element count", lineNo);
      }
      if (e.count < 0)
        throw ParseError("negative element count", lineNo);
      elements.push_back(std::move(e));
    } else if (tok[0] == "property") {
      if (elements.empty() || tok.size() < 3)
        throw ParseError("property outside element", lineNo);
      if (tok[1] == "list") {
        if (tok.size() != 5)
          throw ParseError("malformed list property", lineNo);
        elements.back().properties.push_back(tok[4]);
      } else {
        if (tok.size() != 3)
          throw ParseError("malformed property", lineNo);
        elements.back().properties.push_back(tok[2]);
      }
    } else if (tok[0] == "end_header") {
      sawEnd = true;
      break;
    } else {
      throw ParseError("unexpected header keyword '" + tok[0] + "'", lineNo);
    }
  }
  if (!sawFormat)
    throw ParseError("missing format line", lineNo);
  if (!sawEnd)
    throw ParseError("missing end_header", lineNo);

  const Element* vertex = nullptr;
  for (const auto& e : elements)
    if (e.name == "vertex")
      vertex = &e;
  if (!vertex)
    throw ParseError("no vertex element", lineNo);

  const int ix = propertyIndex(*vertex, "x");
  const int iy = propertyIndex(*vertex, "y");
  const int iz = propertyIndex(*vertex, "z");
  if (ix < 0 || iy < 0 || iz < 0)
    throw ParseError("vertex element lacks x, y or z", lineNo);
  const int ir = propertyIndex(*vertex, "red");
  const int ig = propertyIndex(*vertex, "green");
  const int ib = propertyIndex(*vertex, "blue");
  const bool colored = ir >= 0 && ig >= 0 && ib >= 0;

  PointCloud cloud;
  for (const auto& e : elements) {
    if (&e != vertex) {
      // Elements preceding the vertex list are skipped line by line.
      if (&e > vertex)
        break;
      for (long i = 0; i < e.count; i++)
        if (!nextLine())
          throw ParseError("unexpected end of file", lineNo);
      continue;
    }
    cloud.points.reserve(size_t(e.count));
    if (colored)
      cloud.colors.reserve(size_t(e.count));
    for (long i = 0; i < e.count; i++) {
      if (!nextLine())
        throw ParseError("unexpected end of file in vertex list", lineNo);
      auto tok = tokenize(line);
      if (tok.size() < e.properties.size())
        throw ParseError("too few values in vertex line", lineNo);
      auto number = [&](int idx) {
        try {
          size_t used = 0;
          double v = std::stod(tok[size_t(idx)], &used);
          if (used != tok[size_t(idx)].size() || !std::isfinite(v))
            throw ParseError("bad number '" + tok[size_t(idx)] + "'", lineNo);
          return v;
        } catch (const std::logic_error&) {
          throw ParseError("bad number '" + tok[size_t(idx)] + "'", lineNo);
        }
      };
      Point3 p;
      const int idx[3] = {ix, iy, iz};
      for (int a = 0; a < 3; a++) {
        const double v = std::round(number(idx[a]));
        if (v < 0)
          throw DomainError("negative coordinate at line " + std::to_string(lineNo));
        if (v > double(1 << 24))
          throw DomainError("coordinate too large at line " + std::to_string(lineNo));
        p[a] = int32_t(v);
      }
      cloud.points.push_back(p);
      if (colored) {
        auto channel = [&](int idx) {
          const double v = number(idx);
          if (v < 0 || v > 255)
            throw ParseError("color out of range", lineNo);
          return uint8_t(std::lround(v));
        };
        cloud.colors.push_back({channel(ir), channel(ig), channel(ib)});
      }
    }
  }

  removeDuplicatePoints(cloud);
  cloud.bitDepth = PointCloud::fittingBitDepth(cloud.points);
  return cloud;
}

//----------------------------------------------------------------------------

void
savePly(const PointCloud& cloud, const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot write " + path.string());

  const bool colored = cloud.hasColors();
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << cloud.size() << "\n";
  out << "property int x\nproperty int y\nproperty int z\n";
  if (colored)
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "end_header\n";
  for (size_t i = 0; i < cloud.size(); i++) {
    const auto& p = cloud.points[i];
    out << p.x << ' ' << p.y << ' ' << p.z;
    if (colored) {
      const auto& c = cloud.colors[i];
      out << ' ' << int(c.r) << ' ' << int(c.g) << ' ' << int(c.b);
    }
    out << '\n';
  }
  if (!out)
    throw IoError("write failed for " + path.string());
}

}  // namespace ompc
