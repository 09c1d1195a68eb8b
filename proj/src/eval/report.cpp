#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ompc/errors.h"
#include "ompc/experiment.h"

namespace ompc {

namespace fs = std::filesystem;

namespace {

  const char* kCsvHeader = "sequence,config,masking,qp_geom,qp_attr,bits_geom,bits_attr,bits_occ,"
                           "d1_db,d2_db,y_db,cb_db,cr_db,enc_ms,dec_ms,geom_db,status";

  std::string fmt(double v, int decimals = 4)
  {
    if (std::isinf(v))
      return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
  }

  double parseDouble(const std::string& s)
  {
    if (s == "inf")
      return INFINITY;
    if (s == "-inf")
      return -INFINITY;
    try {
      size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size())
        throw DomainError("bad number");
      return v;
    } catch (const std::exception&) {
      throw DomainError("bad number '" + s + "'");
    }
  }

  std::string sanitize(std::string s)
  {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
  }

  std::ofstream openOut(const std::string& path)
  {
    std::ofstream out(path);
    if (!out)
      throw IoError("cannot write " + path);
    return out;
  }

  //==========================================================================

  struct Series {
    std::string name;
    std::string color;
    std::vector<std::pair<double, double>> points;
  };

  void writeSvg(const std::string& path, const std::string& title, const std::string& xLabel,
                const std::string& yLabel, const std::vector<Series>& series)
  {
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const Series& s : series)
      for (auto [x, y] : s.points) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
    if (!(x1 >= x0)) {
      x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    }
    if (x1 == x0)
      x1 = x0 + 1;
    if (y1 == y0)
      y1 = y0 + 1;
    const double padX = (x1 - x0) * 0.05, padY = (y1 - y0) * 0.08;
    x0 -= padX, x1 += padX, y0 -= padY, y1 += padY;

    const double w = 560, h = 400, left = 70, right = 20, top = 40, bottom = 55;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (w - left - right); };
    auto py = [&](double y) { return h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom); };

    std::ofstream out = openOut(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
        << "</text>\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w - left - right
        << "\" height=\"" << h - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; i++) {
      const double xv = x0 + (x1 - x0) * i / 5, yv = y0 + (y1 - y0) * i / 5;
      out << "<line x1=\"" << px(xv) << "\" y1=\"" << h - bottom << "\" x2=\"" << px(xv)
          << "\" y2=\"" << h - bottom + 5 << "\" stroke=\"black\"/>\n";
      out << "<text x=\"" << px(xv) << "\" y=\"" << h - bottom + 18
          << "\" text-anchor=\"middle\">" << fmt(xv, 1) << "</text>\n";
      out << "<line x1=\"" << left - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << left
          << "\" y2=\"" << py(yv) << "\" stroke=\"black\"/>\n";
      out << "<text x=\"" << left - 8 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
          << fmt(yv, 2) << "</text>\n";
    }
    out << "<text x=\"" << (left + w - right) / 2 << "\" y=\"" << h - 12
        << "\" text-anchor=\"middle\">" << xLabel << "</text>\n";
    out << "<text transform=\"translate(16," << (top + h - bottom) / 2
        << ") rotate(-90)\" text-anchor=\"middle\">" << yLabel << "</text>\n";

    for (size_t i = 0; i < series.size(); i++) {
      const Series& s = series[i];
      out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
      for (auto [x, y] : s.points)
        out << px(x) << "," << py(y) << " ";
      out << "\"/>\n";
      for (auto [x, y] : s.points)
        out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << s.color
            << "\"/>\n";
      const double ly = top + 18 + 18 * double(i);
      out << "<line x1=\"" << w - right - 150 << "\" y1=\"" << h - bottom - 60 + ly - top
          << "\" x2=\"" << w - right - 125 << "\" y2=\"" << h - bottom - 60 + ly - top
          << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
      out << "<text x=\"" << w - right - 118 << "\" y=\"" << h - bottom - 56 + ly - top << "\">"
          << s.name << "</text>\n";
    }
    out << "</svg>\n";
  }

}  // namespace

void
writeResultsCsv(const std::string& path, const std::vector<CellResult>& cells)
{
  std::ofstream out = openOut(path);
  out << kCsvHeader << "\n";
  for (const CellResult& c : cells) {
    out << c.sequence << "," << c.config << "," << (c.masking ? "on" : "off") << ","
        << c.qpGeometry << "," << c.qpAttribute << "," << c.bitsGeometry << ","
        << c.bitsAttribute << "," << c.bitsOccupancy << "," << fmt(c.d1Db) << "," << fmt(c.d2Db)
        << "," << fmt(c.yDb) << "," << fmt(c.cbDb) << "," << fmt(c.crDb) << "," << fmt(c.encMs, 1)
        << "," << fmt(c.decMs, 1) << "," << fmt(c.geomDb) << ","
        << (c.ok ? std::string("ok") : "failed: " + sanitize(c.error)) << "\n";
  }
}

std::vector<CellResult>
readResultsCsv(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw ParseError("unexpected results header", 1);
  std::vector<CellResult> cells;
  int lineNo = 1;
  while (std::getline(in, line)) {
    lineNo++;
    if (line.empty())
      continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ','))
      f.push_back(field);
    if (f.size() != 17)
      throw ParseError("expected 17 fields", lineNo);
    try {
      CellResult c;
      c.sequence = f[0];
      c.config = f[1];
      c.masking = f[2] == "on";
      c.qpGeometry = std::stoi(f[3]);
      c.qpAttribute = std::stoi(f[4]);
      c.bitsGeometry = std::stoull(f[5]);
      c.bitsAttribute = std::stoull(f[6]);
      c.bitsOccupancy = std::stoull(f[7]);
      c.d1Db = parseDouble(f[8]);
      c.d2Db = parseDouble(f[9]);
      c.yDb = parseDouble(f[10]);
      c.cbDb = parseDouble(f[11]);
      c.crDb = parseDouble(f[12]);
      c.encMs = parseDouble(f[13]);
      c.decMs = parseDouble(f[14]);
      c.geomDb = parseDouble(f[15]);
      c.ok = f[16] == "ok";
      if (!c.ok)
        c.error = f[16];
      cells.push_back(c);
    } catch (const std::exception& e) {
      throw ParseError(e.what(), lineNo);
    }
  }
  return cells;
}

void
writeBdRateCsv(const std::string& path, const std::vector<BdRateRow>& rows)
{
  std::ofstream out = openOut(path);
  out << "sequence,config,metric,bd_rate_percent\n";
  for (const BdRateRow& r : rows)
    out << r.sequence << "," << r.config << "," << r.metric << ","
        << (r.ok ? fmt(r.percent) : std::string("n/a")) << "\n";
}

std::vector<std::string>
writeRdPlots(const std::string& dir, const std::vector<CellResult>& cells)
{
  std::map<std::pair<std::string, std::string>, std::vector<const CellResult*>> groups;
  for (const CellResult& c : cells)
    if (c.ok)
      groups[{c.sequence, c.config}].push_back(&c);

  struct Metric {
    const char* key;
    const char* label;
  };
  const Metric metrics[] = {{"geom", "geometry occupied PSNR (dB)"},
                            {"y", "Y occupied PSNR (dB)"},
                            {"d1", "D1 PSNR (dB)"},
                            {"d2", "D2 PSNR (dB)"}};
  std::vector<std::string> written;
  for (const auto& [key, group] : groups)
    for (const Metric& m : metrics) {
      std::vector<Series> series = {{"baseline", "#1f77b4", {}}, {"masked RDO", "#d62728", {}}};
      const std::string k = m.key;
      for (const CellResult* c : group) {
        const double bits = double(k == "y" ? c->bitsAttribute : c->bitsGeometry) / 1000.0;
        const double q = k == "geom" ? c->geomDb : k == "y" ? c->yDb : k == "d1" ? c->d1Db : c->d2Db;
        if (std::isfinite(q))
          series[c->masking].points.push_back({bits, q});
      }
      for (Series& s : series)
        std::sort(s.points.begin(), s.points.end());
      const std::string path =
        (fs::path(dir) / (key.first + "_" + key.second + "_" + k + ".svg")).string();
      writeSvg(path, key.first + " (" + key.second + ")",
               k == "y" ? "attribute kbit" : "geometry kbit", m.label, series);
      written.push_back(path);
    }
  return written;
}

void
writeExperimentOutputs(const ExperimentConfig& config, const ExperimentResult& result)
{
  std::error_code ec;
  fs::create_directories(config.outputDir, ec);
  if (ec)
    throw IoError("cannot create " + config.outputDir);
  writeResultsCsv((fs::path(config.outputDir) / "results.csv").string(), result.cells);
  writeBdRateCsv((fs::path(config.outputDir) / "bdrate.csv").string(), result.bdRates);
  writeRdPlots(config.outputDir, result.cells);
}

}  // namespace ompc
