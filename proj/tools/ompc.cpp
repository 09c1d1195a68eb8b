#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ompc/container.h"
#include "ompc/errors.h"
#include "ompc/eval.h"
#include "ompc/experiment.h"
#include "ompc/metrics.h"
#include "ompc/ply_io.h"
#include "ompc/pnm_io.h"

namespace fs = std::filesystem;
using namespace ompc;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitCorrupt = 3;
constexpr int kExitFailedCells = 1;

struct Globals {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> output;
  std::optional<std::string> masking;
  bool quiet = false;
};

std::string
frameName(const char* stem, size_t i, const char* ext)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03zu.%s", stem, i, ext);
  return buf;
}

std::string
fmtDb(double v)
{
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

ExperimentConfig
baseConfig(const Globals& g)
{
  ExperimentConfig c;
  if (!g.config.empty())
    c = loadExperimentConfig(g.config);
  if (g.seed) {
    c.seed = *g.seed;
    for (SequenceSource& s : c.sequences)
      if (s.inheritsSeed)
        s.seed = *g.seed;
  }
  if (g.workers) {
    if (*g.workers < 1)
      throw DomainError("--workers must be at least 1");
    c.workers = *g.workers;
  }
  if (g.output)
    c.outputDir = *g.output;
  if (g.masking)
    c.masking = {*g.masking == "on"};
  return c;
}

fs::path
outputDir(const Globals& g)
{
  const fs::path dir = g.output ? fs::path(*g.output) : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create " + dir.string());
  return dir;
}

// Every argument is a .ply file or a directory whose *.ply files are taken in
// name order.
std::vector<fs::path>
expandPlyInputs(const std::vector<std::string>& inputs)
{
  std::vector<fs::path> files;
  for (const std::string& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> dir;
      for (const auto& e : fs::directory_iterator(in))
        if (e.is_regular_file() && e.path().extension() == ".ply")
          dir.push_back(e.path());
      std::sort(dir.begin(), dir.end());
      if (dir.empty())
        throw DomainError("no .ply files in " + in);
      files.insert(files.end(), dir.begin(), dir.end());
    } else {
      files.emplace_back(in);
    }
  }
  if (files.empty())
    throw DomainError("no input clouds");
  return files;
}

std::vector<PointCloud>
loadClouds(const std::vector<std::string>& inputs)
{
  std::vector<PointCloud> clouds;
  int bitDepth = 8;
  for (const fs::path& f : expandPlyInputs(inputs)) {
    clouds.push_back(loadPly(f));
    bitDepth = std::max(bitDepth, clouds.back().bitDepth);
  }
  for (PointCloud& c : clouds)
    c.bitDepth = bitDepth;
  return clouds;
}

std::vector<uint8_t>
readFile(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

//============================================================================

int
cmdGenerate(const Globals& g, const std::string& kind, int frames, int points)
{
  const uint64_t seed = g.seed.value_or(1);
  const auto clouds = generateSequence(parseSequenceKind(kind), frames, seed, points);
  const fs::path dir = outputDir(g);
  for (size_t i = 0; i < clouds.size(); i++)
    savePly(clouds[i], dir / frameName(kind.c_str(), i, "ply"));
  if (!g.quiet)
    std::cerr << "wrote " << clouds.size() << " frames of " << kind << " to " << dir.string()
              << "\n";
  return 0;
}

int
cmdProject(const Globals& g, const std::string& input)
{
  const ExperimentConfig config = baseConfig(g);
  const PointCloud cloud = loadPly(input);
  const ProjectedFrame frame = projectCloud(cloud, config.projection);
  const fs::path dir = outputDir(g);
  writePgm(frame.frames.geometry.planes[0], dir / "geometry.pgm");
  writePpm(frame.frames.attribute, dir / "attribute.ppm");
  writePbm(frame.frames.occupancy, dir / "occupancy.pbm");

  std::ofstream patches(dir / "patches.csv");
  if (!patches)
    throw IoError("cannot write patches.csv");
  patches << "orientation,u0,v0,size_u,size_v,d0,shift_u,shift_v,shift_axis\n";
  for (const Patch& p : frame.patchSet.patches)
    patches << p.orientation << "," << p.u0 << "," << p.v0 << "," << p.sizeU << "," << p.sizeV
            << "," << p.d0 << "," << p.shiftU << "," << p.shiftV << "," << p.shiftAxis << "\n";

  size_t occupied = 0;
  for (uint8_t m : frame.frames.occupancy.values())
    occupied += m;
  if (!g.quiet)
    std::cerr << frame.patchSet.patches.size() << " patches, " << frame.patchSet.frameWidth << "x"
              << frame.patchSet.frameHeight << ", occupied " << occupied << " px, lost "
              << frame.lostPoints << " points\n";
  return 0;
}

struct EncodeArgs {
  std::vector<std::string> inputs;
  std::string bitstream;
  std::optional<int> qpGeometry;
  std::optional<int> qpAttribute;
  bool ippp = false;
  bool noSao = false;
  std::optional<std::string> padding;
};

int
cmdEncode(const Globals& g, const EncodeArgs& a)
{
  ExperimentConfig config = baseConfig(g);
  if (a.padding)
    config.projection.padding = *a.padding == "dilate" ? PaddingMode::Dilate : PaddingMode::None;

  CodingOptions opts;
  opts.qpGeometry = a.qpGeometry.value_or(config.qpGeometry.front());
  opts.qpAttribute = a.qpAttribute.value_or(
    config.qpAttribute.empty() ? std::min(51, opts.qpGeometry + config.attributeQpOffset)
                               : config.qpAttribute.front());
  opts.masking = g.masking.value_or("off") == "on";
  opts.inter = a.ippp;
  opts.sao = config.sao && !a.noSao;

  const auto clouds = loadClouds(a.inputs);
  const auto projected = projectSequence(clouds, config.projection);
  const EncodedSequence enc = encodeSequence(projected, opts);

  const fs::path path = a.bitstream.empty() ? outputDir(g) / "stream.ompc" : fs::path(a.bitstream);
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(enc.container.data()), std::streamsize(enc.container.size()));
  out.close();
  if (!out)
    throw IoError("cannot write " + path.string());

  for (size_t i = 0; i < enc.frames.size(); i++) {
    const FrameBytes& f = enc.frames[i];
    std::cerr << "frame " << i << ": patches " << 8 * f.patchTable << " bits, occupancy "
              << 8 * f.occupancy << " bits, geometry " << 8 * f.geometry << " bits, attribute "
              << 8 * f.attribute << " bits\n";
  }
  if (!g.quiet)
    std::cerr << "wrote " << enc.container.size() << " bytes to " << path.string() << "\n";
  return 0;
}

int
cmdDecode(const Globals& g, const std::string& input)
{
  const std::vector<uint8_t> bytes = readFile(input);
  // Decode everything before writing so that a corrupt stream leaves no output.
  const DecodedSequence seq = decodeSequence(bytes);
  const fs::path dir = outputDir(g);
  for (size_t i = 0; i < seq.frames.size(); i++) {
    const DecodedFrame& f = seq.frames[i];
    savePly(f.cloud, dir / frameName("frame", i, "ply"));
    writePgm(f.geometry.planes[0], dir / frameName("geometry", i, "pgm"));
    writePpm(f.attribute, dir / frameName("attribute", i, "ppm"));
    writePbm(f.blockMask, dir / frameName("occupancy", i, "pbm"));
  }
  if (!g.quiet)
    std::cerr << "decoded " << seq.frames.size() << " frames (" << seq.width << "x" << seq.height
              << ", masking " << ((seq.flags & kFlagMasking) ? "on" : "off") << ")\n";
  return 0;
}

int
cmdMetrics(const Globals& g, const std::string& refInput, const std::string& degInput)
{
  const ExperimentConfig config = baseConfig(g);
  const auto refFiles = expandPlyInputs({refInput});
  const auto degFiles = expandPlyInputs({degInput});
  if (refFiles.size() != degFiles.size())
    throw DomainError("reference has " + std::to_string(refFiles.size())
                      + " frames, degraded has " + std::to_string(degFiles.size()));

  std::ostringstream csv;
  csv << "frame,d1_mse,d1_db,d2_mse,d2_db,y_db,cb_db,cr_db\n";
  double d1Sum = 0, d2Sum = 0;
  std::array<double, 3> colorSum{};
  bool colors = true;
  int bitDepth = 8;
  for (size_t i = 0; i < refFiles.size(); i++) {
    PointCloud ref = loadPly(refFiles[i]);
    PointCloud deg = loadPly(degFiles[i]);
    bitDepth = std::max({bitDepth, ref.bitDepth, deg.bitDepth});
    const int depth = std::max(ref.bitDepth, deg.bitDepth);
    const double d1 = d1Mse(ref, deg);
    const double d2 = d2Mse(ref, deg, estimateNormals(ref, config.metricNeighbors));
    d1Sum += d1;
    d2Sum += d2;
    csv << i << "," << d1 << "," << fmtDb(geometryPsnr(d1, depth)) << "," << d2 << ","
        << fmtDb(geometryPsnr(d2, depth));
    if (ref.hasColors() && deg.hasColors()) {
      const auto c = colorMse(ref, deg);
      for (int k = 0; k < 3; k++) {
        colorSum[size_t(k)] += c[size_t(k)];
        csv << "," << fmtDb(colorPsnr(c[size_t(k)]));
      }
    } else {
      colors = false;
      csv << ",,,";
    }
    csv << "\n";
  }
  const double n = double(refFiles.size());
  csv << "mean," << d1Sum / n << "," << fmtDb(geometryPsnr(d1Sum / n, bitDepth)) << ","
      << d2Sum / n << "," << fmtDb(geometryPsnr(d2Sum / n, bitDepth));
  for (int k = 0; k < 3; k++)
    csv << "," << (colors ? fmtDb(colorPsnr(colorSum[size_t(k)] / n)) : "");
  csv << "\n";

  if (g.output) {
    const fs::path path = outputDir(g) / "metrics.csv";
    std::ofstream out(path);
    if (!(out << csv.str()))
      throw IoError("cannot write " + path.string());
  } else {
    std::cout << csv.str();
  }
  return 0;
}

int
cmdExperiment(const Globals& g)
{
  if (g.config.empty())
    throw DomainError("experiment needs --config");
  const ExperimentConfig config = baseConfig(g);
  // fail before the long run, not after it
  fs::create_directories(config.outputDir);
  const ExperimentResult result = runExperiment(config, g.quiet ? nullptr : &std::cerr);
  writeExperimentOutputs(config, result);
  if (!g.quiet) {
    for (const BdRateRow& r : result.bdRates)
      std::cerr << "BD-rate " << r.sequence << " " << r.config << " " << r.metric << ": "
                << (r.ok ? fmtDb(r.percent) + " %" : std::string("n/a")) << "\n";
  }
  for (const CellResult& c : result.cells)
    if (!c.ok)
      std::cerr << "failed: " << c.sequence << " " << c.config << " qp " << c.qpGeometry << ": "
                << c.error << "\n";
  return result.allOk() ? 0 : kExitFailedCells;
}

int
cmdBdrate(const Globals& g, const std::string& resultsPath, bool plots)
{
  const std::vector<CellResult> cells = readResultsCsv(resultsPath);
  const std::vector<BdRateRow> rows = computeBdRates(cells);
  if (g.output) {
    const fs::path dir = outputDir(g);
    writeBdRateCsv((dir / "bdrate.csv").string(), rows);
    if (plots)
      writeRdPlots(dir.string(), cells);
  }
  std::cout << "sequence,config,metric,bd_rate_percent\n";
  for (const BdRateRow& r : rows)
    std::cout << r.sequence << "," << r.config << "," << r.metric << ","
              << (r.ok ? fmtDb(r.percent) : std::string("n/a")) << "\n";
  return 0;
}

}  // namespace

int
main(int argc, char** argv)
{
  CLI::App app{"ompc: projection-based point cloud codec with occupancy-aware RDO"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON experiment/coding config")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--workers", g.workers, "worker threads for experiments");
  app.add_option("--output", g.output, "output directory");
  app.add_option("--masking", g.masking, "occupancy-masked RDO")
    ->check(CLI::IsMember({"on", "off"}));
  app.add_flag("--quiet", g.quiet, "suppress progress output");

  std::string kind = "orbit";
  int frames = 8, points = 0;
  auto* generate = app.add_subcommand("generate", "write a synthetic sequence as PLY files");
  generate->add_option("--kind", kind)->check(CLI::IsMember({"sphere", "torus", "blobs", "orbit"}));
  generate->add_option("--frames", frames)->check(CLI::Range(1, 65535));
  generate->add_option("--points", points, "points per frame, 0 for dense surfaces")
    ->check(CLI::NonNegativeNumber);

  std::string projectInput;
  auto* project = app.add_subcommand("project", "project one cloud and dump its frames");
  project->add_option("input", projectInput)->required();

  EncodeArgs enc;
  auto* encode = app.add_subcommand("encode", "encode PLY frames into a container");
  encode->add_option("inputs", enc.inputs, "PLY files or directories")->required();
  encode->add_option("-b,--bitstream", enc.bitstream, "container path (default <output>/stream.ompc)");
  encode->add_option("--qp-geometry", enc.qpGeometry)->check(CLI::Range(0, 51));
  encode->add_option("--qp-attribute", enc.qpAttribute)->check(CLI::Range(0, 51));
  encode->add_flag("--ippp", enc.ippp, "inter-code every frame after the first");
  encode->add_flag("--no-sao", enc.noSao);
  encode->add_option("--padding", enc.padding)->check(CLI::IsMember({"none", "dilate"}));

  std::string decodeInput;
  auto* decode = app.add_subcommand("decode", "decode a container to PLY files and frame dumps");
  decode->add_option("input", decodeInput)->required();

  std::string refInput, degInput;
  auto* metrics = app.add_subcommand("metrics", "D1/D2/colour PSNR between two PLY sequences");
  metrics->add_option("reference", refInput)->required();
  metrics->add_option("degraded", degInput)->required();

  auto* experiment = app.add_subcommand("experiment", "run the baseline vs masked experiment");

  std::string resultsPath = "results/results.csv";
  bool plots = false;
  auto* bdrate = app.add_subcommand("bdrate", "BD-rates from a results.csv");
  bdrate->add_option("results", resultsPath);
  bdrate->add_flag("--plots", plots, "also write RD plots to --output");

  for (CLI::App* sub : {generate, project, encode, decode, metrics, experiment, bdrate})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*generate)
      return cmdGenerate(g, kind, frames, points);
    if (*project)
      return cmdProject(g, projectInput);
    if (*encode)
      return cmdEncode(g, enc);
    if (*decode)
      return cmdDecode(g, decodeInput);
    if (*metrics)
      return cmdMetrics(g, refInput, degInput);
    if (*experiment)
      return cmdExperiment(g);
    if (*bdrate)
      return cmdBdrate(g, resultsPath, plots);
  } catch (const DecodeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCorrupt;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const SplitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
