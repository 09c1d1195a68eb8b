#include "ompc/experiment.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <tuple>
#include <mutex>
#include <ostream>
#include <thread>

#include "ompc/container.h"
#include "ompc/errors.h"
#include "ompc/metrics.h"
#include "ompc/ply_io.h"

namespace ompc {

namespace fs = std::filesystem;

std::vector<PointCloud>
loadSequenceSource(const SequenceSource& source)
{
  if (source.kind != "ply")
    return generateSequence(parseSequenceKind(source.kind), source.frames, source.seed,
                            source.points);

  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(source.plyDirectory, ec))
    if (entry.is_regular_file() && entry.path().extension() == ".ply")
      files.push_back(entry.path());
  if (ec)
    throw IoError("cannot read directory " + source.plyDirectory);
  if (files.empty())
    throw DomainError("no .ply files in " + source.plyDirectory);
  std::sort(files.begin(), files.end());
  if (int(files.size()) > source.frames)
    files.resize(size_t(source.frames));

  std::vector<PointCloud> clouds;
  int bitDepth = 8;
  for (const auto& f : files) {
    clouds.push_back(loadPly(f));
    bitDepth = std::max(bitDepth, clouds.back().bitDepth);
  }
  for (auto& c : clouds)
    c.bitDepth = bitDepth;
  return clouds;
}

namespace {

  struct PreparedSequence {
    std::string name;
    std::vector<PointCloud> clouds;
    std::vector<NormalField> normals;
    std::vector<ProjectedFrame> projected;
  };

  struct Job {
    size_t sequence = 0;
    bool inter = false;
    bool masking = false;
    int qpGeometry = 0;
    int qpAttribute = 0;
  };

  double elapsedMs(std::chrono::steady_clock::time_point since)
  {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
  }

  void runCell(const PreparedSequence& seq, const Job& job, bool sao, CellResult& cell)
  {
    CodingOptions opts;
    opts.qpGeometry = job.qpGeometry;
    opts.qpAttribute = job.qpAttribute;
    opts.masking = job.masking;
    opts.inter = job.inter;
    opts.sao = sao;

    auto t0 = std::chrono::steady_clock::now();
    const EncodedSequence enc = encodeSequence(seq.projected, opts);
    cell.encMs = elapsedMs(t0);
    t0 = std::chrono::steady_clock::now();
    const DecodedSequence dec = decodeSequence(enc.container);
    cell.decMs = elapsedMs(t0);

    cell.reconMatches = true;
    cell.rdoBitsExact = true;
    for (size_t i = 0; i < seq.projected.size(); i++) {
      cell.reconMatches &= dec.frames[i].geometry == enc.geometryRecon[i]
                           && dec.frames[i].attribute == enc.attributeRecon[i];
      for (const auto* s : {&enc.geometryStats[i], &enc.attributeStats[i]})
        cell.rdoBitsExact &= s->predictedFracBits == s->committedFracBits;
    }
    if (!cell.reconMatches)
      throw ConsistencyError("decoder output differs from the encoder reconstruction");

    cell.containerBytes = enc.container.size();
    uint64_t header = enc.headerBytes;
    for (const FrameBytes& b : enc.frames) {
      cell.bitsGeometry += 8 * b.geometry;
      cell.bitsAttribute += 8 * b.attribute;
      cell.bitsOccupancy += 8 * (b.occupancy + b.patchTable);
      header += b.lengthFields;
    }
    cell.bitsHeader = 8 * header;
    if (cell.bitsGeometry + cell.bitsAttribute + cell.bitsOccupancy + cell.bitsHeader
        != 8 * cell.containerBytes)
      throw ConsistencyError("section sizes do not add up to the container size");

    OccupiedError geomErr;
    std::array<OccupiedError, 3> attrErr;
    double d1 = 0, d2 = 0;
    for (size_t i = 0; i < seq.projected.size(); i++) {
      const FramePair& src = seq.projected[i].frames;
      const DecodedFrame& f = dec.frames[i];
      geomErr += occupiedError(src.geometry.planes[0], f.geometry.planes[0], f.blockMask);
      for (size_t c = 0; c < 3; c++)
        attrErr[c] += occupiedError(src.attribute.planes[c], f.attribute.planes[c], f.blockMask);
      if (f.cloud.empty())
        throw ConsistencyError("decoded frame has no points");
      d1 += d1Mse(seq.clouds[i], f.cloud);
      d2 += d2Mse(seq.clouds[i], f.cloud, seq.normals[i]);
    }
    const double n = double(seq.projected.size());
    const int bitDepth = seq.projected[0].bitDepth;
    cell.d1Db = geometryPsnr(d1 / n, bitDepth);
    cell.d2Db = geometryPsnr(d2 / n, bitDepth);
    cell.geomDb = psnrFromError(geomErr);
    cell.yDb = psnrFromError(attrErr[0]);
    cell.cbDb = psnrFromError(attrErr[1]);
    cell.crDb = psnrFromError(attrErr[2]);
    cell.ok = true;
  }

  bool cellOrder(const CellResult& a, const CellResult& b)
  {
    return std::tie(a.sequence, a.config, a.masking, a.qpGeometry, a.qpAttribute)
           < std::tie(b.sequence, b.config, b.masking, b.qpGeometry, b.qpAttribute);
  }

}  // namespace

bool
ExperimentResult::allOk() const
{
  return std::all_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.ok; });
}

ExperimentResult
runExperiment(const ExperimentConfig& config, std::ostream* log)
{
  std::vector<PreparedSequence> sequences;
  for (const SequenceSource& src : config.sequences) {
    PreparedSequence seq;
    seq.name = src.name;
    seq.clouds = loadSequenceSource(src);
    ProjectionOptions proj = config.projection;
    if (src.minFrameHeight >= 0)
      proj.minFrameHeight = src.minFrameHeight;
    seq.projected = projectSequence(seq.clouds, proj);
    for (const PointCloud& c : seq.clouds)
      seq.normals.push_back(estimateNormals(c, config.metricNeighbors));
    if (log)
      *log << "prepared " << seq.name << ": " << seq.clouds.size() << " frames, "
           << seq.projected[0].patchSet.frameWidth << "x" << seq.projected[0].patchSet.frameHeight
           << "\n";
    sequences.push_back(std::move(seq));
  }

  std::vector<Job> jobs;
  for (size_t s = 0; s < sequences.size(); s++)
    for (bool inter : {false, true}) {
      if ((inter && !config.ippp) || (!inter && !config.allIntra))
        continue;
      for (size_t q = 0; q < config.qpGeometry.size(); q++)
        for (bool masking : config.masking) {
          Job job;
          job.sequence = s;
          job.inter = inter;
          job.masking = masking;
          job.qpGeometry = config.qpGeometry[q];
          job.qpAttribute = config.qpAttribute.empty()
                              ? config.qpGeometry[q] + config.attributeQpOffset
                              : config.qpAttribute[q];
          jobs.push_back(job);
        }
    }

  ExperimentResult result;
  result.cells.resize(jobs.size());
  std::atomic<size_t> next{0};
  std::mutex logMutex;
  auto worker = [&] {
    for (size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      CellResult& cell = result.cells[i];
      cell.sequence = sequences[job.sequence].name;
      cell.config = job.inter ? "ippp" : "all_intra";
      cell.masking = job.masking;
      cell.qpGeometry = job.qpGeometry;
      cell.qpAttribute = job.qpAttribute;
      try {
        runCell(sequences[job.sequence], job, config.sao, cell);
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
      }
      if (log) {
        std::lock_guard lock(logMutex);
        *log << cell.sequence << " " << cell.config << " masking=" << (cell.masking ? "on" : "off")
             << " qp=" << cell.qpGeometry << "/" << cell.qpAttribute << ": "
             << (cell.ok ? "ok" : "FAILED " + cell.error) << "\n";
      }
    }
  };
  const size_t numThreads = std::min<size_t>(size_t(std::max(1, config.workers)), jobs.size());
  std::vector<std::thread> threads;
  for (size_t t = 1; t < numThreads; t++)
    threads.emplace_back(worker);
  worker();
  for (auto& t : threads)
    t.join();

  std::sort(result.cells.begin(), result.cells.end(), cellOrder);
  result.bdRates = computeBdRates(result.cells);
  return result;
}

std::vector<BdRateRow>
computeBdRates(const std::vector<CellResult>& cells)
{
  struct Key {
    std::string sequence, config;
    auto operator<=>(const Key&) const = default;
  };
  std::map<Key, std::array<std::vector<const CellResult*>, 2>> groups;
  for (const CellResult& c : cells)
    groups[{c.sequence, c.config}][c.masking].push_back(&c);

  std::vector<BdRateRow> rows;
  for (const auto& [key, arms] : groups) {
    for (const char* metric : {"geom", "y", "d1", "d2"}) {
      BdRateRow row{key.sequence, key.config, metric};
      auto curve = [&](const std::vector<const CellResult*>& arm) {
        RdCurve rd;
        for (const CellResult* c : arm) {
          if (!c->ok)
            throw DomainError("failed cell");
          const std::string m = metric;
          const double bits = double(m == "y" ? c->bitsAttribute : c->bitsGeometry);
          const double q = m == "geom" ? c->geomDb : m == "y" ? c->yDb : m == "d1" ? c->d1Db : c->d2Db;
          rd.push_back({bits, q});
        }
        return rd;
      };
      try {
        row.percent = bdRate(curve(arms[0]), curve(arms[1]));
        row.ok = true;
      } catch (const std::exception&) {
        row.ok = false;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace ompc
