#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ompc/eval.h"
#include "ompc/projection.h"

namespace ompc {

struct SequenceSource {
  std::string name;
  std::string kind = "orbit";  // a synthetic kind, or "ply"
  int frames = 8;
  uint64_t seed = 1;
  bool inheritsSeed = true;  // no per-sequence seed, follows the experiment seed
  int points = 0;
  std::string plyDirectory;
  int minFrameHeight = -1;  // -1: use the experiment-wide value
};

struct ExperimentConfig {
  std::vector<SequenceSource> sequences;
  std::vector<int> qpGeometry = {22, 27, 32, 37};
  std::vector<int> qpAttribute;  // empty: geometry QP + attributeQpOffset
  int attributeQpOffset = 5;
  bool allIntra = true;
  bool ippp = true;
  std::vector<bool> masking = {false, true};
  ProjectionOptions projection = [] {
    ProjectionOptions p;
    p.padding = PaddingMode::Dilate;  // the anchor pads; see README
    return p;
  }();
  bool sao = true;
  int metricNeighbors = 12;
  std::string outputDir = "results";
  uint64_t seed = 1;
  int workers = 1;
};

// Parses the JSON experiment document. Unknown keys and ill-typed values are
// rejected with InputError.
ExperimentConfig parseExperimentConfig(const std::string& text);
ExperimentConfig loadExperimentConfig(const std::string& path);

// Generates the synthetic sequence or loads the sorted *.ply files of the
// directory (at most `frames` of them).
std::vector<PointCloud> loadSequenceSource(const SequenceSource& source);

struct CellResult {
  std::string sequence;
  std::string config;  // "all_intra" or "ippp"
  bool masking = false;
  int qpGeometry = 0;
  int qpAttribute = 0;

  bool ok = false;
  std::string error;

  uint64_t bitsGeometry = 0;
  uint64_t bitsAttribute = 0;
  uint64_t bitsOccupancy = 0;  // occupancy maps and patch tables
  uint64_t bitsHeader = 0;     // container header and length fields
  uint64_t containerBytes = 0;

  double d1Db = 0;
  double d2Db = 0;
  double yDb = 0;
  double cbDb = 0;
  double crDb = 0;
  double geomDb = 0;  // occupied-pixel PSNR of the geometry frames

  double encMs = 0;
  double decMs = 0;

  bool reconMatches = false;
  bool rdoBitsExact = false;
};

struct BdRateRow {
  std::string sequence;
  std::string config;
  std::string metric;
  bool ok = false;
  double percent = 0;
};

struct ExperimentResult {
  std::vector<CellResult> cells;
  std::vector<BdRateRow> bdRates;

  bool allOk() const;
};

// Runs every sequence x config x QP x masking cell. Cells that throw are
// recorded as failed and the run continues. When `log` is set, one progress
// line per finished cell is written to it.
ExperimentResult runExperiment(const ExperimentConfig& config, std::ostream* log = nullptr);

// Masked-versus-baseline BD-rates per sequence and config for the metrics
// geom, y, d1 and d2.
std::vector<BdRateRow> computeBdRates(const std::vector<CellResult>& cells);

void writeResultsCsv(const std::string& path, const std::vector<CellResult>& cells);
std::vector<CellResult> readResultsCsv(const std::string& path);
void writeBdRateCsv(const std::string& path, const std::vector<BdRateRow>& rows);

// One SVG per sequence, config and metric, baseline and masked curves.
std::vector<std::string> writeRdPlots(const std::string& dir, const std::vector<CellResult>& cells);

// Writes results.csv, bdrate.csv and the plots below config.outputDir.
void writeExperimentOutputs(const ExperimentConfig& config, const ExperimentResult& result);

}  // namespace ompc
