#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ompc/codec/frame.h"
#include "ompc/image.h"
#include "ompc/sao.h"

namespace ompc::codec {

enum class CuMode : uint8_t { Skip, Merge, Amvp, Intra };

struct EncoderConfig {
  int qp = 32;
  bool sao = true;
  // Weight distortion by the occupancy mask during mode decision and SAO.
  bool masking = false;
};

// One full-RDO evaluation. `index` is the merge index for skip/merge, the
// intra mode for intra, 0 for AMVP.
struct RdoCandidate {
  int x = 0, y = 0, size = 0;
  CuMode mode = CuMode::Intra;
  int index = 0;
  uint64_t fracBits = 0;
  int64_t distortion = 0;
  double cost = 0;
};

struct RdoTrace {
  std::vector<RdoCandidate> candidates;  // every evaluated candidate
  std::vector<RdoCandidate> chosen;      // final CUs in coding order
  std::vector<std::vector<int>> roughIntra;  // top modes per intra search
  std::vector<Mv> searchedMvs;               // motion search results
};

struct FrameEncodeStats {
  uint64_t predictedFracBits = 0;  // block layer, as estimated by RDO
  uint64_t committedFracBits = 0;  // block layer, as written
  int numCus = 0;
  int skipCus = 0;
  int mergeCus = 0;
  int amvpCus = 0;
  int intraCus = 0;
};

struct EncodedFrame {
  std::vector<uint8_t> segment;
  ReferenceFrame reconstruction;
  std::vector<sao::SaoParams> sao;  // CTU raster order x component
  FrameEncodeStats stats;
};

// Encodes one picture (dimensions multiples of 64). `occupancy` is the
// per-pixel mask used when config.masking is set. An intra frame is coded
// when `ref` is null.
EncodedFrame encodeFrame(const Picture& orig, const EncoderConfig& config, const Mask& occupancy,
                         const ReferenceFrame* ref, RdoTrace* trace = nullptr);

// Throws DecodeError on any malformed segment.
ReferenceFrame decodeFrame(std::span<const uint8_t> segment, int numPlanes, int width,
                           int height, const ReferenceFrame* ref);

}  // namespace ompc::codec
