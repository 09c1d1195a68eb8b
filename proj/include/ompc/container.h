#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ompc/codec/encoder.h"
#include "ompc/occupancy.h"
#include "ompc/projection.h"

namespace ompc {

constexpr uint8_t kContainerVersion = 1;
constexpr uint8_t kFlagMasking = 1;
constexpr uint8_t kFlagInter = 2;
// Offset of the informational flags byte.
constexpr size_t kContainerFlagsOffset = 5;

struct CodingOptions {
  int qpGeometry = 32;
  int qpAttribute = 37;
  bool masking = false;
  bool inter = false;  // IPPP when set, all intra otherwise
  bool sao = true;
  // Replace the RDO mask with an all-ones mask while still transmitting the
  // real occupancy (used for the mask-off equivalence check).
  bool fullRdoMask = false;
};

struct FrameBytes {
  size_t patchTable = 0;
  size_t occupancy = 0;
  size_t geometry = 0;
  size_t attribute = 0;
  size_t lengthFields = 0;
};

struct EncodedSequence {
  std::vector<uint8_t> container;
  size_t headerBytes = 0;
  std::vector<FrameBytes> frames;
  // Encoder-side reconstructions, for fidelity checks.
  std::vector<Picture> geometryRecon;
  std::vector<Picture> attributeRecon;
  std::vector<Mask> blockMasks;  // block-precision occupancy at pixel resolution
  std::vector<codec::FrameEncodeStats> geometryStats;
  std::vector<codec::FrameEncodeStats> attributeStats;
};

// Encodes projected frames of equal size into one container.
EncodedSequence encodeSequence(const std::vector<ProjectedFrame>& frames,
                               const CodingOptions& options);

struct DecodedFrame {
  PatchSet patchSet;
  BlockOccupancy occupancy;
  Mask blockMask;
  Picture geometry;
  Picture attribute;
  PointCloud cloud;
};

struct DecodedSequence {
  uint8_t flags = 0;
  int width = 0;
  int height = 0;
  int qpGeometry = 0;
  int qpAttribute = 0;
  int bitDepth = 8;
  std::vector<DecodedFrame> frames;
};

// Throws DecodeError for anything malformed.
DecodedSequence decodeSequence(std::span<const uint8_t> container);

}  // namespace ompc
