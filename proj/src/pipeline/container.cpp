#include "ompc/container.h"

#include <cstring>

#include "ompc/errors.h"

namespace ompc {

namespace {

  constexpr char kMagic[4] = {'O', 'M', 'P', 'C'};

  class ByteWriter {
  public:
    explicit ByteWriter(std::vector<uint8_t>& out) : out_(out) {}

    void u8(int v) { out_.push_back(uint8_t(v)); }
    void u16(int v)
    {
      if (v < 0 || v > 0xFFFF)
        throw DomainError("value does not fit a 16-bit container field");
      out_.push_back(uint8_t(v));
      out_.push_back(uint8_t(v >> 8));
    }
    void u32(size_t v)
    {
      if (v > 0xFFFFFFFFu)
        throw DomainError("payload too large");
      for (int i = 0; i < 4; i++)
        out_.push_back(uint8_t(v >> (8 * i)));
    }
    void bytes(std::span<const uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
    size_t size() const { return out_.size(); }

  private:
    std::vector<uint8_t>& out_;
  };

  class ByteReader {
  public:
    explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

    int u8() { return take(1)[0]; }
    int u16()
    {
      const auto b = take(2);
      return b[0] | b[1] << 8;
    }
    uint32_t u32()
    {
      const auto b = take(4);
      return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
    }
    std::span<const uint8_t> take(size_t n)
    {
      if (n > data_.size() - pos_)
        throw DecodeError("container truncated");
      const auto s = data_.subspan(pos_, n);
      pos_ += n;
      return s;
    }
    bool atEnd() const { return pos_ == data_.size(); }

  private:
    std::span<const uint8_t> data_;
    size_t pos_ = 0;
  };

  void writePatchTable(ByteWriter& w, const PatchSet& ps)
  {
    w.u16(int(ps.patches.size()));
    for (const Patch& p : ps.patches) {
      w.u8(p.orientation);
      for (int v : {p.u0, p.v0, p.sizeU, p.sizeV, p.d0, p.shiftU, p.shiftV, p.shiftAxis})
        w.u16(v);
    }
  }

  PatchSet readPatchTable(ByteReader& r, int width, int height)
  {
    PatchSet ps;
    ps.frameWidth = width;
    ps.frameHeight = height;
    const int count = r.u16();
    for (int i = 0; i < count; i++) {
      Patch p;
      p.orientation = r.u8();
      p.u0 = r.u16();
      p.v0 = r.u16();
      p.sizeU = r.u16();
      p.sizeV = r.u16();
      p.d0 = r.u16();
      p.shiftU = r.u16();
      p.shiftV = r.u16();
      p.shiftAxis = r.u16();
      if (p.orientation >= kNumOrientations || p.u0 + p.sizeU > width || p.v0 + p.sizeV > height)
        throw DecodeError("patch outside the frame");
      ps.patches.push_back(p);
    }
    return ps;
  }

}  // namespace

EncodedSequence
encodeSequence(const std::vector<ProjectedFrame>& frames, const CodingOptions& options)
{
  if (frames.empty())
    throw DomainError("no frames to encode");
  const int width = frames[0].patchSet.frameWidth;
  const int height = frames[0].patchSet.frameHeight;
  const int bitDepth = frames[0].bitDepth;
  for (const ProjectedFrame& f : frames)
    if (f.patchSet.frameWidth != width || f.patchSet.frameHeight != height
        || f.bitDepth != bitDepth)
      throw DomainError("frames differ in size or bit depth");
  for (int qp : {options.qpGeometry, options.qpAttribute})
    if (qp < 0 || qp > codec::kMaxQp)
      throw DomainError("qp out of range");

  EncodedSequence out;
  ByteWriter w(out.container);
  w.bytes({reinterpret_cast<const uint8_t*>(kMagic), 4});
  w.u8(kContainerVersion);
  w.u8((options.masking ? kFlagMasking : 0) | (options.inter ? kFlagInter : 0));
  w.u16(int(frames.size()));
  w.u16(width);
  w.u16(height);
  w.u8(options.qpGeometry);
  w.u8(options.qpAttribute);
  w.u8(bitDepth);
  out.headerBytes = w.size();

  const Mask allOnes(width, height, 1);
  const codec::ReferenceFrame* geomRef = nullptr;
  const codec::ReferenceFrame* attrRef = nullptr;
  codec::ReferenceFrame prevGeom, prevAttr;

  for (size_t i = 0; i < frames.size(); i++) {
    const ProjectedFrame& f = frames[i];
    FrameBytes bytes;

    size_t mark = w.size();
    writePatchTable(w, f.patchSet);
    bytes.patchTable = w.size() - mark;

    const BlockOccupancy occ = downsampleOccupancy(f.frames.occupancy);
    const std::vector<uint8_t> occPayload = encodeBlockOccupancy(occ);
    out.blockMasks.push_back(upsampleOccupancy(occ));
    const Mask& rdoMask = options.fullRdoMask ? allOnes : out.blockMasks.back();

    codec::EncoderConfig geomCfg{options.qpGeometry, options.sao, options.masking};
    codec::EncoderConfig attrCfg{options.qpAttribute, options.sao, options.masking};
    codec::EncodedFrame geom = codec::encodeFrame(f.frames.geometry, geomCfg, rdoMask, geomRef);
    codec::EncodedFrame attr = codec::encodeFrame(f.frames.attribute, attrCfg, rdoMask, attrRef);

    w.u32(occPayload.size());
    w.bytes(occPayload);
    w.u32(geom.segment.size());
    w.bytes(geom.segment);
    w.u32(attr.segment.size());
    w.bytes(attr.segment);
    bytes.occupancy = occPayload.size();
    bytes.geometry = geom.segment.size();
    bytes.attribute = attr.segment.size();
    bytes.lengthFields = 12;
    out.frames.push_back(bytes);

    out.geometryRecon.push_back(geom.reconstruction.recon);
    out.attributeRecon.push_back(attr.reconstruction.recon);
    out.geometryStats.push_back(geom.stats);
    out.attributeStats.push_back(attr.stats);
    if (options.inter) {
      prevGeom = std::move(geom.reconstruction);
      prevAttr = std::move(attr.reconstruction);
      geomRef = &prevGeom;
      attrRef = &prevAttr;
    }
  }
  return out;
}

DecodedSequence
decodeSequence(std::span<const uint8_t> container)
{
  ByteReader r(container);
  if (std::memcmp(r.take(4).data(), kMagic, 4) != 0)
    throw DecodeError("not an OMPC container");
  const int version = r.u8();
  if (version != kContainerVersion)
    throw DecodeError("unsupported version " + std::to_string(version));

  DecodedSequence seq;
  seq.flags = uint8_t(r.u8());
  const int numFrames = r.u16();
  seq.width = r.u16();
  seq.height = r.u16();
  seq.qpGeometry = r.u8();
  seq.qpAttribute = r.u8();
  seq.bitDepth = r.u8();
  if (seq.bitDepth < 8 || seq.bitDepth > 16)
    throw DecodeError("unsupported bit depth");
  if (seq.width <= 0 || seq.height <= 0 || seq.width % codec::kCtuSize
      || seq.height % codec::kCtuSize)
    throw DecodeError("frame dimensions must be positive multiples of 64");

  const codec::ReferenceFrame* geomRef = nullptr;
  const codec::ReferenceFrame* attrRef = nullptr;
  codec::ReferenceFrame prevGeom, prevAttr;
  for (int i = 0; i < numFrames; i++) {
    DecodedFrame f;
    f.patchSet = readPatchTable(r, seq.width, seq.height);
    const auto occPayload = r.take(r.u32());
    // Check the declared map size before anything is allocated for it.
    if (occPayload.size() < 4
        || (occPayload[0] | occPayload[1] << 8) * kOccupancyBlock != seq.width
        || (occPayload[2] | occPayload[3] << 8) * kOccupancyBlock != seq.height)
      throw DecodeError("occupancy map does not match the frame size");
    f.occupancy = decodeBlockOccupancy(occPayload);
    f.blockMask = upsampleOccupancy(f.occupancy);

    codec::ReferenceFrame geom =
      codec::decodeFrame(r.take(r.u32()), 1, seq.width, seq.height, geomRef);
    codec::ReferenceFrame attr =
      codec::decodeFrame(r.take(r.u32()), 3, seq.width, seq.height, attrRef);
    f.geometry = geom.recon;
    f.attribute = attr.recon;
    try {
      f.cloud = reconstructCloud(f.geometry, f.blockMask, f.patchSet, &f.attribute, seq.bitDepth);
    } catch (const ConsistencyError& e) {
      throw DecodeError(e.what());
    }
    prevGeom = std::move(geom);
    prevAttr = std::move(attr);
    geomRef = &prevGeom;
    attrRef = &prevAttr;
    seq.frames.push_back(std::move(f));
  }
  if (!r.atEnd())
    throw DecodeError("trailing bytes after the last frame");
  return seq;
}

}  // namespace ompc
