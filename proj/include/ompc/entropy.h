#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ompc {

// Adaptive binary probability: 15-bit probability of a zero bin, updated by
// an exponential moving average with rate 1/32.
struct ContextModel {
  static constexpr int kProbBits = 15;
  static constexpr int kAdaptShift = 5;

  uint16_t probZero = 1 << (kProbBits - 1);

  void update(int bin)
  {
    if (bin)
      probZero -= probZero >> kAdaptShift;
    else
      probZero += ((1 << kProbBits) - probZero) >> kAdaptShift;
  }

  friend bool operator==(const ContextModel&, const ContextModel&) = default;
};

// Bit costs are measured in 1/32768 bit units.
constexpr uint32_t kFracBitsOne = 1u << 15;

uint32_t binCost(const ContextModel& ctx, int bin);

inline double fracToBits(uint64_t frac) { return double(frac) / double(kFracBitsOne); }

// Carry-propagating binary range encoder (LZMA style). Besides the byte
// stream it keeps the same fractional bit tally as BitCounter, which lets a
// rate-distortion search predict exactly what a committed decision costs.
class RangeEncoder {
public:
  void encodeBin(ContextModel& ctx, int bin);
  void encodeBypass(int bin);
  void encodeBypassBits(uint32_t value, int numBits);

  // Flushes the coder state; the encoder must not be used afterwards.
  std::vector<uint8_t> finish();

  uint64_t fracBits() const { return fracBits_; }

private:
  void shiftLow();
  void normalize();

  uint64_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint8_t cache_ = 0;
  uint64_t cacheSize_ = 1;
  std::vector<uint8_t> out_;
  uint64_t fracBits_ = 0;
};

// Rate-only stand-in for RangeEncoder: identical context evolution, no output.
class BitCounter {
public:
  void encodeBin(ContextModel& ctx, int bin)
  {
    fracBits_ += binCost(ctx, bin);
    ctx.update(bin);
  }
  void encodeBypass(int) { fracBits_ += kFracBitsOne; }
  void encodeBypassBits(uint32_t, int numBits) { fracBits_ += uint64_t(numBits) * kFracBitsOne; }

  uint64_t fracBits() const { return fracBits_; }
  void reset(uint64_t v = 0) { fracBits_ = v; }

private:
  uint64_t fracBits_ = 0;
};

// Decoder counterpart. Reading beyond the payload throws DecodeError.
class RangeDecoder {
public:
  explicit RangeDecoder(std::span<const uint8_t> data);

  int decodeBin(ContextModel& ctx);
  int decodeBypass();
  uint32_t decodeBypassBits(int numBits);

  // True when every byte of the payload has been consumed.
  bool fullyConsumed() const { return pos_ == data_.size(); }

private:
  uint8_t nextByte();
  void normalize();

  std::span<const uint8_t> data_;
  size_t pos_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint32_t code_ = 0;
};

// Exp-Golomb order-k binarization through bypass bins.
template <typename Coder>
void
encodeExpGolomb(Coder& coder, uint32_t value, int k)
{
  while (value >= (1u << k)) {
    coder.encodeBypass(1);
    value -= 1u << k;
    k++;
  }
  coder.encodeBypass(0);
  if (k)
    coder.encodeBypassBits(value, k);
}

uint32_t decodeExpGolomb(RangeDecoder& dec, int k, int maxPrefix = 24);

// Number of bits of the order-k exp-Golomb code of value.
int expGolombLength(uint32_t value, int k);

}  // namespace ompc
