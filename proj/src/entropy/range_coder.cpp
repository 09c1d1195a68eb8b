#include "ompc/entropy.h"

#include <array>
#include <cmath>

#include "ompc/errors.h"

namespace ompc {

namespace {

  constexpr uint32_t kTopValue = 1u << 24;
  constexpr int kCostShift = 4;

  // -log2(p) tables indexed by the probability of the coded bin >> 4.
  struct CostTable {
    std::array<uint32_t, (1 << (ContextModel::kProbBits - kCostShift)) + 1> cost{};
    CostTable()
    {
      const double scale = double(1 << ContextModel::kProbBits);
      for (size_t i = 0; i < cost.size(); i++) {
        const double p = std::max(0.5, double(i << kCostShift) + double(1 << (kCostShift - 1)));
        cost[i] = uint32_t(std::lround(-std::log2(std::min(p, scale) / scale) * kFracBitsOne));
      }
    }
  };

  const CostTable& costTable()
  {
    static const CostTable table;
    return table;
  }

}  // namespace

uint32_t
binCost(const ContextModel& ctx, int bin)
{
  const uint32_t p = bin ? (1u << ContextModel::kProbBits) - ctx.probZero : ctx.probZero;
  return costTable().cost[p >> kCostShift];
}

//============================================================================

void
RangeEncoder::encodeBin(ContextModel& ctx, int bin)
{
  fracBits_ += binCost(ctx, bin);
  const uint32_t bound = (range_ >> ContextModel::kProbBits) * ctx.probZero;
  if (!bin) {
    range_ = bound;
  } else {
    low_ += bound;
    range_ -= bound;
  }
  ctx.update(bin);
  normalize();
}

void
RangeEncoder::encodeBypass(int bin)
{
  fracBits_ += kFracBitsOne;
  range_ >>= 1;
  if (bin)
    low_ += range_;
  normalize();
}

void
RangeEncoder::encodeBypassBits(uint32_t value, int numBits)
{
  for (int i = numBits - 1; i >= 0; i--)
    encodeBypass(int((value >> i) & 1));
}

void
RangeEncoder::normalize()
{
  while (range_ < kTopValue) {
    range_ <<= 8;
    shiftLow();
  }
}

void
RangeEncoder::shiftLow()
{
  if (uint32_t(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    uint8_t temp = cache_;
    do {
      out_.push_back(uint8_t(temp + uint8_t(low_ >> 32)));
      temp = 0xFF;
    } while (--cacheSize_ != 0);
    cache_ = uint8_t(uint32_t(low_) >> 24);
  }
  cacheSize_++;
  low_ = uint64_t(uint32_t(low_) << 8);
}

std::vector<uint8_t>
RangeEncoder::finish()
{
  for (int i = 0; i < 5; i++)
    shiftLow();
  return std::move(out_);
}

//============================================================================

RangeDecoder::RangeDecoder(std::span<const uint8_t> data) : data_(data)
{
  if (nextByte() != 0)
    throw DecodeError("range coder stream does not start with a zero byte");
  for (int i = 0; i < 4; i++)
    code_ = (code_ << 8) | nextByte();
}

uint8_t
RangeDecoder::nextByte()
{
  if (pos_ >= data_.size())
    throw DecodeError("range coder read past the end of the payload");
  return data_[pos_++];
}

void
RangeDecoder::normalize()
{
  while (range_ < kTopValue) {
    range_ <<= 8;
    code_ = (code_ << 8) | nextByte();
  }
}

int
RangeDecoder::decodeBin(ContextModel& ctx)
{
  const uint32_t bound = (range_ >> ContextModel::kProbBits) * ctx.probZero;
  int bin;
  if (code_ < bound) {
    range_ = bound;
    bin = 0;
  } else {
    code_ -= bound;
    range_ -= bound;
    bin = 1;
  }
  ctx.update(bin);
  normalize();
  return bin;
}

int
RangeDecoder::decodeBypass()
{
  range_ >>= 1;
  int bin = 0;
  if (code_ >= range_) {
    code_ -= range_;
    bin = 1;
  }
  normalize();
  return bin;
}

uint32_t
RangeDecoder::decodeBypassBits(int numBits)
{
  uint32_t v = 0;
  for (int i = 0; i < numBits; i++)
    v = (v << 1) | uint32_t(decodeBypass());
  return v;
}

//============================================================================

uint32_t
decodeExpGolomb(RangeDecoder& dec, int k, int maxPrefix)
{
  uint32_t value = 0;
  int prefix = 0;
  while (dec.decodeBypass()) {
    if (++prefix > maxPrefix)
      throw DecodeError("exp-Golomb prefix too long");
    value += 1u << k;
    k++;
  }
  if (k)
    value += dec.decodeBypassBits(k);
  return value;
}

int
expGolombLength(uint32_t value, int k)
{
  int len = 1 + k;
  while (value >= (1u << k)) {
    value -= 1u << k;
    k++;
    len += 2;
  }
  return len;
}

}  // namespace ompc
