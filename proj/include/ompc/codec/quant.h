#pragma once

#include <cstdint>
#include <span>

namespace ompc::codec {

// Qstep = 2^((qp - 4) / 6)
double quantStep(int qp);

// level = sign(c) * floor(|c| / (Qstep * 2^scaleShift) + f), f = 1/3 for intra
// and 1/6 for inter blocks. Evaluated in exact integer arithmetic.
int32_t quantize(int32_t coeff, int qp, bool intra, int scaleShift = 0);

// c' = round(level * Qstep * 2^scaleShift)
int32_t dequantize(int32_t level, int qp, int scaleShift = 0);

// Returns the number of non-zero levels.
int quantizeBlock(std::span<const int32_t> coeffs, std::span<int32_t> levels, int qp, bool intra,
                  int scaleShift);
void dequantizeBlock(std::span<const int32_t> levels, std::span<int32_t> coeffs, int qp,
                     int scaleShift);

}  // namespace ompc::codec
