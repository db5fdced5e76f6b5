#pragma once

#include <cstdint>

// Integer/fixed-point helpers shared by the detector and the boosting
// arithmetic. Everything here is deterministic and platform-independent;
// no floating point.
//
// Q16 / Q32 / Q48 denote fixed point with that many fractional bits.

namespace kpboost {

// Integer division truncating toward zero (the convention used by every
// fixed-point step in the pipeline).
constexpr int64_t trunc_div(int64_t num, int64_t den) { return num / den; }

// Floor division, used only for coordinate-to-grid-cell mapping.
constexpr int64_t floor_div(int64_t num, int64_t den) {
    int64_t q = num / den;
    int64_t r = num % den;
    return (r != 0 && ((r < 0) != (den < 0))) ? q - 1 : q;
}

// log2(v) in Q32, v >= 1. Exact integer part, fractional part via
// repeated squaring of the normalized mantissa; error below 2^-30.
uint64_t log2_q32(uint64_t v);

// alpha = (1/2) * ln(num / den) in Q16, for num >= den >= 1.
// Truncating; within 1 ulp of the closed form.
int64_t half_ln_ratio_q16(uint64_t num, uint64_t den);

// floor(sqrt(v)) for 128-bit operands.
uint64_t isqrt_u128(unsigned __int128 v);

// floor(sqrt(num / den) * 2^32): the Q32 multiplier exp(+/-alpha) used by
// the AdaBoost weight update, expressed through exp(a) = sqrt((1-e)/e).
uint64_t sqrt_ratio_q32(uint64_t num, uint64_t den);

}  // namespace kpboost
