#include "kpboost/fixed_math.hpp"

#include <bit>
#include <cassert>

namespace kpboost {

uint64_t log2_q32(uint64_t v) {
    assert(v >= 1);
    int k = 63 - std::countl_zero(v);
    // Normalize the mantissa to [2^62, 2^63), i.e. [1, 2) in Q62.
    unsigned __int128 m = (unsigned __int128)v << (62 - k);
    uint64_t frac = 0;
    for (int bit = 0; bit < 32; ++bit) {
        m = (m * m) >> 62;
        frac <<= 1;
        if (m >= ((unsigned __int128)1 << 63)) {
            frac |= 1;
            m >>= 1;
        }
    }
    return (uint64_t(k) << 32) | frac;
}

int64_t half_ln_ratio_q16(uint64_t num, uint64_t den) {
    assert(num >= den && den >= 1);
    if (num == den) return 0;
    constexpr uint64_t kLn2Q32 = 2977044472ull;  // round(ln 2 * 2^32)
    uint64_t diff = log2_q32(num) - log2_q32(den);
    // Q32 * Q32 -> Q64; >>33 halves and drops to Q32... then >>16 to Q16.
    unsigned __int128 p = (unsigned __int128)diff * kLn2Q32;
    return int64_t(p >> 49);
}

uint64_t isqrt_u128(unsigned __int128 v) {
    if (v == 0) return 0;
    // Bit-by-bit restoring square root: exact floor, no convergence concerns.
    unsigned __int128 rem = 0, root = 0;
    for (int i = 63; i >= 0; --i) {
        rem = (rem << 2) | ((v >> (2 * i)) & 3);
        root <<= 1;
        unsigned __int128 trial = (root << 1) | 1;
        if (trial <= rem) {
            rem -= trial;
            root |= 1;
        }
    }
    return uint64_t(root);
}

uint64_t sqrt_ratio_q32(uint64_t num, uint64_t den) {
    assert(den >= 1);
    unsigned __int128 scaled = ((unsigned __int128)num << 64) / den;
    return isqrt_u128(scaled);
}

}  // namespace kpboost
