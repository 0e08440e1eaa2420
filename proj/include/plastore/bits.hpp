#pragma once

#include <bit>
#include <cstdint>

#if defined(__BMI2__)
#include <immintrin.h>
#endif

namespace plastore::bits {

inline constexpr uint64_t word_bits = 64;

constexpr uint64_t low_mask(unsigned width) noexcept {
    return width >= 64 ? ~uint64_t{0} : (uint64_t{1} << width) - 1;
}

constexpr uint64_t words_for(uint64_t nbits) noexcept { return (nbits + word_bits - 1) / word_bits; }

/// Position of the (k+1)-th set bit of `w` (k is 0-based). Requires k < popcount(w).
inline unsigned select_in_word(uint64_t w, unsigned k) noexcept {
#if defined(__BMI2__)
    return static_cast<unsigned>(std::countr_zero(_pdep_u64(uint64_t{1} << k, w)));
#else
    // Byte-wise popcount prefix sums, then a short loop inside the byte.
    constexpr uint64_t ones_step_8 = 0x0101010101010101ULL;
    uint64_t s = w - ((w >> 1) & 0x5555555555555555ULL);
    s = (s & 0x3333333333333333ULL) + ((s >> 2) & 0x3333333333333333ULL);
    s = (s + (s >> 4)) & 0x0F0F0F0F0F0F0F0FULL;
    const uint64_t prefix = s * ones_step_8;  // byte i holds popcount of bytes [0, i]
    unsigned byte = 0;
    while (((prefix >> (byte * 8)) & 0xFF) <= k)
        ++byte;
    unsigned before = byte == 0 ? 0 : static_cast<unsigned>((prefix >> ((byte - 1) * 8)) & 0xFF);
    uint64_t b = (w >> (byte * 8)) & 0xFF;
    unsigned rem = k - before;
    for (unsigned i = 0; i < 8; ++i) {
        if ((b >> i) & 1) {
            if (rem == 0)
                return byte * 8 + i;
            --rem;
        }
    }
    return 64;  // unreachable for valid k
#endif
}

/// Sign folded into the low bit: 0, -1, 1, -2, 2 ... map to 0, 1, 2, 3, 4 ...
constexpr uint64_t zigzag_encode(int64_t v) noexcept {
    return (static_cast<uint64_t>(v) << 1) ^ static_cast<uint64_t>(v >> 63);
}

constexpr int64_t zigzag_decode(uint64_t z) noexcept {
    return static_cast<int64_t>(z >> 1) ^ -static_cast<int64_t>(z & 1);
}

/// Floor of a / b for b > 0.
constexpr __int128 floor_div(__int128 a, __int128 b) noexcept {
    __int128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

/// ceil(log2(v)) for v >= 1; 0 for v <= 1.
constexpr unsigned ceil_log2(uint64_t v) noexcept {
    return v <= 1 ? 0u : static_cast<unsigned>(std::bit_width(v - 1));
}

/// floor(log2(v)) for v >= 1.
constexpr unsigned floor_log2(uint64_t v) noexcept {
    return static_cast<unsigned>(std::bit_width(v)) - 1;
}

} // namespace plastore::bits
