#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace repomech::fp {

// Wire numerics are signed 64-bit integers at 1e-9 resolution. All ledger
// arithmetic stays in this representation so replays are bit-exact.
inline constexpr int64_t kScale = 1'000'000'000;

// Encode a real; ties at the 1e-9 boundary round half to even
// (nearbyint under the default FE_TONEAREST mode).
inline int64_t encode(double x) {
    return static_cast<int64_t>(std::nearbyint(x * static_cast<double>(kScale)));
}

inline double decode(int64_t v) {
    return static_cast<double>(v) / static_cast<double>(kScale);
}

// Halve a fixed-point sum; the odd case lands on an exact .5 tie, which is
// rounded half to even like the encoder.
inline int64_t midpoint(int64_t a, int64_t b) {
    int64_t s = a + b;
    int64_t q = s / 2;
    if (s % 2 != 0) {
        // |remainder| is one unit: pick the even neighbour.
        int64_t up = (s > 0) ? q + 1 : q - 1;
        q = (q % 2 == 0) ? q : up;
    }
    return q;
}

// Fixed-point product a*b (both 1e-9 scaled, nonnegative), rounded half to
// even. Wide intermediate keeps volume*rate products exact before rounding.
inline int64_t mul(int64_t a, int64_t b) {
    __int128 prod = static_cast<__int128>(a) * b;
    __int128 q = prod / kScale;
    __int128 r = prod % kScale;
    __int128 twice = (r < 0 ? -r : r) * 2;
    bool away = twice > kScale || (twice == kScale && (q % 2 != 0));
    if (away) q += (prod < 0) ? -1 : 1;
    return static_cast<int64_t>(q);
}

// Little-endian 8-byte encoding (two's complement), used by the leaf codec.
inline void append_le8(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void append_le8(std::string& out, int64_t v) {
    append_le8(out, static_cast<uint64_t>(v));
}

}  // namespace repomech::fp
