#pragma once

// Bit-serial Fibonacci LFSR built from a tap list, and a GF(2) primitivity
// check for its characteristic polynomial.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace oracle {

/// Register cell k holds the bit that leaves the register after k more
/// shifts. The feedback for tap t reads cell (width - t).
class BitSerialLfsr {
  public:
    BitSerialLfsr(std::uint32_t seed, std::initializer_list<unsigned> taps) : taps_(taps) {
        for (unsigned k = 0; k < 32; ++k)
            cells_[k] = (seed >> k) & 1u;
    }

    unsigned step() {
        const unsigned out = cells_[0];
        unsigned fb = 0;
        for (unsigned t : taps_)
            fb ^= cells_[32 - t];
        for (unsigned k = 0; k + 1 < 32; ++k)
            cells_[k] = cells_[k + 1];
        cells_[31] = fb;
        return out;
    }

  private:
    std::array<unsigned, 32> cells_{};
    std::vector<unsigned> taps_;
};

// Polynomials over GF(2) with degree < 64, bit i = coefficient of x^i.
inline std::uint64_t gf2_mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t mod, unsigned deg) {
    std::uint64_t r = 0;
    const std::uint64_t top = std::uint64_t{1} << deg;
    while (b) {
        if (b & 1)
            r ^= a;
        b >>= 1;
        a <<= 1;
        if (a & top)
            a ^= mod;
    }
    return r;
}

inline std::uint64_t gf2_powmod_x(std::uint64_t e, std::uint64_t mod, unsigned deg) {
    std::uint64_t result = 1, base = 2;  // base = x
    while (e) {
        if (e & 1)
            result = gf2_mulmod(result, base, mod, deg);
        base = gf2_mulmod(base, base, mod, deg);
        e >>= 1;
    }
    return result;
}

/// True if the degree-`deg` polynomial `mod` is primitive, given the prime
/// factors of 2^deg - 1.
inline bool gf2_primitive(std::uint64_t mod, unsigned deg, std::initializer_list<std::uint64_t> prime_factors) {
    const std::uint64_t order = (std::uint64_t{1} << deg) - 1;
    if (gf2_powmod_x(order, mod, deg) != 1)
        return false;
    for (auto q : prime_factors)
        if (gf2_powmod_x(order / q, mod, deg) == 1)
            return false;
    return true;
}

} // namespace oracle
