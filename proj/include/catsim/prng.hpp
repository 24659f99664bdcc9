#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace catsim {

enum class PrngKind { quality, lfsr };

std::string_view to_string(PrngKind kind);
PrngKind parse_prng_kind(std::string_view name);

/// 32-bit Fibonacci LFSR, polynomial x^32 + x^30 + x^26 + x^25 + 1
/// (maximal length, period 2^32 - 1). Bit 0 is the output bit; the
/// feedback enters at bit 31.
class Lfsr32 {
  public:
    explicit Lfsr32(std::uint32_t seed) : state_(seed == 0 ? 1u : seed) {}

    std::uint32_t state() const { return state_; }

    bool next_bit() {
        const std::uint32_t out = state_ & 1u;
        const std::uint32_t fb = (state_ ^ (state_ >> 2) ^ (state_ >> 6) ^ (state_ >> 7)) & 1u;
        state_ = (state_ >> 1) | (fb << 31);
        return out != 0;
    }

    /// Next `bits` output bits, first bit in the least significant position.
    /// Equivalent to `bits` calls of next_bit().
    std::uint32_t next_bits(unsigned bits);

  private:
    std::uint32_t state_;
};

/// Bits consumed per Bernoulli(p) decision: ceil(log2(1/p)), 0 for p >= 1.
unsigned bits_per_decision(double p);

/// Per-policy random source for refresh decisions.
class Prng {
  public:
    Prng(PrngKind kind, std::uint64_t seed);

    PrngKind kind() const { return kind_; }

    /// Quality: exact Bernoulli from 53 uniform bits. LFSR: the next
    /// bits_per_decision(p) bits compared against floor(p * 2^bits).
    bool bernoulli(double p);

  private:
    PrngKind kind_;
    std::mt19937_64 quality_;
    Lfsr32 lfsr_;
};

/// splitmix64 finaliser, used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace catsim
