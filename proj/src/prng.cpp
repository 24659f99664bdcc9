#include "catsim/prng.hpp"

#include "catsim/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace catsim {

std::string_view to_string(PrngKind kind) { return kind == PrngKind::lfsr ? "lfsr" : "quality"; }

PrngKind parse_prng_kind(std::string_view name) {
    if (name == "quality") return PrngKind::quality;
    if (name == "lfsr") return PrngKind::lfsr;
    throw ConfigError("unknown prng kind '" + std::string(name) + "'");
}

std::uint32_t Lfsr32::next_bits(unsigned bits) {
    // Up to 25 feedback bits depend only on the current state, so a whole
    // chunk can be produced with one shift-xor.
    std::uint32_t out = 0;
    unsigned done = 0;
    while (done < bits) {
        const unsigned n = std::min(bits - done, 16u);
        const std::uint32_t mask = (1u << n) - 1u;
        const std::uint32_t fb = (state_ ^ (state_ >> 2) ^ (state_ >> 6) ^ (state_ >> 7)) & mask;
        out |= (state_ & mask) << done;
        state_ = (state_ >> n) | (fb << (32 - n));
        done += n;
    }
    return out;
}

unsigned bits_per_decision(double p) {
    if (p >= 1.0)
        return 0;
    if (p <= 0.0)
        return 32;
    const double b = std::ceil(-std::log2(p) - 1e-12);
    return static_cast<unsigned>(std::min(32.0, std::max(0.0, b)));
}

Prng::Prng(PrngKind kind, std::uint64_t seed)
    : kind_(kind), quality_(seed), lfsr_(static_cast<std::uint32_t>(seed ^ (seed >> 32))) {}

bool Prng::bernoulli(double p) {
    if (kind_ == PrngKind::quality) {
        const std::uint64_t u = quality_() >> 11;
        return static_cast<double>(u) < p * 0x1p53;
    }
    const unsigned bits = bits_per_decision(p);
    if (bits == 0)
        return true;
    const double scaled = std::floor(p * std::ldexp(1.0, static_cast<int>(bits)));
    return static_cast<double>(lfsr_.next_bits(bits)) < scaled;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace catsim
