#pragma once

#include "catsim/core.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

namespace catsim {

enum class WorkloadKind { uniform, biased, reference_ratio, gaussian_attack, mixed_attack, hotspot_shift };

std::string_view to_string(WorkloadKind kind);
WorkloadKind parse_workload_kind(std::string_view name);

/// Named attack intensities: fraction of accesses aimed at target rows.
inline constexpr double kLightAttack = 0.25;
inline constexpr double kMediumAttack = 0.50;
inline constexpr double kHeavyAttack = 0.75;

double parse_attack_mode(std::string_view name);

/// One phase of a hotspot-shift workload. A phase either replays the
/// four-region reference ratio with its regions rotated by `offset` rows, or
/// sends `hot_fraction` of its accesses uniformly into [hot_low, hot_low + hot_rows)
/// and the rest uniformly over the bank.
struct Phase {
    std::uint64_t accesses = 0;
    bool hot_region = false;
    double x = 0;           // reference-ratio bias
    Row offset = 0;
    Row hot_low = 0;
    Row hot_rows = 0;
    double hot_fraction = 0.5;
};

struct WorkloadSpec {
    WorkloadKind kind = WorkloadKind::uniform;
    Row n_rows = 65536;
    std::uint32_t banks = 1;
    std::uint64_t accesses = 0;   // R, summed over banks
    std::uint64_t seed = 1;
    TimeNs gap_ns = kDefaultAccessGapNs;
    double x = 0;                 // bias of the hot group for biased / reference-ratio
    std::uint32_t targets_per_bank = 4;
    double attack_fraction = kHeavyAttack;
    std::vector<Phase> phases;    // hotspot-shift only
};

/// Per-region access shares of the four-region pattern, in row units:
/// [2w, w, w/2, x + w/2] with w = n_rows / 4.
std::vector<double> reference_ratio_weights(Row n_rows, double x);

/// The four regions [low, high) of the reference-ratio pattern: sizes 2w, w, w/2, w/2.
std::vector<std::pair<Row, Row>> reference_ratio_regions(Row n_rows);

/// Ranks targets 0..n-1 and weights rank k by exp(-k^2 / (2 sigma^2)), sigma = n/2.
std::vector<double> gaussian_target_weights(std::uint32_t targets);

Trace gen_uniform(const WorkloadSpec& spec);
/// i.i.d. draws over the four regions with reference-ratio shares.
Trace gen_biased(const WorkloadSpec& spec);
/// Deterministic interleaving over the four regions, per-region tallies
/// within one of the closed-form shares.
Trace gen_reference_ratio(const WorkloadSpec& spec);
Trace gen_gaussian_attack(const WorkloadSpec& spec);
/// Light, medium then heavy attack over three equal segments, same targets.
Trace gen_mixed_attack(const WorkloadSpec& spec);
Trace gen_hotspot_shift(const WorkloadSpec& spec);

/// Dispatches on spec.kind.
Trace generate(const WorkloadSpec& spec);

/// Target rows chosen for `bank` by the attack generators.
std::vector<Row> attack_targets(const WorkloadSpec& spec, BankId bank);

/// Uniform integer in [0, n) by rejection, independent of the standard
/// library's distribution implementations.
std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n);
/// Uniform double in [0, 1) from 53 bits.
double uniform_unit(std::mt19937_64& gen);

} // namespace catsim
