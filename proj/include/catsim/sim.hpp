#pragma once

#include "catsim/core.hpp"
#include "catsim/schemes.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace catsim {

struct EnergyEntry {
    double dynamic_nj_per_access = 0;
    double static_nj_per_interval = 0;
};

/// Per-scheme energy constants. Table rows are keyed by (scheme, M); PRA
/// has no counters and uses prng_nj_per_access only.
struct EnergyModel {
    std::map<std::pair<Scheme, std::uint32_t>, EnergyEntry> table;
    double row_refresh_nj = 1.0;
    double prng_nj_per_access = 2.625e-2;
    double baseline_refresh_mw = 2.5;

    /// Hardware table for M in {32, 64, 128, 256, 512}.
    static EnergyModel standard();

    bool has(Scheme scheme, std::uint32_t m) const;
    /// Throws ConfigError if (scheme, M) is missing.
    EnergyEntry lookup(Scheme scheme, std::uint32_t m) const;
};

struct EpochMetrics {
    std::uint64_t epoch = 0;
    std::uint64_t accesses = 0;
    std::uint64_t refresh_events = 0;
    std::uint64_t rows_refreshed = 0;

    friend bool operator==(const EpochMetrics&, const EpochMetrics&) = default;
};

/// Power terms in mW; cmrpo is their sum over the baseline refresh power.
struct PowerBreakdown {
    double dynamic_mw = 0;
    double static_mw = 0;
    double refresh_mw = 0;
    double cmrpo = 0;

    friend bool operator==(const PowerBreakdown&, const PowerBreakdown&) = default;
};

struct Metrics {
    std::uint64_t accesses = 0;
    std::uint64_t refresh_events = 0;
    std::uint64_t rows_refreshed = 0;
    std::uint64_t epochs = 0;
    TimeNs sim_time_ns = 0;
    std::uint64_t delayed_accesses = 0;
    TimeNs total_delay_ns = 0;
    PowerBreakdown power;
    double eto = 0;
    std::vector<EpochMetrics> per_epoch;

    friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct BankMetrics {
    BankId bank = 0;
    Metrics metrics;
};

struct RunResult {
    std::string label;
    Scheme scheme = Scheme::sca;
    BankConfig config;
    std::vector<BankMetrics> banks;
    Metrics aggregate;
};

/// Observes the replay. on_refresh sees every emitted event including
/// epoch_reset markers (which are not counted in the metrics); on_access
/// runs after the policy handled the access, with the event it produced.
struct SimHooks {
    std::function<void(const RefreshEvent&)> on_refresh;
    std::function<void(const AccessEvent&, const std::optional<RefreshEvent>&)> on_access;
};

struct SimOptions {
    TimeNs row_refresh_time_ns = 50;
    TimeNs access_gap_ns = kDefaultAccessGapNs;
    SimHooks hooks;
    const ThresholdTable* thresholds = nullptr;
};

/// Replays `trace` through one policy per bank. `cfg` is the base bank
/// config; the spec's overrides are applied on top. Bank b's policy is
/// seeded with mix_seed(spec.seed, b).
RunResult run(const Trace& trace, const PolicySpec& spec, const BankConfig& cfg, const EnergyModel& energy,
              const SimOptions& opts = {});

/// Replays one bank's events through an existing policy.
/// `sim_time_ns` defaults to the span of `events`.
Metrics run_bank(const std::vector<AccessEvent>& events, MitigationPolicy& policy, const BankConfig& cfg,
                 const EnergyModel& energy, const SimOptions& opts = {},
                 std::optional<TimeNs> sim_time_ns = std::nullopt);

/// sim_time for a stream spanning [first, last]: last - first + gap, padded
/// to at least one refresh interval.
TimeNs sim_time_for(const std::vector<AccessEvent>& events, TimeNs gap_ns, TimeNs refresh_interval_ns);

/// Power terms for one bank (banks = 1) or an aggregate over `banks` banks.
PowerBreakdown cmrpo(const Metrics& m, const EnergyModel& energy, Scheme scheme, std::uint32_t m_counters,
                     TimeNs refresh_interval_ns, std::uint32_t banks = 1);

/// total_delay / (sim_time * banks).
double eto(const Metrics& m, std::uint32_t banks = 1);

} // namespace catsim
