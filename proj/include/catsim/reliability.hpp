#pragma once

#include "catsim/prng.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace catsim {

inline constexpr double kSecondsPerYear = 365.25 * 24 * 3600;  // 31,557,600
inline constexpr double kRefreshIntervalSeconds = 0.064;

/// Chipkill comparison line for unsurvivability plots.
inline constexpr double kChipkillTarget = 1e-4;

struct ReliabilityQuery {
    double p = 0;      // per-access refresh probability
    double T = 0;      // refresh threshold
    double q0 = 0;     // hammering windows per refresh interval
    double q1 = 0;     // refresh intervals in the horizon
};

/// Refresh intervals in `years` years of 365.25 days.
double intervals_in_years(double years, double interval_seconds = kRefreshIntervalSeconds);

/// log of (1-p)^T * Q0 * Q1.
double log_unsurvivability(const ReliabilityQuery& q);

/// min(1, (1-p)^T * Q0 * Q1), evaluated in log space.
double unsurvivability(const ReliabilityQuery& q);

/// (1-p)^T: probability that one window of T accesses sees no refresh.
double window_failure_probability(double p, double T);

struct Interval {
    double low = 0;
    double high = 0;
};

/// Wilson score interval for k successes in n trials.
Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054);

/// Smallest [lo, hi] count range with P(X < lo) <= alpha/2 and P(X > hi) <= alpha/2
/// for X ~ Binomial(n, p); pmf sums are taken in log space.
std::pair<std::uint64_t, std::uint64_t> binomial_acceptance(std::uint64_t n, double p, double alpha = 0.05);

struct MonteCarloConfig {
    PrngKind kind = PrngKind::quality;
    double p = 0.01;
    std::uint32_t T = 1024;
    std::uint64_t trials = 1000;
    std::uint32_t intervals = 1;
    std::uint32_t windows_per_interval = 1;  // Q0
    std::uint64_t seed = 1;
};

struct CurvePoint {
    std::uint32_t intervals = 0;
    std::uint64_t failed_trials = 0;  // trials with a failure within the first `intervals`
    double frequency = 0;
    Interval ci;
};

struct MonteCarloResult {
    std::uint64_t windows = 0;
    std::uint64_t failed_windows = 0;
    double window_rate = 0;
    Interval window_ci;
    std::vector<CurvePoint> curve;
};

/// Each trial replays intervals x windows_per_interval hammering windows of
/// T decisions from its own generator; a window fails when none of its T
/// decisions refreshes. Every decision is drawn, so LFSR windows stay
/// contiguous in the generator's output stream.
MonteCarloResult monte_carlo_unsurvivability(const MonteCarloConfig& cfg);

struct LfsrPhaseScan {
    std::uint64_t phases = 0;         // starting points examined (the full period)
    std::uint64_t failing_phases = 0; // starts whose next window has no hit
    std::uint64_t longest_gap = 0;    // most decisions between two hits
    double window_rate = 0;
};

/// Exact per-window failure probability of the LFSR decision stream for a
/// uniformly random starting decision, found by walking one full period of
/// decisions (2^32 - 1 of them). Takes seconds.
LfsrPhaseScan lfsr_phase_scan(double p, std::uint32_t T);

} // namespace catsim
