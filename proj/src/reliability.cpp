#include "catsim/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace catsim {

double intervals_in_years(double years, double interval_seconds) { return years * kSecondsPerYear / interval_seconds; }

double log_unsurvivability(const ReliabilityQuery& q) {
    const double log_window = q.p >= 1.0 ? -INFINITY : q.T * std::log1p(-q.p);
    return log_window + std::log(q.q0) + std::log(q.q1);
}

double unsurvivability(const ReliabilityQuery& q) { return std::min(1.0, std::exp(log_unsurvivability(q))); }

double window_failure_probability(double p, double T) {
    if (p >= 1.0)
        return 0.0;
    return std::exp(T * std::log1p(-p));
}

Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z) {
    if (n == 0)
        return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double phat = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (phat + z2 / (2 * nn)) / denom;
    const double half = z * std::sqrt(phat * (1 - phat) / nn + z2 / (4 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

namespace {

double log_binom_pmf(std::uint64_t n, double p, std::uint64_t k) {
    const double nn = static_cast<double>(n), kk = static_cast<double>(k);
    return std::lgamma(nn + 1) - std::lgamma(kk + 1) - std::lgamma(nn - kk + 1) + kk * std::log(p) +
           (nn - kk) * std::log1p(-p);
}

} // namespace

std::pair<std::uint64_t, std::uint64_t> binomial_acceptance(std::uint64_t n, double p, double alpha) {
    if (p <= 0.0)
        return {0, 0};
    if (p >= 1.0)
        return {n, n};
    const double mean = static_cast<double>(n) * p;
    const double span = 60.0 * std::sqrt(mean * (1 - p)) + 60.0;
    const auto lo_start = static_cast<std::uint64_t>(std::max(0.0, mean - span));
    const auto hi_start = static_cast<std::uint64_t>(std::min(static_cast<double>(n), mean + span));

    std::uint64_t lo = lo_start;
    double cum = 0;
    for (std::uint64_t k = lo_start; k <= n; ++k) {
        cum += std::exp(log_binom_pmf(n, p, k));
        if (cum > alpha / 2)
            break;
        lo = k + 1;
    }
    std::uint64_t hi = hi_start;
    cum = 0;
    for (std::uint64_t k = hi_start;; --k) {
        cum += std::exp(log_binom_pmf(n, p, k));
        if (cum > alpha / 2 || k == 0)
            break;
        hi = k - 1;
    }
    return {lo, hi};
}

MonteCarloResult monte_carlo_unsurvivability(const MonteCarloConfig& cfg) {
    MonteCarloResult res;
    std::vector<std::uint64_t> first_failure(cfg.intervals + 1, 0);
    for (std::uint64_t trial = 0; trial < cfg.trials; ++trial) {
        Prng gen(cfg.kind, mix_seed(cfg.seed, trial));
        std::optional<std::uint32_t> failed_at;
        for (std::uint32_t iv = 0; iv < cfg.intervals; ++iv) {
            for (std::uint32_t w = 0; w < cfg.windows_per_interval; ++w) {
                bool hit = false;
                for (std::uint32_t d = 0; d < cfg.T; ++d)
                    hit |= gen.bernoulli(cfg.p);
                ++res.windows;
                if (!hit) {
                    ++res.failed_windows;
                    if (!failed_at)
                        failed_at = iv;
                }
            }
        }
        if (failed_at)
            ++first_failure[*failed_at];
    }
    res.window_rate = res.windows ? static_cast<double>(res.failed_windows) / static_cast<double>(res.windows) : 0.0;
    res.window_ci = wilson_interval(res.failed_windows, res.windows);
    std::uint64_t cum = 0;
    for (std::uint32_t k = 1; k <= cfg.intervals; ++k) {
        cum += first_failure[k - 1];
        CurvePoint pt;
        pt.intervals = k;
        pt.failed_trials = cum;
        pt.frequency = cfg.trials ? static_cast<double>(cum) / static_cast<double>(cfg.trials) : 0.0;
        pt.ci = wilson_interval(cum, cfg.trials);
        res.curve.push_back(pt);
    }
    return res;
}

LfsrPhaseScan lfsr_phase_scan(double p, std::uint32_t T) {
    constexpr std::uint64_t period = 0xffffffffULL;
    const unsigned bits = bits_per_decision(p);
    LfsrPhaseScan scan;
    if (bits == 0) {
        scan.phases = period;
        return scan;
    }
    const auto limit = static_cast<std::uint32_t>(std::floor(p * std::ldexp(1.0, static_cast<int>(bits))));
    // Decision streams that start at bit offsets congruent mod g are the same
    // cycle; there are g distinct cycles of period/g decisions each.
    const std::uint64_t g = std::gcd<std::uint64_t>(bits, period);
    const std::uint64_t cycle = period / g;
    for (std::uint64_t offset = 0; offset < g; ++offset) {
        Lfsr32 lfsr(1);
        for (std::uint64_t i = 0; i < offset; ++i)
            lfsr.next_bit();
        std::optional<std::uint64_t> first, last;
        auto account = [&](std::uint64_t gap) {
            scan.longest_gap = std::max(scan.longest_gap, gap);
            if (gap >= T)
                scan.failing_phases += gap - T + 1;
        };
        for (std::uint64_t k = 0; k < cycle; ++k) {
            if (lfsr.next_bits(bits) < limit) {
                if (last)
                    account(k - *last - 1);
                else
                    first = k;
                last = k;
            }
        }
        if (first)
            account(cycle - *last - 1 + *first);
        else
            scan.failing_phases += cycle;
        scan.phases += cycle;
    }
    scan.window_rate = static_cast<double>(scan.failing_phases) / static_cast<double>(scan.phases);
    return scan;
}

} // namespace catsim
