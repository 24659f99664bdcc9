#include "catsim/workloads.hpp"

#include "catsim/prng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <string>

namespace catsim {

std::string_view to_string(WorkloadKind kind) {
    switch (kind) {
    case WorkloadKind::uniform: return "uniform";
    case WorkloadKind::biased: return "biased";
    case WorkloadKind::reference_ratio: return "reference-ratio";
    case WorkloadKind::gaussian_attack: return "gaussian-attack";
    case WorkloadKind::mixed_attack: return "mixed-attack";
    case WorkloadKind::hotspot_shift: return "hotspot-shift";
    }
    return "?";
}

WorkloadKind parse_workload_kind(std::string_view name) {
    if (name == "uniform") return WorkloadKind::uniform;
    if (name == "biased") return WorkloadKind::biased;
    if (name == "reference-ratio") return WorkloadKind::reference_ratio;
    if (name == "gaussian-attack") return WorkloadKind::gaussian_attack;
    if (name == "mixed-attack") return WorkloadKind::mixed_attack;
    if (name == "hotspot-shift") return WorkloadKind::hotspot_shift;
    throw ConfigError("unknown workload kind '" + std::string(name) + "'");
}

double parse_attack_mode(std::string_view name) {
    if (name == "light") return kLightAttack;
    if (name == "medium") return kMediumAttack;
    if (name == "heavy") return kHeavyAttack;
    throw ConfigError("unknown attack mode '" + std::string(name) + "'");
}

std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) {
    if (n <= 1)
        return 0;
    // Largest multiple of n that fits, to keep the draw unbiased.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
        v = gen();
    } while (v >= limit);
    return v % n;
}

double uniform_unit(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1p-53; }

std::vector<double> reference_ratio_weights(Row n_rows, double x) {
    const double w = n_rows / 4.0;
    return {2 * w, w, w / 2, x + w / 2};
}

std::vector<std::pair<Row, Row>> reference_ratio_regions(Row n_rows) {
    const Row w = n_rows / 4, h = n_rows / 8;
    return {{0, 2 * w}, {2 * w, 3 * w}, {3 * w, 3 * w + h}, {3 * w + h, n_rows}};
}

std::vector<double> gaussian_target_weights(std::uint32_t targets) {
    std::vector<double> w(targets);
    const double sigma = targets / 2.0;
    for (std::uint32_t k = 0; k < targets; ++k)
        w[k] = std::exp(-static_cast<double>(k) * k / (2 * sigma * sigma));
    return w;
}

namespace {

using RowSource = std::function<Row(std::uint64_t)>;  // argument: index within the bank stream

void check_common(const WorkloadSpec& spec) {
    if (spec.n_rows == 0)
        throw ConfigError("workload: n_rows must be positive");
    if (spec.banks == 0)
        throw ConfigError("workload: banks must be positive");
}

std::uint64_t bank_share(const WorkloadSpec& spec, std::uint64_t total, BankId bank) {
    return total / spec.banks + (bank < total % spec.banks ? 1 : 0);
}

// Event i goes to bank i % banks at time i * gap.
Trace assemble(const WorkloadSpec& spec, std::uint64_t total, const std::function<RowSource(BankId)>& make) {
    Trace trace;
    trace.meta.generator = std::string(to_string(spec.kind));
    trace.meta.seed = spec.seed;
    trace.meta.banks = spec.banks;
    trace.events.reserve(total);
    std::vector<RowSource> sources;
    std::vector<std::uint64_t> produced(spec.banks, 0);
    for (BankId b = 0; b < spec.banks; ++b)
        sources.push_back(make(b));
    for (std::uint64_t i = 0; i < total; ++i) {
        const auto b = static_cast<BankId>(i % spec.banks);
        trace.events.push_back({i * spec.gap_ns, b, sources[b](produced[b]++)});
    }
    return trace;
}

int pick_weighted(const std::vector<double>& cumulative, double u) {
    const double target = u * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative.begin(), cumulative.size() - 1));
}

std::vector<double> cumulative_of(const std::vector<double>& w) {
    std::vector<double> c(w.size());
    std::partial_sum(w.begin(), w.end(), c.begin());
    return c;
}

// Smooth weighted round robin over the four regions, round robin within each.
class RatioStream {
  public:
    RatioStream(Row n_rows, double x, Row offset)
        : n_rows_(n_rows), offset_(offset), weights_(reference_ratio_weights(n_rows, x)),
          regions_(reference_ratio_regions(n_rows)), current_(4, 0.0), next_(4, 0) {
        total_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    }

    Row next() {
        int best = 0;
        for (int g = 0; g < 4; ++g) {
            current_[g] += weights_[g];
            if (current_[g] > current_[best])
                best = g;
        }
        current_[best] -= total_;
        const auto [low, high] = regions_[best];
        const Row row = low + static_cast<Row>(next_[best]++ % (high - low));
        return static_cast<Row>((std::uint64_t{row} + offset_) % n_rows_);
    }

  private:
    Row n_rows_;
    Row offset_;
    std::vector<double> weights_;
    std::vector<std::pair<Row, Row>> regions_;
    std::vector<double> current_;
    std::vector<std::uint64_t> next_;
    double total_ = 0;
};

void check_ratio(const WorkloadSpec& spec, double x) {
    if (spec.n_rows % 8 != 0)
        throw ConfigError("reference-ratio workloads need n_rows divisible by 8");
    if (x < 0)
        throw ConfigError("workload: bias x must be >= 0");
}

// Attack stream: fraction `f(index)` of accesses to Gaussian-weighted targets.
RowSource attack_source(const WorkloadSpec& spec, BankId bank, std::function<double(std::uint64_t)> fraction) {
    auto gen = std::make_shared<std::mt19937_64>(mix_seed(spec.seed, bank));
    auto targets = attack_targets(spec, bank);
    auto cum = cumulative_of(gaussian_target_weights(static_cast<std::uint32_t>(targets.size())));
    const Row n = spec.n_rows;
    return [gen, targets, cum, n, fraction](std::uint64_t i) -> Row {
        if (uniform_unit(*gen) < fraction(i))
            return targets[pick_weighted(cum, uniform_unit(*gen))];
        return static_cast<Row>(uniform_below(*gen, n));
    };
}

} // namespace

std::vector<Row> attack_targets(const WorkloadSpec& spec, BankId bank) {
    if (spec.targets_per_bank == 0)
        throw ConfigError("workload: targets_per_bank must be >= 1");
    if (spec.targets_per_bank > spec.n_rows)
        throw ConfigError("workload: more targets than rows");
    std::mt19937_64 gen(mix_seed(spec.seed ^ 0x5461726765747321ULL, bank));
    std::vector<Row> targets;
    while (targets.size() < spec.targets_per_bank) {
        const auto r = static_cast<Row>(uniform_below(gen, spec.n_rows));
        if (std::find(targets.begin(), targets.end(), r) == targets.end())
            targets.push_back(r);
    }
    return targets;
}

Trace gen_uniform(const WorkloadSpec& spec) {
    check_common(spec);
    return assemble(spec, spec.accesses, [&](BankId b) -> RowSource {
        auto gen = std::make_shared<std::mt19937_64>(mix_seed(spec.seed, b));
        const Row n = spec.n_rows;
        return [gen, n](std::uint64_t) { return static_cast<Row>(uniform_below(*gen, n)); };
    });
}

Trace gen_biased(const WorkloadSpec& spec) {
    check_common(spec);
    check_ratio(spec, spec.x);
    return assemble(spec, spec.accesses, [&](BankId b) -> RowSource {
        auto gen = std::make_shared<std::mt19937_64>(mix_seed(spec.seed, b));
        auto cum = cumulative_of(reference_ratio_weights(spec.n_rows, spec.x));
        auto regions = reference_ratio_regions(spec.n_rows);
        return [gen, cum, regions](std::uint64_t) {
            const auto [low, high] = regions[pick_weighted(cum, uniform_unit(*gen))];
            return static_cast<Row>(low + uniform_below(*gen, high - low));
        };
    });
}

Trace gen_reference_ratio(const WorkloadSpec& spec) {
    check_common(spec);
    check_ratio(spec, spec.x);
    return assemble(spec, spec.accesses, [&](BankId) -> RowSource {
        auto stream = std::make_shared<RatioStream>(spec.n_rows, spec.x, 0);
        return [stream](std::uint64_t) { return stream->next(); };
    });
}

Trace gen_gaussian_attack(const WorkloadSpec& spec) {
    check_common(spec);
    if (spec.attack_fraction < 0 || spec.attack_fraction > 1)
        throw ConfigError("workload: attack_fraction must be in [0, 1]");
    const double f = spec.attack_fraction;
    return assemble(spec, spec.accesses,
                    [&](BankId b) { return attack_source(spec, b, [f](std::uint64_t) { return f; }); });
}

Trace gen_mixed_attack(const WorkloadSpec& spec) {
    check_common(spec);
    return assemble(spec, spec.accesses, [&](BankId b) {
        const std::uint64_t n = bank_share(spec, spec.accesses, b);
        return attack_source(spec, b, [n](std::uint64_t i) {
            const std::uint64_t seg = n == 0 ? 0 : std::min<std::uint64_t>(2, i * 3 / n);
            return seg == 0 ? kLightAttack : seg == 1 ? kMediumAttack : kHeavyAttack;
        });
    });
}

Trace gen_hotspot_shift(const WorkloadSpec& spec) {
    check_common(spec);
    if (spec.phases.empty())
        throw ConfigError("hotspot-shift: at least one phase is required");
    std::uint64_t total = 0;
    for (const auto& ph : spec.phases) {
        if (ph.hot_region) {
            if (ph.hot_rows == 0 || std::uint64_t{ph.hot_low} + ph.hot_rows > spec.n_rows)
                throw ConfigError("hotspot-shift: hot region outside the bank");
            if (ph.hot_fraction < 0 || ph.hot_fraction > 1)
                throw ConfigError("hotspot-shift: hot_fraction must be in [0, 1]");
        } else {
            check_ratio(spec, ph.x);
        }
        total += ph.accesses;
    }
    // Phase boundaries are global event indices; each bank switches phase
    // at the first of its events past the boundary.
    std::vector<std::uint64_t> ends;
    std::uint64_t acc = 0;
    for (const auto& ph : spec.phases)
        ends.push_back(acc += ph.accesses);

    Trace trace;
    trace.meta.generator = std::string(to_string(WorkloadKind::hotspot_shift));
    trace.meta.seed = spec.seed;
    trace.meta.banks = spec.banks;
    trace.events.reserve(total);
    struct BankState {
        std::mt19937_64 gen;
        std::size_t phase = SIZE_MAX;
        std::unique_ptr<RatioStream> ratio;
    };
    std::vector<BankState> banks;
    for (BankId b = 0; b < spec.banks; ++b)
        banks.push_back({std::mt19937_64(mix_seed(spec.seed, b)), SIZE_MAX, nullptr});
    std::size_t phase = 0;
    for (std::uint64_t i = 0; i < total; ++i) {
        while (i >= ends[phase])
            ++phase;
        const auto b = static_cast<BankId>(i % spec.banks);
        auto& st = banks[b];
        const auto& ph = spec.phases[phase];
        if (st.phase != phase) {
            st.phase = phase;
            st.ratio = ph.hot_region ? nullptr : std::make_unique<RatioStream>(spec.n_rows, ph.x, ph.offset);
        }
        Row row;
        if (!ph.hot_region) {
            row = st.ratio->next();
        } else if (uniform_unit(st.gen) < ph.hot_fraction) {
            row = ph.hot_low + static_cast<Row>(uniform_below(st.gen, ph.hot_rows));
        } else {
            row = static_cast<Row>(uniform_below(st.gen, spec.n_rows));
        }
        trace.events.push_back({i * spec.gap_ns, b, row});
    }
    return trace;
}

Trace generate(const WorkloadSpec& spec) {
    switch (spec.kind) {
    case WorkloadKind::uniform: return gen_uniform(spec);
    case WorkloadKind::biased: return gen_biased(spec);
    case WorkloadKind::reference_ratio: return gen_reference_ratio(spec);
    case WorkloadKind::gaussian_attack: return gen_gaussian_attack(spec);
    case WorkloadKind::mixed_attack: return gen_mixed_attack(spec);
    case WorkloadKind::hotspot_shift: return gen_hotspot_shift(spec);
    }
    throw ConfigError("unsupported workload kind");
}

} // namespace catsim
