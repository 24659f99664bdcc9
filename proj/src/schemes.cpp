#include "catsim/schemes.hpp"

#include <algorithm>
#include <cctype>

namespace catsim {

std::string_view to_string(Scheme scheme) {
    switch (scheme) {
    case Scheme::sca: return "sca";
    case Scheme::pra: return "pra";
    case Scheme::prcat: return "prcat";
    case Scheme::drcat: return "drcat";
    }
    return "?";
}

Scheme parse_scheme(std::string_view name) {
    if (name == "sca") return Scheme::sca;
    if (name == "pra") return Scheme::pra;
    if (name == "prcat") return Scheme::prcat;
    if (name == "drcat") return Scheme::drcat;
    throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

std::optional<RefreshEvent> MitigationPolicy::access(Row row, TimeNs now_ns) {
    const std::uint64_t e = now_ns / cfg_.refresh_interval_ns;
    if (e != epoch_) {
        epoch_ = e;
        on_epoch();
    }
    auto ev = on_access(row);
    if (ev)
        ev->timestamp_ns = now_ns;
    return ev;
}

// SCA ----------------------------------------------------------------------

ScaPolicy::ScaPolicy(const BankConfig& cfg) : MitigationPolicy(cfg) {
    if (cfg.n_rows == 0 || cfg.m_counters == 0 || cfg.n_rows % cfg.m_counters != 0)
        throw ConfigError("sca: n_rows must be a positive multiple of m_counters");
    if (cfg.refresh_threshold == 0)
        throw ConfigError("refresh_threshold must be positive");
    if (cfg.refresh_interval_ns == 0)
        throw ConfigError("refresh_interval_ns must be positive");
    group_size_ = cfg.n_rows / cfg.m_counters;
    counts_.assign(cfg.m_counters, 0);
}

std::optional<RefreshEvent> ScaPolicy::on_access(Row row) {
    const Row g = row / group_size_;
    if (++counts_[g] < cfg_.refresh_threshold)
        return std::nullopt;
    counts_[g] = 0;
    const Row low = g * group_size_;
    return widened_range_refresh(low, low + group_size_ - 1, cfg_.n_rows, RefreshCause::sca_group);
}

void ScaPolicy::on_epoch() { std::fill(counts_.begin(), counts_.end(), 0u); }

// PRA ----------------------------------------------------------------------

PraPolicy::PraPolicy(const BankConfig& cfg, double p, PrngKind kind, std::uint64_t seed)
    : MitigationPolicy(cfg), p_(p), prng_(kind, seed) {
    if (!(p > 0.0 && p <= 1.0))
        throw ConfigError("pra: p must be in (0, 1]");
    if (cfg.n_rows == 0 || cfg.refresh_interval_ns == 0)
        throw ConfigError("pra: n_rows and refresh_interval_ns must be positive");
}

std::optional<RefreshEvent> PraPolicy::on_access(Row row) {
    if (!prng_.bernoulli(p_))
        return std::nullopt;
    return neighbor_refresh(row, cfg_.n_rows);
}

// PRCAT --------------------------------------------------------------------

PrcatPolicy::PrcatPolicy(const BankConfig& cfg, SplitThresholds th)
    : MitigationPolicy(cfg), tree_(cfg, std::move(th)) {}

std::optional<RefreshEvent> PrcatPolicy::on_access(Row row) {
    if (auto r = tree_.record_access(row))
        return r->event;
    return std::nullopt;
}

// DRCAT --------------------------------------------------------------------

DrcatPolicy::DrcatPolicy(const BankConfig& cfg, SplitThresholds th)
    : MitigationPolicy(cfg), tree_(cfg, std::move(th)) {}

DrcatPolicy::DrcatPolicy(CatTree tree) : MitigationPolicy(tree.config()), tree_(std::move(tree)) {}

std::optional<RefreshEvent> DrcatPolicy::on_access(Row row) {
    auto r = tree_.record_access(row);
    if (!r)
        return std::nullopt;
    if (tree_.fully_built())
        on_refresh(r->counter);
    return r->event;
}

std::optional<std::uint32_t> DrcatPolicy::merge_candidate() const {
    const auto& nodes = tree_.nodes();
    const auto& counters = tree_.counters();
    for (std::uint32_t i = tree_.skeleton_nodes(); i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (!n.in_use || !n.left.leaf || !n.right.leaf)
            continue;
        if (counters[n.left.index].weight == 0 && counters[n.right.index].weight == 0)
            return i;
    }
    return std::nullopt;
}

void DrcatPolicy::on_refresh(std::uint32_t leaf) {
    if (update_weights(leaf))
        reconfigure(leaf);
}

bool DrcatPolicy::update_weights(std::uint32_t leaf) {
    for (std::uint32_t c = 0; c < tree_.counters().size(); ++c) {
        auto& s = tree_.slot(c);
        if (!s.active)
            continue;
        if (c == leaf) {
            s.weight = std::min<std::uint8_t>(3, s.weight + 1);
        } else if (s.weight > 0) {
            --s.weight;
        }
    }
    return tree_.slot(leaf).weight == 3;
}

bool DrcatPolicy::reconfigure(std::uint32_t leaf) {
    if (tree_.depth_of(leaf) >= cfg_.max_levels - 1) {
        ++stats_.blocked_max_depth;
        return false;
    }
    auto node = merge_candidate();
    if (!node) {
        ++stats_.blocked_no_candidate;
        return false;
    }
    tree_.merge(*node);
    const std::uint32_t fresh = tree_.split(leaf);
    tree_.slot(leaf).weight = 1;
    tree_.slot(fresh).weight = 1;
    ++stats_.reconfigurations;
    return true;
}

// Factory ------------------------------------------------------------------

std::string PolicySpec::display_name(const BankConfig& base) const {
    if (!label.empty())
        return label;
    std::string name(to_string(scheme));
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::toupper(ch); });
    if (scheme != Scheme::pra)
        name += std::to_string(m_counters.value_or(base.m_counters));
    return name;
}

BankConfig PolicySpec::apply(const BankConfig& base) const {
    BankConfig cfg = base;
    if (m_counters)
        cfg.m_counters = *m_counters;
    if (max_levels)
        cfg.max_levels = *max_levels;
    if (presplit_levels)
        cfg.presplit_levels = *presplit_levels;
    return cfg;
}

SplitThresholds resolve_thresholds(const PolicySpec& spec, const BankConfig& cfg, const ThresholdTable* table) {
    if (spec.thresholds)
        return *spec.thresholds;
    return select_thresholds(cfg.m_counters, cfg.max_levels, cfg.refresh_threshold, table);
}

std::unique_ptr<MitigationPolicy> make_policy(const PolicySpec& spec, const BankConfig& cfg, std::uint64_t seed,
                                              const ThresholdTable* table) {
    switch (spec.scheme) {
    case Scheme::sca: return std::make_unique<ScaPolicy>(cfg);
    case Scheme::pra: return std::make_unique<PraPolicy>(cfg, spec.p, spec.prng, seed);
    case Scheme::prcat: return std::make_unique<PrcatPolicy>(cfg, resolve_thresholds(spec, cfg, table));
    case Scheme::drcat: return std::make_unique<DrcatPolicy>(cfg, resolve_thresholds(spec, cfg, table));
    }
    throw ConfigError("unsupported scheme");
}

} // namespace catsim
