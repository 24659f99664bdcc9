#include "catsim/sim.hpp"

#include "catsim/prng.hpp"

#include <algorithm>

namespace catsim {

EnergyModel EnergyModel::standard() {
    EnergyModel e;
    struct Row5 {
        std::uint32_t m;
        double drcat_dyn, drcat_static, prcat_dyn, prcat_static, sca_dyn, sca_static;
    };
    static constexpr Row5 rows[] = {
        {32, 3.05e-4, 5.77e3, 2.91e-4, 5.55e3, 1.41e-4, 3.16e3},
        {64, 4.30e-4, 1.39e4, 4.09e-4, 1.32e4, 1.92e-4, 8.81e3},
        {128, 5.83e-4, 2.77e4, 5.50e-4, 2.63e4, 2.22e-4, 1.44e4},
        {256, 8.72e-4, 5.44e4, 8.25e-4, 5.13e4, 3.12e-4, 2.39e4},
        {512, 1.17e-3, 1.06e5, 1.10e-3, 1.02e5, 4.25e-4, 4.52e4},
    };
    for (const auto& r : rows) {
        e.table[{Scheme::drcat, r.m}] = {r.drcat_dyn, r.drcat_static};
        e.table[{Scheme::prcat, r.m}] = {r.prcat_dyn, r.prcat_static};
        e.table[{Scheme::sca, r.m}] = {r.sca_dyn, r.sca_static};
    }
    return e;
}

bool EnergyModel::has(Scheme scheme, std::uint32_t m) const {
    return scheme == Scheme::pra || table.count({scheme, m}) > 0;
}

EnergyEntry EnergyModel::lookup(Scheme scheme, std::uint32_t m) const {
    if (scheme == Scheme::pra)
        return {};
    auto it = table.find({scheme, m});
    if (it == table.end())
        throw ConfigError("energy table has no entry for (" + std::string(to_string(scheme)) + ", M=" +
                          std::to_string(m) + ")");
    return it->second;
}

TimeNs sim_time_for(const std::vector<AccessEvent>& events, TimeNs gap_ns, TimeNs refresh_interval_ns) {
    if (events.empty())
        return refresh_interval_ns;
    const TimeNs span = events.back().timestamp_ns - events.front().timestamp_ns + gap_ns;
    return std::max(span, refresh_interval_ns);
}

PowerBreakdown cmrpo(const Metrics& m, const EnergyModel& energy, Scheme scheme, std::uint32_t m_counters,
                     TimeNs refresh_interval_ns, std::uint32_t banks) {
    if (m.sim_time_ns == 0)
        throw std::domain_error("cmrpo: sim_time is zero");
    if (refresh_interval_ns == 0)
        throw std::domain_error("cmrpo: refresh interval is zero");
    const EnergyEntry entry = energy.lookup(scheme, m_counters);
    double per_access = entry.dynamic_nj_per_access;
    if (scheme == Scheme::pra)
        per_access += energy.prng_nj_per_access;
    const double t = static_cast<double>(m.sim_time_ns);
    // nJ / ns = W; reported in mW.
    PowerBreakdown p;
    p.dynamic_mw = per_access * static_cast<double>(m.accesses) / t * 1e3;
    p.static_mw = banks * entry.static_nj_per_interval / static_cast<double>(refresh_interval_ns) * 1e3;
    p.refresh_mw = static_cast<double>(m.rows_refreshed) * energy.row_refresh_nj / t * 1e3;
    p.cmrpo = (p.dynamic_mw + p.static_mw + p.refresh_mw) / (banks * energy.baseline_refresh_mw);
    return p;
}

double eto(const Metrics& m, std::uint32_t banks) {
    if (m.sim_time_ns == 0 || banks == 0)
        return 0.0;
    return static_cast<double>(m.total_delay_ns) / (static_cast<double>(m.sim_time_ns) * banks);
}

Metrics run_bank(const std::vector<AccessEvent>& events, MitigationPolicy& policy, const BankConfig& cfg,
                 const EnergyModel& energy, const SimOptions& opts, std::optional<TimeNs> sim_time_ns) {
    Metrics m;
    TimeNs busy_until = 0;
    std::optional<std::uint64_t> epoch;
    for (const auto& ev : events) {
        const std::uint64_t e = ev.timestamp_ns / cfg.refresh_interval_ns;
        if (epoch != e) {
            if (epoch && opts.hooks.on_refresh)
                opts.hooks.on_refresh(RefreshEvent{ev.bank, 0, cfg.n_rows - 1, RefreshCause::epoch_reset,
                                                   e * cfg.refresh_interval_ns});
            epoch = e;
            m.per_epoch.push_back({e, 0, 0, 0});
        }
        if (ev.timestamp_ns < busy_until) {
            ++m.delayed_accesses;
            m.total_delay_ns += busy_until - ev.timestamp_ns;
        }
        auto r = policy.access(ev.row, ev.timestamp_ns);
        ++m.accesses;
        auto& pe = m.per_epoch.back();
        ++pe.accesses;
        if (r) {
            r->bank = ev.bank;
            const std::uint64_t rows = r->rows();
            ++m.refresh_events;
            m.rows_refreshed += rows;
            ++pe.refresh_events;
            pe.rows_refreshed += rows;
            busy_until = std::max(ev.timestamp_ns, busy_until) + rows * opts.row_refresh_time_ns;
            if (opts.hooks.on_refresh)
                opts.hooks.on_refresh(*r);
        }
        if (opts.hooks.on_access)
            opts.hooks.on_access(ev, r);
    }
    m.epochs = m.per_epoch.size();
    m.sim_time_ns = sim_time_ns.value_or(sim_time_for(events, opts.access_gap_ns, cfg.refresh_interval_ns));
    m.power = cmrpo(m, energy, policy.scheme(), cfg.m_counters, cfg.refresh_interval_ns);
    m.eto = eto(m);
    return m;
}

RunResult run(const Trace& trace, const PolicySpec& spec, const BankConfig& base, const EnergyModel& energy,
              const SimOptions& opts) {
    RunResult res;
    res.scheme = spec.scheme;
    res.config = spec.apply(base);
    res.label = spec.display_name(base);
    const BankConfig& cfg = res.config;
    if (!energy.has(spec.scheme, cfg.m_counters))
        energy.lookup(spec.scheme, cfg.m_counters);  // throws with the missing key

    std::uint32_t banks = std::max<std::uint32_t>(1, trace.meta.banks);
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        const auto& ev = trace.events[i];
        if (ev.bank >= banks)
            throw ConfigError("trace event " + std::to_string(i + 1) + " targets bank " + std::to_string(ev.bank) +
                              " but the trace declares " + std::to_string(banks) + " banks");
        if (ev.row >= cfg.n_rows)
            throw ConfigError("trace event " + std::to_string(i + 1) + " row " + std::to_string(ev.row) +
                              " >= n_rows " + std::to_string(cfg.n_rows));
    }

    auto per_bank = split_by_bank(trace);
    const TimeNs sim_time = sim_time_for(trace.events, opts.access_gap_ns, cfg.refresh_interval_ns);
    std::map<std::uint64_t, EpochMetrics> epochs;
    Metrics& agg = res.aggregate;
    for (BankId b = 0; b < banks; ++b) {
        auto policy = make_policy(spec, cfg, mix_seed(spec.seed, b), opts.thresholds);
        static const std::vector<AccessEvent> none;
        auto it = per_bank.find(b);
        const auto& events = it == per_bank.end() ? none : it->second;
        Metrics m = run_bank(events, *policy, cfg, energy, opts, sim_time);
        agg.accesses += m.accesses;
        agg.refresh_events += m.refresh_events;
        agg.rows_refreshed += m.rows_refreshed;
        agg.delayed_accesses += m.delayed_accesses;
        agg.total_delay_ns += m.total_delay_ns;
        for (const auto& pe : m.per_epoch) {
            auto& dst = epochs[pe.epoch];
            dst.epoch = pe.epoch;
            dst.accesses += pe.accesses;
            dst.refresh_events += pe.refresh_events;
            dst.rows_refreshed += pe.rows_refreshed;
        }
        res.banks.push_back({b, std::move(m)});
    }
    for (auto& [e, pe] : epochs)
        agg.per_epoch.push_back(pe);
    agg.epochs = agg.per_epoch.size();
    agg.sim_time_ns = sim_time;
    agg.power = cmrpo(agg, energy, spec.scheme, cfg.m_counters, cfg.refresh_interval_ns, banks);
    agg.eto = eto(agg, banks);
    return res;
}

} // namespace catsim
