#include "catsim/experiment.hpp"

#include "catsim/reliability.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace catsim {

using nlohmann::json;

OutputFormat parse_output_format(std::string_view name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    if (name == "both") return OutputFormat::both;
    throw ConfigError("unknown output format '" + std::string(name) + "' (expected csv, json or both)");
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string config_hash(const json& doc) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : doc.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object())
        field_error(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            ok = ok || key == a;
        if (!ok)
            field_error(path.empty() ? key : path + "." + key, "unknown field");
    }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

template <typename T>
std::optional<T> opt_field(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null())
        return std::nullopt;
    try {
        return it->get<T>();
    } catch (const json::exception& e) {
        field_error(join(path, key), e.what());
    }
}

template <typename T>
T field(const json& obj, const std::string& path, const char* key, T fallback) {
    return opt_field<T>(obj, path, key).value_or(fallback);
}

template <typename T>
T positive(T v, const std::string& path) {
    if (!(v > T{}))
        field_error(path, "must be positive");
    return v;
}

void parse_bank(const json& obj, ExperimentConfig& cfg) {
    const std::string path = "bank";
    check_keys(obj, path,
               {"n_rows", "m_counters", "max_levels", "refresh_threshold", "presplit_levels", "refresh_interval_ns"});
    auto& b = cfg.bank;
    b.n_rows = positive(field<Row>(obj, path, "n_rows", b.n_rows), "bank.n_rows");
    b.m_counters = positive(field<std::uint32_t>(obj, path, "m_counters", b.m_counters), "bank.m_counters");
    b.max_levels = positive(field<std::uint32_t>(obj, path, "max_levels", b.max_levels), "bank.max_levels");
    b.refresh_threshold =
        positive(field<std::uint32_t>(obj, path, "refresh_threshold", b.refresh_threshold), "bank.refresh_threshold");
    b.refresh_interval_ns = positive(field<TimeNs>(obj, path, "refresh_interval_ns", b.refresh_interval_ns),
                                     "bank.refresh_interval_ns");
    auto it = obj.find("presplit_levels");
    if (it == obj.end() || (it->is_string() && *it == "auto")) {
        cfg.presplit_auto = true;
    } else if (it->is_number_unsigned()) {
        cfg.presplit_auto = false;
        b.presplit_levels = it->get<std::uint32_t>();
    } else {
        field_error("bank.presplit_levels", "expected a positive integer or \"auto\"");
    }
}

SplitThresholds parse_threshold_list(const json& v, const std::string& path) {
    try {
        return SplitThresholds{v.get<std::vector<std::uint32_t>>(), ThresholdSource::table};
    } catch (const json::exception& e) {
        field_error(path, e.what());
    }
}

PolicySpec parse_scheme_entry(const json& v, const std::string& path, bool& seed_given) {
    PolicySpec s;
    seed_given = false;
    if (v.is_string()) {
        try {
            s.scheme = parse_scheme(v.get<std::string>());
        } catch (const ConfigError& e) {
            field_error(path, e.what());
        }
        return s;
    }
    check_keys(v, path, {"scheme", "label", "m_counters", "max_levels", "presplit_levels", "p", "prng", "seed",
                         "thresholds"});
    auto name = opt_field<std::string>(v, path, "scheme");
    if (!name)
        field_error(join(path, "scheme"), "required");
    try {
        s.scheme = parse_scheme(*name);
    } catch (const ConfigError& e) {
        field_error(join(path, "scheme"), e.what());
    }
    s.label = field<std::string>(v, path, "label", "");
    s.m_counters = opt_field<std::uint32_t>(v, path, "m_counters");
    s.max_levels = opt_field<std::uint32_t>(v, path, "max_levels");
    s.presplit_levels = opt_field<std::uint32_t>(v, path, "presplit_levels");
    s.p = field<double>(v, path, "p", s.p);
    if (!(s.p > 0 && s.p <= 1))
        field_error(join(path, "p"), "must be in (0, 1]");
    if (auto prng = opt_field<std::string>(v, path, "prng")) {
        try {
            s.prng = parse_prng_kind(*prng);
        } catch (const ConfigError& e) {
            field_error(join(path, "prng"), e.what());
        }
    }
    if (auto seed = opt_field<std::uint64_t>(v, path, "seed")) {
        s.seed = *seed;
        seed_given = true;
    }
    if (v.contains("thresholds"))
        s.thresholds = parse_threshold_list(v["thresholds"], join(path, "thresholds"));
    return s;
}

double parse_bias(const json& obj, const std::string& path, Row n_rows) {
    auto x = opt_field<double>(obj, path, "x");
    auto xw = opt_field<double>(obj, path, "x_over_w");
    if (x && xw)
        field_error(path, "give either x or x_over_w, not both");
    if (xw)
        return *xw * (n_rows / 4.0);
    return x.value_or(0.0);
}

WorkloadSpec parse_workload(const json& obj, const ExperimentConfig& cfg) {
    const std::string path = "workload";
    check_keys(obj, path,
               {"kind", "accesses", "banks", "seed", "gap_ns", "x", "x_over_w", "targets_per_bank",
                "attack_fraction", "mode", "n_rows", "phases"});
    WorkloadSpec w;
    auto kind = opt_field<std::string>(obj, path, "kind");
    if (!kind)
        field_error("workload.kind", "required");
    try {
        w.kind = parse_workload_kind(*kind);
    } catch (const ConfigError& e) {
        field_error("workload.kind", e.what());
    }
    w.n_rows = field<Row>(obj, path, "n_rows", cfg.bank.n_rows);
    w.banks = positive(field<std::uint32_t>(obj, path, "banks", 1u), "workload.banks");
    w.accesses = field<std::uint64_t>(obj, path, "accesses", 0);
    w.seed = field<std::uint64_t>(obj, path, "seed", cfg.seed);
    w.gap_ns = positive(field<TimeNs>(obj, path, "gap_ns", cfg.access_gap_ns), "workload.gap_ns");
    w.x = parse_bias(obj, path, w.n_rows);
    w.targets_per_bank = field<std::uint32_t>(obj, path, "targets_per_bank", w.targets_per_bank);
    auto mode = opt_field<std::string>(obj, path, "mode");
    auto frac = opt_field<double>(obj, path, "attack_fraction");
    if (mode && frac)
        field_error(path, "give either mode or attack_fraction, not both");
    if (mode) {
        try {
            w.attack_fraction = parse_attack_mode(*mode);
        } catch (const ConfigError& e) {
            field_error("workload.mode", e.what());
        }
    } else if (frac) {
        w.attack_fraction = *frac;
    }
    if (obj.contains("phases")) {
        const auto& phases = obj["phases"];
        if (!phases.is_array())
            field_error("workload.phases", "expected an array");
        for (std::size_t i = 0; i < phases.size(); ++i) {
            const std::string pp = "workload.phases[" + std::to_string(i) + "]";
            const auto& ph = phases[i];
            check_keys(ph, pp, {"accesses", "x", "x_over_w", "offset", "hot_low", "hot_rows", "hot_fraction"});
            Phase p;
            p.accesses = field<std::uint64_t>(ph, pp, "accesses", 0);
            p.x = parse_bias(ph, pp, w.n_rows);
            p.offset = field<Row>(ph, pp, "offset", 0);
            p.hot_region = ph.contains("hot_rows");
            p.hot_low = field<Row>(ph, pp, "hot_low", 0);
            p.hot_rows = field<Row>(ph, pp, "hot_rows", 0);
            p.hot_fraction = field<double>(ph, pp, "hot_fraction", p.hot_fraction);
            w.phases.push_back(p);
        }
    }
    if (w.kind == WorkloadKind::hotspot_shift && w.phases.empty())
        field_error("workload.phases", "required for hotspot-shift");
    return w;
}

void parse_energy(const json& obj, EnergyModel& e) {
    const std::string path = "energy";
    check_keys(obj, path, {"row_refresh_nj", "prng_nj_per_access", "baseline_mw", "table"});
    e.row_refresh_nj = field<double>(obj, path, "row_refresh_nj", e.row_refresh_nj);
    e.prng_nj_per_access = field<double>(obj, path, "prng_nj_per_access", e.prng_nj_per_access);
    e.baseline_refresh_mw = positive(field<double>(obj, path, "baseline_mw", e.baseline_refresh_mw), "energy.baseline_mw");
    if (e.row_refresh_nj < 0 || e.prng_nj_per_access < 0)
        field_error(path, "energy constants must be non-negative");
    if (!obj.contains("table"))
        return;
    const auto& table = obj["table"];
    if (!table.is_array())
        field_error("energy.table", "expected an array");
    for (std::size_t i = 0; i < table.size(); ++i) {
        const std::string pp = "energy.table[" + std::to_string(i) + "]";
        const auto& row = table[i];
        check_keys(row, pp, {"scheme", "m_counters", "dynamic_nj_per_access", "static_nj_per_interval"});
        auto name = opt_field<std::string>(row, pp, "scheme");
        auto m = opt_field<std::uint32_t>(row, pp, "m_counters");
        if (!name || !m)
            field_error(pp, "scheme and m_counters are required");
        Scheme s;
        try {
            s = parse_scheme(*name);
        } catch (const ConfigError& ex) {
            field_error(join(pp, "scheme"), ex.what());
        }
        EnergyEntry entry;
        entry.dynamic_nj_per_access = field<double>(row, pp, "dynamic_nj_per_access", 0.0);
        entry.static_nj_per_interval = field<double>(row, pp, "static_nj_per_interval", 0.0);
        if (entry.dynamic_nj_per_access < 0 || entry.static_nj_per_interval < 0)
            field_error(pp, "energy constants must be non-negative");
        e.table[{s, *m}] = entry;
    }
}

} // namespace

ExperimentConfig parse_experiment(const json& doc) {
    ExperimentConfig cfg;
    check_keys(doc, "",
               {"seed", "bank", "schemes", "workload", "trace_file", "energy", "sweep", "sim", "output", "thresholds"});
    cfg.raw = doc;
    cfg.seed = field<std::uint64_t>(doc, "", "seed", cfg.seed);
    if (doc.contains("sim")) {
        const auto& sim = doc["sim"];
        check_keys(sim, "sim", {"row_refresh_time_ns", "access_gap_ns"});
        cfg.row_refresh_time_ns = field<TimeNs>(sim, "sim", "row_refresh_time_ns", cfg.row_refresh_time_ns);
        cfg.access_gap_ns = positive(field<TimeNs>(sim, "sim", "access_gap_ns", cfg.access_gap_ns), "sim.access_gap_ns");
    }
    if (doc.contains("bank"))
        parse_bank(doc["bank"], cfg);

    if (!doc.contains("schemes") || !doc["schemes"].is_array() || doc["schemes"].empty())
        field_error("schemes", "a non-empty list is required");
    for (std::size_t i = 0; i < doc["schemes"].size(); ++i) {
        bool given = false;
        cfg.schemes.push_back(parse_scheme_entry(doc["schemes"][i], "schemes[" + std::to_string(i) + "]", given));
        cfg.scheme_seed_given.push_back(given);
    }

    const bool has_workload = doc.contains("workload"), has_trace = doc.contains("trace_file");
    if (has_workload == has_trace)
        field_error("workload", "exactly one of workload or trace_file is required");
    if (has_workload)
        cfg.workload = parse_workload(doc["workload"], cfg);
    if (has_trace) {
        const auto& t = doc["trace_file"];
        TraceFileSpec spec;
        if (t.is_string()) {
            spec.path = t.get<std::string>();
        } else {
            check_keys(t, "trace_file", {"path", "format"});
            auto p = opt_field<std::string>(t, "trace_file", "path");
            if (!p)
                field_error("trace_file.path", "required");
            spec.path = *p;
            if (auto f = opt_field<std::string>(t, "trace_file", "format")) {
                try {
                    spec.format = parse_trace_format(*f);
                } catch (const ConfigError& e) {
                    field_error("trace_file.format", e.what());
                }
            }
        }
        cfg.trace_file = spec;
    }

    if (doc.contains("energy"))
        parse_energy(doc["energy"], cfg.energy);

    if (doc.contains("sweep")) {
        const auto& sw = doc["sweep"];
        check_keys(sw, "sweep", {"m_counters", "max_levels"});
        cfg.sweep.m_counters = field<std::vector<std::uint32_t>>(sw, "sweep", "m_counters", {});
        cfg.sweep.max_levels = field<std::vector<std::uint32_t>>(sw, "sweep", "max_levels", {});
    }

    if (doc.contains("output")) {
        const auto& out = doc["output"];
        check_keys(out, "output", {"dir", "format"});
        cfg.out_dir = field<std::string>(out, "output", "dir", cfg.out_dir);
        if (auto f = opt_field<std::string>(out, "output", "format")) {
            try {
                cfg.format = parse_output_format(*f);
            } catch (const ConfigError& e) {
                field_error("output.format", e.what());
            }
        }
    }

    if (doc.contains("thresholds")) {
        const auto& th = doc["thresholds"];
        if (th.is_string())
            cfg.thresholds = ThresholdTable::from_file(th.get<std::string>());
        else
            cfg.thresholds = ThresholdTable::from_json_text(th.dump());
    }
    return cfg;
}

ExperimentConfig load_experiment_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    if (doc.is_object() && doc.contains("tool") && doc.contains("config"))
        return parse_experiment(doc["config"]);
    return parse_experiment(doc);
}

void override_seed(ExperimentConfig& cfg, std::uint64_t seed) {
    cfg.raw["seed"] = seed;
    cfg = parse_experiment(cfg.raw);
}

Trace experiment_trace(const ExperimentConfig& cfg) {
    if (cfg.trace_file)
        return load_trace_file(cfg.trace_file->path, cfg.trace_file->format, TraceLoadOptions{cfg.access_gap_ns});
    if (!cfg.workload)
        throw ConfigError("no workload or trace_file section");
    return generate(*cfg.workload);
}

namespace {

bool uses_levels(Scheme s) { return s == Scheme::prcat || s == Scheme::drcat; }

std::uint32_t auto_presplit(std::uint32_t m) {
    if (!is_power_of_two(m))
        return 1;
    return std::max<std::uint32_t>(1, log2_exact(m));
}

void check_sca(const BankConfig& c) {
    if (c.m_counters == 0 || c.n_rows % c.m_counters != 0)
        throw ConfigError("sca: n_rows must be a multiple of m_counters");
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.seed = cfg.seed;
    res.config_hash = config_hash(cfg.raw);
    const Trace trace = experiment_trace(cfg);
    res.trace_meta = trace.meta;
    res.trace_events = trace.events.size();

    const bool sweep_m = !cfg.sweep.m_counters.empty(), sweep_l = !cfg.sweep.max_levels.empty();
    const bool sweeping = sweep_m || sweep_l;
    SimOptions opts;
    opts.row_refresh_time_ns = cfg.row_refresh_time_ns;
    opts.access_gap_ns = cfg.access_gap_ns;
    opts.thresholds = &cfg.thresholds;

    for (std::size_t si = 0; si < cfg.schemes.size(); ++si) {
        const PolicySpec& base_spec = cfg.schemes[si];
        std::vector<std::optional<std::uint32_t>> ms{base_spec.m_counters}, ls{base_spec.max_levels};
        if (sweep_m && base_spec.scheme != Scheme::pra)
            ms.assign(cfg.sweep.m_counters.begin(), cfg.sweep.m_counters.end());
        if (sweep_l && uses_levels(base_spec.scheme))
            ls.assign(cfg.sweep.max_levels.begin(), cfg.sweep.max_levels.end());
        for (auto m : ms) {
            for (auto l : ls) {
                PolicySpec s = base_spec;
                s.m_counters = m;
                s.max_levels = l;
                BankConfig c = s.apply(cfg.bank);
                if (!s.presplit_levels)
                    s.presplit_levels = cfg.presplit_auto ? auto_presplit(c.m_counters) : cfg.bank.presplit_levels;
                c = s.apply(cfg.bank);
                if (!cfg.scheme_seed_given[si])
                    s.seed = mix_seed(cfg.seed, si);
                if (s.label.empty()) {
                    s.label = s.display_name(cfg.bank);
                    if (sweep_l && uses_levels(s.scheme))
                        s.label += "_L" + std::to_string(c.max_levels);
                } else if (sweeping) {
                    if (sweep_m && s.scheme != Scheme::pra)
                        s.label += "_M" + std::to_string(c.m_counters);
                    if (sweep_l && uses_levels(s.scheme))
                        s.label += "_L" + std::to_string(c.max_levels);
                }
                try {
                    if (uses_levels(s.scheme))
                        validate_config(c);
                    else if (s.scheme == Scheme::sca)
                        check_sca(c);
                } catch (const ConfigError& e) {
                    if (!sweeping)
                        throw;
                    res.skipped.push_back(s.label + ": " + e.what());
                    continue;
                }
                if (!cfg.energy.has(s.scheme, c.m_counters))
                    cfg.energy.lookup(s.scheme, c.m_counters);
                SchemeRun sr;
                if (uses_levels(s.scheme)) {
                    sr.thresholds = resolve_thresholds(s, c, &cfg.thresholds);
                    s.thresholds = sr.thresholds;
                }
                sr.result = run(trace, s, cfg.bank, cfg.energy, opts);
                sr.spec = s;
                res.runs.push_back(std::move(sr));
            }
        }
    }
    return res;
}

namespace {

void csv_row(std::ostringstream& os, const SchemeRun& sr, const std::string& bank, const Metrics& m) {
    const auto& c = sr.result.config;
    const bool cat = uses_levels(sr.result.scheme);
    os << sr.result.label << ',' << to_string(sr.result.scheme) << ',';
    if (sr.result.scheme == Scheme::pra)
        os << ",,,";
    else if (cat)
        os << c.m_counters << ',' << c.max_levels << ',' << c.presplit_levels << ',';
    else
        os << c.m_counters << ",,,";
    os << c.refresh_threshold << ',' << bank << ',' << m.accesses << ',' << m.refresh_events << ','
       << m.rows_refreshed << ',' << m.epochs << ',' << m.sim_time_ns << ',' << m.delayed_accesses << ','
       << m.total_delay_ns << ',' << format_double(m.power.dynamic_mw) << ',' << format_double(m.power.static_mw)
       << ',' << format_double(m.power.refresh_mw) << ',' << format_double(m.power.cmrpo) << ','
       << format_double(m.eto) << ',' << (sr.thresholds ? to_string(sr.thresholds->source) : "") << '\n';
}

json metrics_to_json(const Metrics& m) {
    json epochs = json::array();
    for (const auto& e : m.per_epoch)
        epochs.push_back({{"epoch", e.epoch},
                          {"accesses", e.accesses},
                          {"refresh_events", e.refresh_events},
                          {"rows_refreshed", e.rows_refreshed}});
    return {{"accesses", m.accesses},
            {"refresh_events", m.refresh_events},
            {"rows_refreshed", m.rows_refreshed},
            {"epochs", m.epochs},
            {"sim_time_ns", m.sim_time_ns},
            {"delayed_accesses", m.delayed_accesses},
            {"total_delay_ns", m.total_delay_ns},
            {"dynamic_mw", m.power.dynamic_mw},
            {"static_mw", m.power.static_mw},
            {"refresh_mw", m.power.refresh_mw},
            {"cmrpo", m.power.cmrpo},
            {"eto", m.eto},
            {"per_epoch", epochs}};
}

json thresholds_to_json(const SplitThresholds& th) {
    return {{"values", th.values}, {"source", std::string(to_string(th.source))}};
}

} // namespace

std::string metrics_csv(const ExperimentResult& res) {
    std::ostringstream os;
    os << "# seed: " << res.seed << '\n' << "# config_hash: " << res.config_hash << '\n';
    os << "label,scheme,m_counters,max_levels,presplit_levels,refresh_threshold,bank,accesses,refresh_events,"
          "rows_refreshed,epochs,sim_time_ns,delayed_accesses,total_delay_ns,dynamic_mw,static_mw,refresh_mw,"
          "cmrpo,eto,threshold_source\n";
    for (const auto& sr : res.runs) {
        // A single bank's row would repeat the aggregate.
        if (sr.result.banks.size() > 1)
            for (const auto& b : sr.result.banks)
                csv_row(os, sr, std::to_string(b.bank), b.metrics);
        csv_row(os, sr, "all", sr.result.aggregate);
    }
    return os.str();
}

json metrics_json(const ExperimentResult& res) {
    json runs = json::array();
    for (const auto& sr : res.runs) {
        const auto& c = sr.result.config;
        json banks = json::array();
        for (const auto& b : sr.result.banks) {
            json entry = metrics_to_json(b.metrics);
            entry["bank"] = b.bank;
            banks.push_back(entry);
        }
        json run = {{"label", sr.result.label},
                    {"scheme", std::string(to_string(sr.result.scheme))},
                    {"refresh_threshold", c.refresh_threshold},
                    {"n_rows", c.n_rows},
                    {"aggregate", metrics_to_json(sr.result.aggregate)},
                    {"banks", banks}};
        if (sr.result.scheme != Scheme::pra)
            run["m_counters"] = c.m_counters;
        if (uses_levels(sr.result.scheme)) {
            run["max_levels"] = c.max_levels;
            run["presplit_levels"] = c.presplit_levels;
        }
        if (sr.result.scheme == Scheme::pra) {
            run["p"] = sr.spec.p;
            run["prng"] = std::string(to_string(sr.spec.prng));
            run["prng_bits_per_access"] = bits_per_decision(sr.spec.p);
        }
        if (sr.thresholds)
            run["thresholds"] = thresholds_to_json(*sr.thresholds);
        runs.push_back(run);
    }
    return {{"seed", res.seed},
            {"config_hash", res.config_hash},
            {"trace", {{"generator", res.trace_meta.generator},
                       {"seed", res.trace_meta.seed},
                       {"banks", res.trace_meta.banks},
                       {"events", res.trace_events}}},
            {"runs", runs},
            {"skipped", res.skipped}};
}

json manifest_json(const ExperimentConfig& cfg, const ExperimentResult& res, const std::vector<std::string>& outputs) {
    json seeds = json::array(), thresholds = json::array();
    for (const auto& sr : res.runs) {
        seeds.push_back({{"label", sr.result.label}, {"seed", sr.spec.seed}});
        if (sr.thresholds) {
            json t = thresholds_to_json(*sr.thresholds);
            t["label"] = sr.result.label;
            t["m_counters"] = sr.result.config.m_counters;
            t["max_levels"] = sr.result.config.max_levels;
            t["refresh_threshold"] = sr.result.config.refresh_threshold;
            thresholds.push_back(t);
        }
    }
    return {{"tool", "catsim"},
            {"version", kToolVersion},
            {"config", cfg.raw},
            {"config_hash", res.config_hash},
            {"seed", res.seed},
            {"workload_seed", res.trace_meta.seed},
            {"scheme_seeds", seeds},
            {"thresholds", thresholds},
            {"drcat",
             {{"merge_count", "max of the two children"},
              {"promoted_child", "left"},
              {"no_merge_candidate", "structure unchanged"},
              {"weight_decrement", "every threshold-leaf refresh after the tree is built"},
              {"epoch", "counts cleared, structure and weights kept"}}},
            {"skipped", res.skipped},
            {"outputs", outputs}};
}

std::vector<std::string> write_outputs(const ExperimentConfig& cfg, const ExperimentResult& res,
                                       const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory '" + out_dir + "': " + ec.message());
    std::vector<std::string> names;
    if (cfg.format != OutputFormat::json)
        names.push_back("metrics.csv");
    if (cfg.format != OutputFormat::csv)
        names.push_back("metrics.json");
    auto write = [&](const std::string& name, const std::string& body) {
        const auto path = (fs::path(out_dir) / name).string();
        std::ofstream out(path, std::ios::binary);
        if (!out || !(out << body))
            throw std::runtime_error("cannot write '" + path + "'");
        return path;
    };
    std::vector<std::string> paths;
    for (const auto& n : names)
        paths.push_back(write(n, n == "metrics.csv" ? metrics_csv(res) : metrics_json(res).dump(2) + "\n"));
    paths.push_back(write("manifest.json", manifest_json(cfg, res, names).dump(2) + "\n"));
    return paths;
}

std::vector<ReliabilityRow> reliability_rows(const ReliabilityRequest& req) {
    std::vector<ReliabilityRow> rows;
    const double q1 = intervals_in_years(req.years);
    for (double t : req.T) {
        for (double q0 : req.q0) {
            for (double p : req.p) {
                ReliabilityRow r;
                r.p = p;
                r.T = t;
                r.q0 = q0;
                r.q1 = q1;
                r.analytic = unsurvivability({p, t, q0, q1});
                if (req.trials > 0) {
                    MonteCarloConfig mc;
                    mc.kind = req.prng;
                    mc.p = p;
                    mc.T = static_cast<std::uint32_t>(t);
                    mc.trials = req.trials;
                    mc.intervals = req.intervals;
                    mc.windows_per_interval = static_cast<std::uint32_t>(q0);
                    mc.seed = req.seed;
                    auto out = monte_carlo_unsurvivability(mc);
                    r.empirical = out.window_rate;
                    r.ci = out.window_ci;
                    r.trials = req.trials;
                }
                rows.push_back(r);
            }
        }
    }
    return rows;
}

std::string reliability_csv(const std::vector<ReliabilityRow>& rows) {
    std::ostringstream os;
    os << "p,T,Q0,Q1,analytic,window_analytic,empirical,ci_low,ci_high,trials\n";
    for (const auto& r : rows) {
        os << format_double(r.p) << ',' << format_double(r.T) << ',' << format_double(r.q0) << ','
           << format_double(r.q1) << ',' << format_double(r.analytic) << ','
           << format_double(window_failure_probability(r.p, r.T)) << ',';
        if (r.empirical)
            os << format_double(*r.empirical) << ',' << format_double(r.ci.low) << ',' << format_double(r.ci.high);
        else
            os << ",,";
        os << ',' << r.trials << '\n';
    }
    return os.str();
}

json reliability_json(const std::vector<ReliabilityRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        json j = {{"p", r.p},
                  {"T", r.T},
                  {"Q0", r.q0},
                  {"Q1", r.q1},
                  {"analytic", r.analytic},
                  {"window_analytic", window_failure_probability(r.p, r.T)},
                  {"trials", r.trials}};
        if (r.empirical) {
            j["empirical"] = *r.empirical;
            j["ci"] = {r.ci.low, r.ci.high};
        }
        out.push_back(j);
    }
    return out;
}

} // namespace catsim
