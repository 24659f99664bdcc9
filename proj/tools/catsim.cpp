// catsim: batch driver for the row-hammer mitigation simulator.

#include "catsim/experiment.hpp"
#include "catsim/reliability.hpp"
#include "catsim/thresholds.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

using namespace catsim;

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_dir,
            const std::string& format) {
    ExperimentConfig cfg = load_experiment_file(config_path);
    if (seed)
        override_seed(cfg, *seed);
    if (!format.empty())
        cfg.format = parse_output_format(format);
    const std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;
    ExperimentResult res = run_experiment(cfg);
    for (const auto& path : write_outputs(cfg, res, dir))
        std::cout << "wrote " << path << '\n';
    for (const auto& s : res.skipped)
        std::cout << "skipped " << s << '\n';
    for (const auto& sr : res.runs) {
        const auto& m = sr.result.aggregate;
        std::cout << sr.result.label << ": rows_refreshed=" << m.rows_refreshed
                  << " refresh_events=" << m.refresh_events << " cmrpo=" << format_double(m.power.cmrpo)
                  << " eto=" << format_double(m.eto) << '\n';
    }
    return 0;
}

int cmd_thresholds(std::uint32_t m, std::uint32_t l, std::uint32_t t, const std::string& table_path,
                   const std::string& format) {
    ThresholdTable table;
    if (!table_path.empty())
        table = ThresholdTable::from_file(table_path);
    const SplitThresholds th = select_thresholds(m, l, t, &table);
    const std::uint32_t first = th.first_level(l);
    if (format == "json") {
        nlohmann::json j = {{"m_counters", m},
                            {"max_levels", l},
                            {"refresh_threshold", t},
                            {"first_level", first},
                            {"values", th.values},
                            {"source", std::string(to_string(th.source))}};
        std::cout << j.dump(2) << '\n';
        return 0;
    }
    if (format != "text")
        throw ConfigError("--format must be text or json");
    std::cout << "values: [";
    for (std::size_t i = 0; i < th.values.size(); ++i)
        std::cout << (i ? ", " : "") << th.values[i];
    std::cout << "]\nlevels: " << first << ".." << l - 1 << "\nsource: " << to_string(th.source) << '\n';
    return 0;
}

int cmd_reliability(const ReliabilityRequest& req, const std::string& format, const std::string& out_dir) {
    const auto rows = reliability_rows(req);
    std::string body;
    if (format == "csv")
        body = reliability_csv(rows);
    else if (format == "json")
        body = reliability_json(rows).dump(2) + "\n";
    else
        throw ConfigError("--format must be csv or json");
    if (out_dir.empty()) {
        std::cout << body;
        return 0;
    }
    std::filesystem::create_directories(out_dir);
    const auto path = (std::filesystem::path(out_dir) / ("reliability." + format)).string();
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << body))
        throw std::runtime_error("cannot write '" + path + "'");
    std::cout << "wrote " << path << '\n';
    return 0;
}

int cmd_gen_trace(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& output,
                  const std::string& format) {
    ExperimentConfig cfg = load_experiment_file(config_path);
    if (seed)
        override_seed(cfg, *seed);
    if (!cfg.workload)
        throw ConfigError("workload: gen-trace needs a workload section");
    const TraceFormat fmt = parse_trace_format(format);
    const Trace trace = generate(*cfg.workload);
    std::ofstream out(output, fmt == TraceFormat::binary ? std::ios::binary : std::ios::out);
    if (!out)
        throw std::runtime_error("cannot write '" + output + "'");
    write_trace(out, trace, fmt);
    std::cout << "wrote " << trace.events.size() << " events to " << output << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Row-hammer mitigation simulator: CAT, DRCAT, PRCAT, SCA and PRA"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(catsim::kToolVersion));

    std::optional<std::uint64_t> seed;
    std::string out_dir, format;

    auto* run = app.add_subcommand("run", "Run an experiment config (or re-run a manifest)");
    std::string config_path;
    run->add_option("config", config_path, "Experiment config or manifest (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the master seed");
    run->add_option("--out-dir", out_dir, "Output directory (default: config output.dir)");
    run->add_option("--format", format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));

    auto* rel = app.add_subcommand("reliability", "Analytic and Monte-Carlo unsurvivability");
    catsim::ReliabilityRequest req;
    std::string prng = "quality";
    std::string rel_format = "csv";
    rel->add_option("--p", req.p, "Refresh probabilities")->delimiter(',');
    rel->add_option("--T", req.T, "Refresh thresholds")->delimiter(',');
    rel->add_option("--q0", req.q0, "Hammering windows per refresh interval")->delimiter(',');
    rel->add_option("--years", req.years, "Horizon in years");
    rel->add_option("--prng", prng, "quality or lfsr")->check(CLI::IsMember({"quality", "lfsr"}));
    rel->add_option("--trials", req.trials, "Monte-Carlo trials (0 = analytic only)");
    rel->add_option("--intervals", req.intervals, "Refresh intervals per trial")->check(CLI::PositiveNumber);
    rel->add_option("--seed", req.seed, "Monte-Carlo seed");
    rel->add_option("--format", rel_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    rel->add_option("--out-dir", out_dir, "Write reliability.<format> here instead of stdout");

    auto* thr = app.add_subcommand("thresholds", "Print split thresholds and their provenance");
    std::uint32_t m = 64, l = 10, t = 32768;
    std::string table_path, thr_format = "text";
    thr->add_option("-M,--m-counters", m, "Counters per bank")->required();
    thr->add_option("-L,--max-levels", l, "Maximum tree levels")->required();
    thr->add_option("-T,--refresh-threshold", t, "Refresh threshold")->required();
    thr->add_option("--table", table_path, "Threshold table (JSON)")->check(CLI::ExistingFile);
    thr->add_option("--format", thr_format, "text or json");

    auto* gen = app.add_subcommand("gen-trace", "Write the config's workload as a trace file");
    std::string gen_config, gen_output, trace_format = "text";
    gen->add_option("config", gen_config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    gen->add_option("-o,--output", gen_output, "Trace file to write")->required();
    gen->add_option("--seed", seed, "Override the master seed");
    gen->add_option("--format", trace_format, "text, text-untimed or binary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run)
            return cmd_run(config_path, seed, out_dir, format);
        if (*rel) {
            req.prng = catsim::parse_prng_kind(prng);
            return cmd_reliability(req, rel_format, out_dir);
        }
        if (*thr)
            return cmd_thresholds(m, l, t, table_path, thr_format);
        if (*gen)
            return cmd_gen_trace(gen_config, seed, gen_output, trace_format);
    } catch (const catsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const catsim::TraceError& e) {
        std::cerr << "trace error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const catsim::UnsupportedConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
