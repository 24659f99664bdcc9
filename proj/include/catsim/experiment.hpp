#pragma once

#include "catsim/core.hpp"
#include "catsim/prng.hpp"
#include "catsim/reliability.hpp"
#include "catsim/schemes.hpp"
#include "catsim/sim.hpp"
#include "catsim/thresholds.hpp"
#include "catsim/workloads.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace catsim {

inline constexpr const char* kToolVersion = "0.1.0";

struct TraceFileSpec {
    std::string path;
    TraceFormat format = TraceFormat::text;
};

struct SweepSpec {
    std::vector<std::uint32_t> m_counters;
    std::vector<std::uint32_t> max_levels;
};

enum class OutputFormat { csv, json, both };

OutputFormat parse_output_format(std::string_view name);

/// Parsed experiment configuration. `raw` is the JSON the run was built
/// from (with any command-line seed applied); it is echoed into the
/// manifest and hashed.
struct ExperimentConfig {
    nlohmann::json raw;
    std::uint64_t seed = 1;
    BankConfig bank;
    bool presplit_auto = true;
    std::vector<PolicySpec> schemes;
    std::vector<bool> scheme_seed_given;
    std::optional<WorkloadSpec> workload;
    std::optional<TraceFileSpec> trace_file;
    EnergyModel energy = EnergyModel::standard();
    SweepSpec sweep;
    TimeNs row_refresh_time_ns = 50;
    TimeNs access_gap_ns = kDefaultAccessGapNs;
    std::string out_dir = "out";
    OutputFormat format = OutputFormat::both;
    ThresholdTable thresholds;
};

/// Throws ConfigError naming the offending field.
ExperimentConfig parse_experiment(const nlohmann::json& doc);

/// Reads a config file, or a manifest written by a previous run (its
/// embedded config is used).
ExperimentConfig load_experiment_file(const std::string& path);

/// Replaces the master seed (and the raw echo).
void override_seed(ExperimentConfig& cfg, std::uint64_t seed);

/// 64-bit FNV-1a of the canonical JSON text, as 16 hex digits.
std::string config_hash(const nlohmann::json& doc);

struct SchemeRun {
    RunResult result;
    PolicySpec spec;
    std::optional<SplitThresholds> thresholds;
};

struct ExperimentResult {
    std::vector<SchemeRun> runs;
    std::vector<std::string> skipped;  // sweep points rejected by validation
    std::uint64_t seed = 0;
    std::string config_hash;
    TraceMetadata trace_meta;
    std::uint64_t trace_events = 0;
};

/// Builds the trace once and replays it through every (scheme, sweep point).
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Trace described by the workload or trace_file section.
Trace experiment_trace(const ExperimentConfig& cfg);

/// One row per scheme per bank (multi-bank runs) plus an "all" row, preceded by comment lines
/// carrying the seed and config hash.
std::string metrics_csv(const ExperimentResult& res);
nlohmann::json metrics_json(const ExperimentResult& res);
nlohmann::json manifest_json(const ExperimentConfig& cfg, const ExperimentResult& res,
                             const std::vector<std::string>& outputs);

/// Writes metrics.csv / metrics.json and manifest.json; returns the paths.
std::vector<std::string> write_outputs(const ExperimentConfig& cfg, const ExperimentResult& res,
                                       const std::string& out_dir);

struct ReliabilityRequest {
    std::vector<double> p{0.002};
    std::vector<double> T{32768};
    std::vector<double> q0{40};
    double years = 5;
    PrngKind prng = PrngKind::quality;
    std::uint64_t trials = 0;
    std::uint32_t intervals = 1;
    std::uint64_t seed = 1;
};

struct ReliabilityRow {
    double p = 0, T = 0, q0 = 0, q1 = 0;
    double analytic = 0;
    std::optional<double> empirical;  // per-window failure rate
    Interval ci;
    std::uint64_t trials = 0;
};

std::vector<ReliabilityRow> reliability_rows(const ReliabilityRequest& req);
std::string reliability_csv(const std::vector<ReliabilityRow>& rows);
nlohmann::json reliability_json(const std::vector<ReliabilityRow>& rows);

/// Formats a double with round-trip precision, independent of locale.
std::string format_double(double v);

} // namespace catsim
