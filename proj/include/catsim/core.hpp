#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace catsim {

using Row = std::uint32_t;
using BankId = std::uint32_t;
using TimeNs = std::uint64_t;

inline constexpr TimeNs kDefaultRefreshIntervalNs = 64'000'000;
inline constexpr TimeNs kDefaultAccessGapNs = 10;

/// Raised when a configuration violates one of its invariants. The message
/// names the violated invariant.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised when internal data structures are found in an inconsistent state.
class InvariantError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Static parameters of one simulated bank.
struct BankConfig {
    Row n_rows = 65536;
    std::uint32_t m_counters = 64;
    std::uint32_t max_levels = 11;          // L: tree depth is at most L-1
    std::uint32_t refresh_threshold = 32768; // T
    std::uint32_t presplit_levels = 6;      // lambda
    TimeNs refresh_interval_ns = kDefaultRefreshIntervalNs;

    friend bool operator==(const BankConfig&, const BankConfig&) = default;
};

bool is_power_of_two(std::uint64_t v);
std::uint32_t log2_exact(std::uint64_t v);

/// Returns cfg unchanged if every invariant holds, otherwise throws
/// ConfigError naming the first violated invariant.
const BankConfig& validate_config(const BankConfig& cfg);

struct AccessEvent {
    TimeNs timestamp_ns = 0;
    BankId bank = 0;
    Row row = 0;

    friend bool operator==(const AccessEvent&, const AccessEvent&) = default;
};

enum class RefreshCause { threshold_leaf, sca_group, pra_neighbors, epoch_reset };

std::string_view to_string(RefreshCause cause);

/// A victim-refresh command over the inclusive range [low_row, high_row].
/// For pra_neighbors events spanning three rows, the middle row is the
/// aggressor and is not refreshed.
struct RefreshEvent {
    BankId bank = 0;
    Row low_row = 0;
    Row high_row = 0;
    RefreshCause cause = RefreshCause::threshold_leaf;
    TimeNs timestamp_ns = 0;

    std::uint64_t rows() const;
    bool refreshes(Row row) const;

    friend bool operator==(const RefreshEvent&, const RefreshEvent&) = default;
};

/// Refresh of [low-1, high+1] clamped to the bank.
RefreshEvent widened_range_refresh(Row low, Row high, Row n_rows, RefreshCause cause);

/// Refresh of the existing neighbours of `row`, excluding `row` itself.
RefreshEvent neighbor_refresh(Row row, Row n_rows);

struct TraceMetadata {
    std::string generator = "unknown";
    std::uint64_t seed = 0;
    std::uint32_t banks = 1;

    friend bool operator==(const TraceMetadata&, const TraceMetadata&) = default;
};

struct Trace {
    std::vector<AccessEvent> events;
    TraceMetadata meta;

    friend bool operator==(const Trace&, const Trace&) = default;
};

enum class TraceFormat {
    text,         // "<timestamp_ns> <bank> <row>" per line
    text_untimed, // "<bank> <row>" per line; timestamps = index * gap
    binary        // little-endian u64 timestamp, u32 bank, u32 row
};

TraceFormat parse_trace_format(std::string_view name);

class TraceError : public std::runtime_error {
  public:
    enum class Kind { parse, ordering, range };

    TraceError(Kind kind, std::size_t line, const std::string& what);

    Kind kind() const { return kind_; }
    /// 1-based line number (text formats) or record number (binary).
    std::size_t line() const { return line_; }

  private:
    Kind kind_;
    std::size_t line_;
};

struct TraceLoadOptions {
    TimeNs untimed_gap_ns = kDefaultAccessGapNs;
};

Trace load_trace(std::istream& in, TraceFormat format = TraceFormat::text,
                 const TraceLoadOptions& opts = {});
Trace load_trace_file(const std::string& path, TraceFormat format = TraceFormat::text,
                      const TraceLoadOptions& opts = {});

void write_trace(std::ostream& out, const Trace& trace, TraceFormat format = TraceFormat::text);

/// Throws TraceError(range) if any event addresses a row outside the bank.
void check_trace_rows(const Trace& trace, Row n_rows);

/// Splits a multi-bank trace into independent per-bank streams, preserving
/// order within each bank.
std::map<BankId, std::vector<AccessEvent>> split_by_bank(const Trace& trace);

} // namespace catsim
