#include "catsim/core.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace catsim {

bool is_power_of_two(std::uint64_t v) { return v != 0 && std::has_single_bit(v); }

std::uint32_t log2_exact(std::uint64_t v) {
    if (!is_power_of_two(v))
        throw std::invalid_argument("log2_exact: not a power of two");
    return static_cast<std::uint32_t>(std::countr_zero(v));
}

const BankConfig& validate_config(const BankConfig& cfg) {
    if (cfg.n_rows == 0)
        throw ConfigError("n_rows must be positive");
    if (!is_power_of_two(cfg.m_counters))
        throw ConfigError("m_counters must be a positive power of two");
    if (cfg.max_levels == 0 || cfg.max_levels > 32)
        throw ConfigError("max_levels must be in [1, 32]");
    if (cfg.refresh_threshold == 0)
        throw ConfigError("refresh_threshold must be positive");
    if (cfg.refresh_interval_ns == 0)
        throw ConfigError("refresh_interval_ns must be positive");

    const std::uint64_t max_leaves = std::uint64_t{1} << (cfg.max_levels - 1);
    if (cfg.m_counters > max_leaves)
        throw ConfigError("m_counters > 2^(max_levels-1): a tree of " +
                          std::to_string(cfg.max_levels) + " levels has at most " +
                          std::to_string(max_leaves) + " leaves");
    if (cfg.n_rows % max_leaves != 0)
        throw ConfigError("n_rows must be divisible by 2^(max_levels-1)");

    // A single counter has no split levels; lambda = 1 is the unsplit root.
    const std::uint32_t max_presplit = std::max<std::uint32_t>(1, log2_exact(cfg.m_counters));
    if (cfg.presplit_levels < 1 || cfg.presplit_levels > max_presplit)
        throw ConfigError("presplit_levels must satisfy 1 <= presplit_levels <= log2(m_counters)");
    return cfg;
}

std::string_view to_string(RefreshCause cause) {
    switch (cause) {
    case RefreshCause::threshold_leaf: return "threshold-leaf";
    case RefreshCause::sca_group: return "sca-group";
    case RefreshCause::pra_neighbors: return "pra-neighbors";
    case RefreshCause::epoch_reset: return "epoch-reset";
    }
    return "?";
}

std::uint64_t RefreshEvent::rows() const {
    const std::uint64_t width = std::uint64_t{high_row} - low_row + 1;
    if (cause == RefreshCause::pra_neighbors && width == 3)
        return 2;
    return width;
}

bool RefreshEvent::refreshes(Row row) const {
    if (row < low_row || row > high_row)
        return false;
    if (cause == RefreshCause::pra_neighbors && high_row - low_row == 2)
        return row != low_row + 1;
    return true;
}

RefreshEvent widened_range_refresh(Row low, Row high, Row n_rows, RefreshCause cause) {
    RefreshEvent ev;
    ev.low_row = low == 0 ? 0 : low - 1;
    ev.high_row = high + 1 >= n_rows ? n_rows - 1 : high + 1;
    ev.cause = cause;
    return ev;
}

RefreshEvent neighbor_refresh(Row row, Row n_rows) {
    RefreshEvent ev;
    ev.cause = RefreshCause::pra_neighbors;
    if (n_rows == 1) {
        // No neighbours; degenerate one-row bank refreshes nothing useful.
        ev.low_row = ev.high_row = 0;
        return ev;
    }
    if (row == 0) {
        ev.low_row = ev.high_row = 1;
    } else if (row + 1 >= n_rows) {
        ev.low_row = ev.high_row = row - 1;
    } else {
        ev.low_row = row - 1;
        ev.high_row = row + 1;
    }
    return ev;
}

TraceError::TraceError(Kind kind, std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), kind_(kind), line_(line) {}

TraceFormat parse_trace_format(std::string_view name) {
    if (name == "text") return TraceFormat::text;
    if (name == "text-untimed") return TraceFormat::text_untimed;
    if (name == "binary") return TraceFormat::binary;
    throw ConfigError("unknown trace format '" + std::string(name) + "'");
}

namespace {

template <typename T>
bool parse_field(std::string_view tok, T& out) {
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc{} && ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r'))
            ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r')
            ++j;
        if (j > i)
            out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

// "# key: value" header comments carry the metadata.
void parse_metadata_comment(std::string_view body, TraceMetadata& meta) {
    auto colon = body.find(':');
    if (colon == std::string_view::npos)
        return;
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
            s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
            s.remove_suffix(1);
        return s;
    };
    auto key = trim(body.substr(0, colon));
    auto value = trim(body.substr(colon + 1));
    if (key == "generator") {
        meta.generator = std::string(value);
    } else if (key == "seed") {
        parse_field(value, meta.seed);
    } else if (key == "banks") {
        parse_field(value, meta.banks);
    }
}

Trace load_text(std::istream& in, bool timed, const TraceLoadOptions& opts) {
    Trace trace;
    std::string line;
    std::size_t lineno = 0;
    TimeNs last = 0;
    bool any = false;
    std::uint32_t max_bank = 0;
    bool banks_given = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv(line);
        auto hash = sv.find('#');
        if (hash != std::string_view::npos) {
            auto before = split_ws(sv.substr(0, hash));
            if (before.empty()) {
                TraceMetadata before_meta = trace.meta;
                parse_metadata_comment(sv.substr(hash + 1), trace.meta);
                if (trace.meta.banks != before_meta.banks)
                    banks_given = true;
            }
            sv = sv.substr(0, hash);
        }
        auto toks = split_ws(sv);
        if (toks.empty())
            continue;
        AccessEvent ev;
        const std::size_t expected = timed ? 3 : 2;
        if (toks.size() != expected)
            throw TraceError(TraceError::Kind::parse, lineno,
                             "expected " + std::to_string(expected) + " fields, got " +
                                 std::to_string(toks.size()));
        std::size_t k = 0;
        if (timed) {
            if (!parse_field(toks[k++], ev.timestamp_ns))
                throw TraceError(TraceError::Kind::parse, lineno, "bad timestamp");
        } else {
            ev.timestamp_ns = static_cast<TimeNs>(trace.events.size()) * opts.untimed_gap_ns;
        }
        if (!parse_field(toks[k++], ev.bank))
            throw TraceError(TraceError::Kind::parse, lineno, "bad bank index");
        if (!parse_field(toks[k++], ev.row))
            throw TraceError(TraceError::Kind::parse, lineno, "bad row index");
        if (any && ev.timestamp_ns < last)
            throw TraceError(TraceError::Kind::ordering, lineno, "timestamp decreases");
        last = ev.timestamp_ns;
        any = true;
        max_bank = std::max(max_bank, ev.bank);
        trace.events.push_back(ev);
    }
    if (!banks_given && any)
        trace.meta.banks = max_bank + 1;
    return trace;
}

template <typename T>
void put_le(std::ostream& out, T v) {
    std::array<char, sizeof(T)> buf{};
    for (std::size_t i = 0; i < sizeof(T); ++i)
        buf[i] = static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
    out.write(buf.data(), buf.size());
}

template <typename T>
T get_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        v |= std::uint64_t{p[i]} << (8 * i);
    return static_cast<T>(v);
}

constexpr std::size_t kBinaryRecord = 16;

Trace load_binary(std::istream& in) {
    Trace trace;
    std::array<unsigned char, kBinaryRecord> rec{};
    std::size_t recno = 0;
    std::uint32_t max_bank = 0;
    while (true) {
        in.read(reinterpret_cast<char*>(rec.data()), rec.size());
        const auto got = static_cast<std::size_t>(in.gcount());
        if (got == 0)
            break;
        ++recno;
        if (got != rec.size())
            throw TraceError(TraceError::Kind::parse, recno, "truncated binary record");
        AccessEvent ev{get_le<std::uint64_t>(rec.data()), get_le<std::uint32_t>(rec.data() + 8),
                       get_le<std::uint32_t>(rec.data() + 12)};
        if (!trace.events.empty() && ev.timestamp_ns < trace.events.back().timestamp_ns)
            throw TraceError(TraceError::Kind::ordering, recno, "timestamp decreases");
        max_bank = std::max(max_bank, ev.bank);
        trace.events.push_back(ev);
    }
    if (!trace.events.empty())
        trace.meta.banks = max_bank + 1;
    return trace;
}

} // namespace

Trace load_trace(std::istream& in, TraceFormat format, const TraceLoadOptions& opts) {
    switch (format) {
    case TraceFormat::text: return load_text(in, true, opts);
    case TraceFormat::text_untimed: return load_text(in, false, opts);
    case TraceFormat::binary: return load_binary(in);
    }
    throw ConfigError("unsupported trace format");
}

Trace load_trace_file(const std::string& path, TraceFormat format, const TraceLoadOptions& opts) {
    std::ifstream in(path, format == TraceFormat::binary ? std::ios::binary : std::ios::in);
    if (!in)
        throw ConfigError("cannot open trace file '" + path + "'");
    return load_trace(in, format, opts);
}

void write_trace(std::ostream& out, const Trace& trace, TraceFormat format) {
    if (format == TraceFormat::binary) {
        for (const auto& ev : trace.events) {
            put_le(out, ev.timestamp_ns);
            put_le(out, ev.bank);
            put_le(out, ev.row);
        }
        return;
    }
    out << "# generator: " << trace.meta.generator << '\n'
        << "# seed: " << trace.meta.seed << '\n'
        << "# banks: " << trace.meta.banks << '\n';
    for (const auto& ev : trace.events) {
        if (format == TraceFormat::text)
            out << ev.timestamp_ns << ' ';
        out << ev.bank << ' ' << ev.row << '\n';
    }
}

void check_trace_rows(const Trace& trace, Row n_rows) {
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        if (trace.events[i].row >= n_rows)
            throw TraceError(TraceError::Kind::range, i + 1,
                             "row " + std::to_string(trace.events[i].row) + " >= n_rows " +
                                 std::to_string(n_rows));
    }
}

std::map<BankId, std::vector<AccessEvent>> split_by_bank(const Trace& trace) {
    std::map<BankId, std::vector<AccessEvent>> out;
    for (const auto& ev : trace.events)
        out[ev.bank].push_back(ev);
    return out;
}

} // namespace catsim
