#include "catsim/core.hpp"

#include <doctest.h>

#include <sstream>

using namespace catsim;

namespace {

BankConfig small_bank() {
    BankConfig c;
    c.n_rows = 1024;
    c.m_counters = 8;
    c.max_levels = 5;
    c.refresh_threshold = 64;
    c.presplit_levels = 2;
    return c;
}

std::string error_of(const BankConfig& c) {
    try {
        validate_config(c);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("default bank config is valid") {
    CHECK_NOTHROW(validate_config(BankConfig{}));
    CHECK_NOTHROW(validate_config(small_bank()));
}

TEST_CASE("config violations name the invariant") {
    auto c = small_bank();
    c.m_counters = 6;
    CHECK(error_of(c).find("power of two") != std::string::npos);

    c = small_bank();
    c.m_counters = 32;  // 2^(5-1) = 16 leaves at most
    CHECK(error_of(c).find("m_counters > 2^(max_levels-1)") != std::string::npos);

    c = small_bank();
    c.n_rows = 1000;
    CHECK(error_of(c).find("divisible") != std::string::npos);

    c = small_bank();
    c.presplit_levels = 4;  // log2(8) = 3
    CHECK(error_of(c).find("presplit_levels") != std::string::npos);

    c = small_bank();
    c.presplit_levels = 0;
    CHECK(error_of(c).find("presplit_levels") != std::string::npos);

    c = small_bank();
    c.refresh_threshold = 0;
    CHECK(error_of(c).find("refresh_threshold") != std::string::npos);

    c = small_bank();
    c.max_levels = 0;
    CHECK(error_of(c).find("max_levels") != std::string::npos);
}

TEST_CASE("single counter bank allows lambda = 1") {
    BankConfig c;
    c.n_rows = 16;
    c.m_counters = 1;
    c.max_levels = 1;
    c.refresh_threshold = 4;
    c.presplit_levels = 1;
    CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("widened refresh is clamped to the bank") {
    auto ev = widened_range_refresh(0, 7, 32, RefreshCause::threshold_leaf);
    CHECK(ev.low_row == 0);
    CHECK(ev.high_row == 8);
    CHECK(ev.rows() == 9);
    ev = widened_range_refresh(8, 15, 32, RefreshCause::threshold_leaf);
    CHECK(ev.low_row == 7);
    CHECK(ev.high_row == 16);
    ev = widened_range_refresh(24, 31, 32, RefreshCause::sca_group);
    CHECK(ev.high_row == 31);
    CHECK(ev.rows() == 9);
}

TEST_CASE("neighbour refresh skips the aggressor") {
    auto ev = neighbor_refresh(5, 16);
    CHECK(ev.low_row == 4);
    CHECK(ev.high_row == 6);
    CHECK(ev.rows() == 2);
    CHECK(ev.refreshes(4));
    CHECK_FALSE(ev.refreshes(5));
    CHECK(ev.refreshes(6));

    ev = neighbor_refresh(0, 16);
    CHECK(ev.low_row == 1);
    CHECK(ev.high_row == 1);
    CHECK(ev.rows() == 1);

    ev = neighbor_refresh(15, 16);
    CHECK(ev.low_row == 14);
    CHECK(ev.rows() == 1);
}

TEST_CASE("text trace round trip keeps metadata") {
    Trace t;
    t.meta = {"unit", 42, 2};
    t.events = {{0, 0, 5}, {10, 1, 7}, {10, 0, 9}, {30, 1, 0}};
    std::stringstream ss;
    write_trace(ss, t, TraceFormat::text);
    auto back = load_trace(ss, TraceFormat::text);
    CHECK(back == t);
}

TEST_CASE("binary trace round trip keeps events") {
    Trace t;
    t.meta.banks = 3;
    t.events = {{0, 0, 5}, {10, 2, 70000}, {1ull << 40, 1, 9}};
    std::stringstream ss;
    write_trace(ss, t, TraceFormat::binary);
    auto back = load_trace(ss, TraceFormat::binary);
    CHECK(back.events == t.events);
    CHECK(back.meta.banks == 3);
}

TEST_CASE("untimed traces get synthetic timestamps") {
    std::istringstream in("0 3\n# comment\n\n1 4\n0 5\n");
    auto t = load_trace(in, TraceFormat::text_untimed, {25});
    REQUIRE(t.events.size() == 3);
    CHECK(t.events[0] == AccessEvent{0, 0, 3});
    CHECK(t.events[1] == AccessEvent{25, 1, 4});
    CHECK(t.events[2] == AccessEvent{50, 0, 5});
    CHECK(t.meta.banks == 2);
}

TEST_CASE("trace errors carry kind and line") {
    auto kind_line = [](const std::string& text) {
        std::istringstream in(text);
        try {
            load_trace(in, TraceFormat::text);
        } catch (const TraceError& e) {
            return std::make_pair(e.kind(), e.line());
        }
        FAIL("no error");
        return std::make_pair(TraceError::Kind::parse, std::size_t{0});
    };
    auto [k1, l1] = kind_line("0 0 1\n5 0 x\n");
    CHECK(k1 == TraceError::Kind::parse);
    CHECK(l1 == 2);
    auto [k2, l2] = kind_line("# generator: x\n10 0 1\n5 0 2\n");
    CHECK(k2 == TraceError::Kind::ordering);
    CHECK(l2 == 3);
    auto [k3, l3] = kind_line("0 0\n");
    CHECK(k3 == TraceError::Kind::parse);
    CHECK(l3 == 1);
}

TEST_CASE("truncated binary record is rejected") {
    std::stringstream ss;
    Trace t;
    t.events = {{0, 0, 1}};
    write_trace(ss, t, TraceFormat::binary);
    std::string bytes = ss.str() + "abc";
    std::istringstream in(bytes);
    CHECK_THROWS_AS(load_trace(in, TraceFormat::binary), TraceError);
}

TEST_CASE("row range check") {
    Trace t;
    t.events = {{0, 0, 1}, {1, 0, 16}};
    try {
        check_trace_rows(t, 16);
        FAIL("expected range error");
    } catch (const TraceError& e) {
        CHECK(e.kind() == TraceError::Kind::range);
        CHECK(e.line() == 2);
    }
    CHECK_NOTHROW(check_trace_rows(t, 17));
}

TEST_CASE("split by bank preserves per-bank order") {
    Trace t;
    t.events = {{0, 1, 5}, {1, 0, 6}, {2, 1, 7}, {3, 0, 8}, {4, 2, 9}};
    auto parts = split_by_bank(t);
    REQUIRE(parts.size() == 3);
    CHECK(parts[0] == std::vector<AccessEvent>{{1, 0, 6}, {3, 0, 8}});
    CHECK(parts[1] == std::vector<AccessEvent>{{0, 1, 5}, {2, 1, 7}});
    CHECK(parts[2].size() == 1);
}

TEST_CASE("trace format names") {
    CHECK(parse_trace_format("text") == TraceFormat::text);
    CHECK(parse_trace_format("text-untimed") == TraceFormat::text_untimed);
    CHECK(parse_trace_format("binary") == TraceFormat::binary);
    CHECK_THROWS_AS(parse_trace_format("csv"), ConfigError);
}
