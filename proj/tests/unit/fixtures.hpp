#pragma once

#include "catsim/cat_tree.hpp"

namespace fixtures {

using namespace catsim;

inline BankConfig bank(Row n, std::uint32_t m, std::uint32_t l, std::uint32_t t, std::uint32_t lambda) {
    BankConfig c;
    c.n_rows = n;
    c.m_counters = m;
    c.max_levels = l;
    c.refresh_threshold = t;
    c.presplit_levels = lambda;
    return c;
}

/// The eight-counter example tree over 64 rows, seven levels. Leaves in row
/// order: C5 C2 | C4 | C0 | C1 | C3 | C6 C7 with depths 3 3 2 2 3 4 5 5.
///   I0 = [I4, I1]  I4 = [I5, C4]  I5 = [C5, C2]
///   I1 = [C0, I2]  I2 = [C1, I3]  I3 = [C3, I6]  I6 = [C6, C7]
inline CatTree example_tree(std::uint32_t t = 1024, std::vector<std::uint8_t> weights = {0, 0, 0, 0, 0, 0, 0, 0}) {
    const auto cfg = bank(64, 8, 7, t, 1);
    auto th = heuristic_thresholds(8, 7, t);
    auto n = [](std::uint32_t i) { return ChildRef{i, false}; };
    auto c = [](std::uint32_t i) { return ChildRef{i, true}; };
    std::vector<IntermediateNode> nodes = {
        {n(4), n(1), true}, {c(0), n(2), true}, {c(1), n(3), true}, {c(3), n(6), true},
        {n(5), c(4), true}, {c(5), c(2), true}, {c(6), c(7), true},
    };
    std::vector<CounterSlot> counters(8);
    for (std::uint32_t i = 0; i < 8; ++i)
        counters[i] = CounterSlot{0, 6, weights[i], true};
    return CatTree::from_tables(cfg, th, n(0), nodes, counters);
}

} // namespace fixtures
